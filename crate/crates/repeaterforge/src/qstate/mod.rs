//! Density-matrix algebra, Bell states, noise channels and the
//! teleportation-fidelity functionals used by every other module.

mod channels;
mod matrix;
mod teleport;

pub use channels::{apply_channel, ChannelSpec};
pub use matrix::{CMatrix, DensityMatrix, HERMITICITY_TOL, PSD_TOL};
pub use teleport::{
    avg_teleportation_fidelity, symmetric_overlap_fidelity, teleportation_channel_apply,
    octahedron_states,
};

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, PartialEq)]
pub enum QStateError {
    #[error("dimension {dim} is not a power of two in 2..=8")]
    BadDimension { dim: usize },
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix trace/norm is {norm}, expected 1")]
    NotNormalized { norm: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("qubit index {qubit} out of range for {n_qubits}-qubit state")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("duplicate qubit index {qubit}")]
    DuplicateQubit { qubit: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("reference state is not pure (purity {purity})")]
    NotPure { purity: f64 },
    #[error("invalid channel parameter {name} = {value}")]
    InvalidChannelParameter { name: &'static str, value: f64 },
    #[error("readout bit-flips act on measurement outcomes, not on states")]
    ClassicalChannel,
}

/// Pauli correction frame `X^i Z^j`; `(0, 0)` labels Φ+.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BellIndex {
    pub i: u8,
    pub j: u8,
}

impl BellIndex {
    pub fn new(i: u8, j: u8) -> Self {
        assert!(i <= 1 && j <= 1, "Bell index bits must be 0 or 1");
        Self { i, j }
    }

    pub const ALL: [BellIndex; 4] = [
        BellIndex { i: 0, j: 0 },
        BellIndex { i: 0, j: 1 },
        BellIndex { i: 1, j: 0 },
        BellIndex { i: 1, j: 1 },
    ];

    /// Frame composition (Pauli product up to global phase).
    pub fn compose(self, other: BellIndex) -> BellIndex {
        BellIndex {
            i: self.i ^ other.i,
            j: self.j ^ other.j,
        }
    }
}

fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::of(re), T::of(im))
}

/// Single-qubit Pauli and Clifford operators.
pub mod ops {
    use super::*;

    pub fn identity<T: Real>() -> CMatrix<T> {
        CMatrix::identity(2)
    }

    pub fn pauli_x<T: Real>() -> CMatrix<T> {
        CMatrix::from_rows(&[&[c(0.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0), c(0.0, 0.0)]])
    }

    pub fn pauli_y<T: Real>() -> CMatrix<T> {
        CMatrix::from_rows(&[&[c(0.0, 0.0), c(0.0, -1.0)], &[c(0.0, 1.0), c(0.0, 0.0)]])
    }

    pub fn pauli_z<T: Real>() -> CMatrix<T> {
        CMatrix::from_rows(&[&[c(1.0, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0), c(-1.0, 0.0)]])
    }

    pub fn hadamard<T: Real>() -> CMatrix<T> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        CMatrix::from_rows(&[&[c(h, 0.0), c(h, 0.0)], &[c(h, 0.0), c(-h, 0.0)]])
    }

    /// Rotation about Z: diag(e^{-iφ/2}, e^{iφ/2}).
    pub fn rz<T: Real>(phi: T) -> CMatrix<T> {
        let half = phi / T::of(2.0);
        CMatrix::from_rows(&[
            &[
                Complex::new(half.cos(), -half.sin()),
                Complex::new(T::zero(), T::zero()),
            ],
            &[
                Complex::new(T::zero(), T::zero()),
                Complex::new(half.cos(), half.sin()),
            ],
        ])
    }

    /// Rotation about Y.
    pub fn ry<T: Real>(phi: T) -> CMatrix<T> {
        let half = phi / T::of(2.0);
        CMatrix::from_rows(&[
            &[
                Complex::new(half.cos(), T::zero()),
                Complex::new(-half.sin(), T::zero()),
            ],
            &[
                Complex::new(half.sin(), T::zero()),
                Complex::new(half.cos(), T::zero()),
            ],
        ])
    }

    /// Pauli frame operator X^i Z^j.
    pub fn pauli_frame<T: Real>(idx: BellIndex) -> CMatrix<T> {
        let mut op = identity::<T>();
        if idx.j == 1 {
            op = pauli_z::<T>().mul(&op);
        }
        if idx.i == 1 {
            op = pauli_x::<T>().mul(&op);
        }
        op
    }

    /// CNOT with `control` as the first (most significant) qubit.
    pub fn cnot<T: Real>() -> CMatrix<T> {
        CMatrix::from_rows(&[
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        ])
    }
}

/// Bell-state ket `(X^i Z^j ⊗ 1)|Φ+⟩`.
pub fn bell_ket<T: Real>(idx: BellIndex) -> Vec<Complex<T>> {
    let h = T::of(std::f64::consts::FRAC_1_SQRT_2);
    // |Φ+⟩ amplitudes at |00⟩ and |11⟩.
    let mut amps = vec![Complex::new(T::zero(), T::zero()); 4];
    amps[0] = Complex::new(h, T::zero());
    amps[3] = Complex::new(h, T::zero());
    // Apply Z^j then X^i on the first qubit.
    if idx.j == 1 {
        amps[2] = -amps[2];
        amps[3] = -amps[3];
    }
    if idx.i == 1 {
        amps.swap(0, 2);
        amps.swap(1, 3);
    }
    amps
}

/// Pure maximally entangled two-qubit state for the given Pauli frame.
pub fn bell_state<T: Real>(idx: BellIndex) -> DensityMatrix<T> {
    DensityMatrix::from_pure(&bell_ket(idx)).expect("Bell states are valid by construction")
}

/// Overlap fidelity ⟨φ|a|φ⟩ of `a` against a pure reference `b_pure`.
pub fn fidelity<T: Real>(a: &DensityMatrix<T>, b_pure: &DensityMatrix<T>) -> Result<T, QStateError> {
    a.overlap(b_pure)
}
