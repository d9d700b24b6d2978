//! Noise channels acting on density matrices.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::scalar::Real;

use super::matrix::{CMatrix, DensityMatrix};
use super::{ops, QStateError};

/// Noise channel specification. Times are seconds, rates are probabilities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ChannelSpec<T> {
    /// Joint depolarizing on the addressed qubits:
    /// ρ → (1-p) ρ + p (1/d ⊗ tr_sub ρ).
    Depolarizing { p: T },
    /// Amplitude damping after time `t` with relaxation time `t1`.
    AmplitudeDamping { t: T, t1: T },
    /// Phase damping after time `t`: Z error with probability
    /// (1 - e^{-t/T2} e^{-t/(2 T1)}) / 2. T2 is used exactly as written in
    /// this expression (no pure-dephasing conversion).
    PhaseDamping { t: T, t1: T, t2: T },
    /// Z error with fixed probability `p`.
    Dephasing { p: T },
    /// Collective Gaussian dephasing, sampled-rotation mode: the unitary
    /// exp(-i r t/τ Σ_j Z_j) for one sampled rate `r`.
    CollectiveGaussian { r: T, t: T, tau: T },
    /// Collective Gaussian dephasing averaged over r ~ N(0,1):
    /// ρ_xy → ρ_xy exp(-(t/τ)² (m_x - m_y)² / 2) with m the Σ Z eigenvalue.
    CollectiveGaussianAveraged { t: T, tau: T },
    /// Classical readout bit flips: |0⟩ misread with probability `p0`, |1⟩
    /// with `p1`. Applies to measurement outcomes, not to states.
    BitflipReadout { p0: T, p1: T },
}

impl<T: Real> ChannelSpec<T> {
    fn check(&self) -> Result<(), QStateError> {
        let prob = |name: &'static str, v: T| {
            if v >= T::zero() && v <= T::one() {
                Ok(())
            } else {
                Err(QStateError::InvalidChannelParameter {
                    name,
                    value: v.to_f64_lossy(),
                })
            }
        };
        let time = |name: &'static str, v: T| {
            if v >= T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(QStateError::InvalidChannelParameter {
                    name,
                    value: v.to_f64_lossy(),
                })
            }
        };
        let characteristic = |name: &'static str, v: T| {
            if v > T::zero() {
                Ok(())
            } else {
                Err(QStateError::InvalidChannelParameter {
                    name,
                    value: v.to_f64_lossy(),
                })
            }
        };
        match *self {
            ChannelSpec::Depolarizing { p } => prob("p", p),
            ChannelSpec::AmplitudeDamping { t, t1 } => {
                time("t", t)?;
                characteristic("t1", t1)
            }
            ChannelSpec::PhaseDamping { t, t1, t2 } => {
                time("t", t)?;
                characteristic("t1", t1)?;
                characteristic("t2", t2)
            }
            ChannelSpec::Dephasing { p } => prob("p", p),
            ChannelSpec::CollectiveGaussian { t, tau, .. }
            | ChannelSpec::CollectiveGaussianAveraged { t, tau } => {
                time("t", t)?;
                characteristic("tau", tau)
            }
            ChannelSpec::BitflipReadout { p0, p1 } => {
                prob("p0", p0)?;
                prob("p1", p1)
            }
        }
    }

    /// Flip probability for a classical readout outcome (0 or 1).
    pub fn readout_flip_probability(&self, outcome: u8) -> Option<T> {
        match *self {
            ChannelSpec::BitflipReadout { p0, p1 } => {
                Some(if outcome == 0 { p0 } else { p1 })
            }
            _ => None,
        }
    }
}

/// Σ Z_j eigenvalue of a computational basis state over `k` qubits.
fn z_sum_eigenvalue(index: usize, k: usize) -> i64 {
    let mut m = 0i64;
    for q in 0..k {
        if (index >> (k - 1 - q)) & 1 == 0 {
            m += 1;
        } else {
            m -= 1;
        }
    }
    m
}

/// Applies `ch` to the named qubits of `state`.
pub fn apply_channel<T: Real>(
    state: &DensityMatrix<T>,
    ch: &ChannelSpec<T>,
    qubit_indices: &[usize],
) -> Result<DensityMatrix<T>, QStateError> {
    ch.check()?;
    state.validate_qubits(qubit_indices)?;
    if qubit_indices.is_empty() {
        return Ok(state.clone());
    }
    match *ch {
        ChannelSpec::Depolarizing { p } => {
            let replaced = replace_with_mixed(state, qubit_indices)?;
            mix(state, &replaced, p)
        }
        ChannelSpec::AmplitudeDamping { t, t1 } => {
            let keep = (-t / t1).exp();
            let zero = Complex::new(T::zero(), T::zero());
            let k0 = CMatrix::from_rows(&[
                &[Complex::new(T::one(), T::zero()), zero],
                &[zero, Complex::new(keep.sqrt(), T::zero())],
            ]);
            let mut k1 = CMatrix::zeros(2);
            k1[(0, 1)] = Complex::new((T::one() - keep).sqrt(), T::zero());
            let mut out = state.clone();
            for &q in qubit_indices {
                out = out.apply_kraus(&[k0.clone(), k1.clone()], &[q])?;
            }
            Ok(out)
        }
        ChannelSpec::PhaseDamping { t, t1, t2 } => {
            let factor = (-t / t2).exp() * (-t / (T::of(2.0) * t1)).exp();
            let p = (T::one() - factor) / T::of(2.0);
            apply_dephasing(state, p, qubit_indices)
        }
        ChannelSpec::Dephasing { p } => apply_dephasing(state, p, qubit_indices),
        ChannelSpec::CollectiveGaussian { r, t, tau } => {
            let k = qubit_indices.len();
            let dim = 1 << k;
            let angle = r * t / tau;
            let mut u = CMatrix::zeros(dim);
            for x in 0..dim {
                let m = T::of(z_sum_eigenvalue(x, k) as f64);
                let phase = -angle * m;
                u[(x, x)] = Complex::new(phase.cos(), phase.sin());
            }
            state.apply_unitary(&u, qubit_indices)
        }
        ChannelSpec::CollectiveGaussianAveraged { t, tau } => {
            let k = qubit_indices.len();
            let n = state.n_qubits();
            let theta = t / tau;
            let bit = |index: usize, q: usize| (index >> (n - 1 - q)) & 1;
            let sub_index = |index: usize| {
                qubit_indices
                    .iter()
                    .fold(0usize, |acc, &q| (acc << 1) | bit(index, q))
            };
            let mut mat = state.matrix().clone();
            for row in 0..state.dim() {
                for col in 0..state.dim() {
                    let dm = z_sum_eigenvalue(sub_index(row), k)
                        - z_sum_eigenvalue(sub_index(col), k);
                    if dm == 0 {
                        continue;
                    }
                    let damp =
                        (-(theta * theta) * T::of((dm * dm) as f64) / T::of(2.0)).exp();
                    mat[(row, col)] *= Complex::new(damp, T::zero());
                }
            }
            DensityMatrix::new(mat)
        }
        ChannelSpec::BitflipReadout { .. } => Err(QStateError::ClassicalChannel),
    }
}

fn apply_dephasing<T: Real>(
    state: &DensityMatrix<T>,
    p: T,
    qubits: &[usize],
) -> Result<DensityMatrix<T>, QStateError> {
    if p < T::zero() || p > T::one() {
        return Err(QStateError::InvalidChannelParameter {
            name: "p",
            value: p.to_f64_lossy(),
        });
    }
    let mut out = state.clone();
    for &q in qubits {
        let flipped = out.apply_unitary(&ops::pauli_z::<T>(), &[q])?;
        out = mix(&out, &flipped, p)?;
    }
    Ok(out)
}

/// (1-p) a + p b.
fn mix<T: Real>(
    a: &DensityMatrix<T>,
    b: &DensityMatrix<T>,
    p: T,
) -> Result<DensityMatrix<T>, QStateError> {
    DensityMatrix::new(
        a.matrix()
            .scale_re(T::one() - p)
            .add(&b.matrix().scale_re(p)),
    )
}

/// Replaces the addressed subsystem by the maximally mixed state:
/// I/d ⊗ tr_sub ρ, reassembled in the original qubit ordering.
fn replace_with_mixed<T: Real>(
    state: &DensityMatrix<T>,
    qubits: &[usize],
) -> Result<DensityMatrix<T>, QStateError> {
    let n = state.n_qubits();
    let d_sub = 1 << qubits.len();
    let bit = |index: usize, q: usize| (index >> (n - 1 - q)) & 1;
    let mut out = CMatrix::zeros(state.dim());
    let inv = T::one() / T::of(d_sub as f64);
    for row in 0..state.dim() {
        for col in 0..state.dim() {
            // Entry is δ on the subsystem times the traced remainder.
            if qubits.iter().any(|&q| bit(row, q) != bit(col, q)) {
                continue;
            }
            let mut acc = Complex::new(T::zero(), T::zero());
            // Sum over subsystem configurations of the original state with
            // the rest fixed to (row, col) pattern.
            for sub in 0..d_sub {
                let mut r = row;
                let mut ccol = col;
                for (pos, &q) in qubits.iter().enumerate() {
                    let b = (sub >> (qubits.len() - 1 - pos)) & 1;
                    let shift = n - 1 - q;
                    r = (r & !(1 << shift)) | (b << shift);
                    ccol = (ccol & !(1 << shift)) | (b << shift);
                }
                acc += state.entry(r, ccol);
            }
            out[(row, col)] = acc * Complex::new(inv, T::zero());
        }
    }
    DensityMatrix::new(out)
}
