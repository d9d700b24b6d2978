//! Dense complex matrices and the validated density-matrix type.
//!
//! Qubit 0 is the most significant bit of a basis index, so
//! `tensor(a, b)` is the plain Kronecker product and `|q0 q1⟩` maps to index
//! `2*q0 + q1`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::scalar::Real;

use super::QStateError;

/// Hermiticity and trace tolerance for density-matrix validation.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Eigenvalue floor below which a state is rejected as non-positive.
pub const PSD_TOL: f64 = 1e-10;

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_rows(rows: &[&[Complex<T>]]) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim, "matrix must be square");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }

    /// Outer product |ket⟩⟨ket| of a (not necessarily normalized) vector.
    pub fn projector(ket: &[Complex<T>]) -> Self {
        let dim = ket.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = ket[i] * ket[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).map(|i| self[(i, i)]).fold(
            Complex::new(T::zero(), T::zero()),
            |acc, v| acc + v,
        )
    }

    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix product");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let mut out = self.clone();
        for (o, r) in out.data.iter_mut().zip(rhs.data.iter()) {
            *o += *r;
        }
        out
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        let mut out = self.clone();
        for v in out.data.iter_mut() {
            *v *= factor;
        }
        out
    }

    pub fn scale_re(&self, factor: T) -> Self {
        self.scale(Complex::new(factor, T::zero()))
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn tensor(&self, rhs: &Self) -> Self {
        let n = self.dim * rhs.dim;
        let mut out = Self::zeros(n);
        for i1 in 0..self.dim {
            for j1 in 0..self.dim {
                let a = self[(i1, j1)];
                for i2 in 0..rhs.dim {
                    for j2 in 0..rhs.dim {
                        out[(i1 * rhs.dim + i2, j1 * rhs.dim + j2)] = a * rhs[(i2, j2)];
                    }
                }
            }
        }
        out
    }

    /// `U self U†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.mul(self).mul(&u.dagger())
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> T {
        self.data
            .iter()
            .zip(rhs.data.iter())
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    /// Embeds an operator acting on `qubits` (in the given order) into the
    /// full space of `n_qubits`, qubit 0 = most significant bit.
    pub fn embed(&self, qubits: &[usize], n_qubits: usize) -> Self {
        let sub_qubits = qubits.len();
        assert_eq!(self.dim, 1 << sub_qubits, "operator size mismatch");
        let full = 1 << n_qubits;
        let rest: Vec<usize> = (0..n_qubits).filter(|q| !qubits.contains(q)).collect();
        let mut out = Self::zeros(full);
        let bit = |index: usize, q: usize| (index >> (n_qubits - 1 - q)) & 1;
        for row in 0..full {
            let row_sub: usize = qubits
                .iter()
                .fold(0, |acc, &q| (acc << 1) | bit(row, q));
            for col in 0..full {
                if rest.iter().any(|&q| bit(row, q) != bit(col, q)) {
                    continue;
                }
                let col_sub: usize = qubits
                    .iter()
                    .fold(0, |acc, &q| (acc << 1) | bit(col, q));
                out[(row, col)] = self[(row_sub, col_sub)];
            }
        }
        out
    }

    /// Eigenvalues of a Hermitian matrix via cyclic complex Jacobi sweeps.
    ///
    /// For each pair (p, q) the rotation J (identity outside the p/q block,
    /// block [[c, -s e^{iφ}], [s e^{-iφ}, c]] with a_pq = |a_pq| e^{iφ} and
    /// θ = atan2(2|a_pq|, a_pp - a_qq) / 2) zeroes a_pq in J† A J.
    pub fn hermitian_eigenvalues(&self) -> Vec<T> {
        let n = self.dim;
        let mut a = self.clone();
        let eps = T::epsilon() * T::of(16.0);
        for _sweep in 0..60 {
            let mut off = T::zero();
            for p in 0..n {
                for q in (p + 1)..n {
                    off = off.max(a[(p, q)].norm());
                }
            }
            if off < eps {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    let abs = apq.norm();
                    if abs < eps {
                        continue;
                    }
                    let phase = apq / Complex::new(abs, T::zero());
                    let theta = (T::of(2.0) * abs).atan2(a[(p, p)].re - a[(q, q)].re)
                        / T::of(2.0);
                    let (s, c) = theta.sin_cos();
                    let mut j = Self::identity(n);
                    j[(p, p)] = Complex::new(c, T::zero());
                    j[(q, q)] = Complex::new(c, T::zero());
                    j[(p, q)] = -phase * s;
                    j[(q, p)] = phase.conj() * s;
                    a = j.dagger().mul(&a).mul(&j);
                }
            }
        }
        (0..n).map(|i| a[(i, i)].re).collect()
    }
}

impl<T> std::ops::Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.dim + j]
    }
}

/// Density matrix over 1–3 qubits. Hermitian, unit trace, positive
/// semidefinite within the documented tolerances; violations are reported as
/// errors, never repaired silently.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T> {
    mat: CMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Maximum register size supported by the dense representation.
    pub const MAX_QUBITS: usize = 3;

    /// Builds a density matrix from raw entries, enforcing the invariants.
    pub fn new(mat: CMatrix<T>) -> Result<Self, QStateError> {
        let dm = Self { mat };
        dm.check()?;
        Ok(dm)
    }

    /// Pure state |ψ⟩⟨ψ| from normalized amplitudes.
    pub fn from_pure(ket: &[Complex<T>]) -> Result<Self, QStateError> {
        let norm_sq: T = ket.iter().map(|c| c.norm_sqr()).sum();
        if (norm_sq - T::one()).abs() > T::of(1e-9) {
            return Err(QStateError::NotNormalized {
                norm: norm_sq.to_f64_lossy().sqrt(),
            });
        }
        Self::new(CMatrix::projector(ket))
    }

    /// Maximally mixed state on `n_qubits`.
    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1 << n_qubits;
        Self {
            mat: CMatrix::identity(dim).scale_re(T::one() / T::of(dim as f64)),
        }
    }

    /// Normalizes a positive matrix by its trace.
    pub fn from_unnormalized(mat: CMatrix<T>) -> Result<Self, QStateError> {
        let tr = mat.trace().re;
        if tr <= T::zero() {
            return Err(QStateError::NotNormalized {
                norm: tr.to_f64_lossy(),
            });
        }
        Self::new(mat.scale_re(T::one() / tr))
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn n_qubits(&self) -> usize {
        self.mat.dim().trailing_zeros() as usize
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.mat
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex<T> {
        self.mat[(i, j)]
    }

    fn check(&self) -> Result<(), QStateError> {
        let dim = self.mat.dim();
        if !dim.is_power_of_two() || !(2..=(1 << Self::MAX_QUBITS)).contains(&dim) {
            return Err(QStateError::BadDimension { dim });
        }
        let herm_err = self.mat.max_abs_diff(&self.mat.dagger());
        if herm_err > T::of(HERMITICITY_TOL) {
            return Err(QStateError::NotHermitian {
                deviation: herm_err.to_f64_lossy(),
            });
        }
        let tr = self.mat.trace();
        let tr_err = (tr - Complex::new(T::one(), T::zero())).norm();
        if tr_err > T::of(HERMITICITY_TOL) {
            return Err(QStateError::NotNormalized {
                norm: tr.re.to_f64_lossy(),
            });
        }
        let min_eig = self
            .mat
            .hermitian_eigenvalues()
            .into_iter()
            .fold(T::infinity(), T::min);
        if min_eig < -T::of(PSD_TOL) {
            return Err(QStateError::NotPositive {
                min_eigenvalue: min_eig.to_f64_lossy(),
            });
        }
        Ok(())
    }

    /// Smallest eigenvalue (diagnostic; validation uses it internally).
    pub fn min_eigenvalue(&self) -> T {
        self.mat
            .hermitian_eigenvalues()
            .into_iter()
            .fold(T::infinity(), T::min)
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Result<Self, QStateError> {
        Self::new(self.mat.tensor(&other.mat))
    }

    /// Traces out all qubits except `keep` (result ordered as `keep`).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self, QStateError> {
        let n = self.n_qubits();
        for &q in keep {
            if q >= n {
                return Err(QStateError::QubitOutOfRange { qubit: q, n_qubits: n });
            }
        }
        let out_dim = 1 << keep.len();
        let rest: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let bit = |index: usize, q: usize| (index >> (n - 1 - q)) & 1;
        let mut out = CMatrix::zeros(out_dim);
        for row in 0..self.dim() {
            for col in 0..self.dim() {
                if rest.iter().any(|&q| bit(row, q) != bit(col, q)) {
                    continue;
                }
                let i: usize = keep.iter().fold(0, |acc, &q| (acc << 1) | bit(row, q));
                let j: usize = keep.iter().fold(0, |acc, &q| (acc << 1) | bit(col, q));
                out[(i, j)] += self.mat[(row, col)];
            }
        }
        Self::new(out)
    }

    /// Applies a unitary acting on `qubits` (order significant).
    pub fn apply_unitary(&self, u: &CMatrix<T>, qubits: &[usize]) -> Result<Self, QStateError> {
        self.validate_qubits(qubits)?;
        let full = u.embed(qubits, self.n_qubits());
        Self::new(self.mat.conjugate_by(&full))
    }

    /// Applies a Kraus set `{K_i}` acting on `qubits`.
    pub fn apply_kraus(&self, kraus: &[CMatrix<T>], qubits: &[usize]) -> Result<Self, QStateError> {
        self.validate_qubits(qubits)?;
        let n = self.n_qubits();
        let mut out = CMatrix::zeros(self.dim());
        for k in kraus {
            let full = k.embed(qubits, n);
            out = out.add(&self.mat.conjugate_by(&full));
        }
        Self::new(out)
    }

    pub(crate) fn validate_qubits(&self, qubits: &[usize]) -> Result<(), QStateError> {
        let n = self.n_qubits();
        for (i, &q) in qubits.iter().enumerate() {
            if q >= n {
                return Err(QStateError::QubitOutOfRange { qubit: q, n_qubits: n });
            }
            if qubits[..i].contains(&q) {
                return Err(QStateError::DuplicateQubit { qubit: q });
            }
        }
        Ok(())
    }

    /// Overlap ⟨φ|ρ|φ⟩ against a pure reference state.
    pub fn overlap(&self, pure_reference: &Self) -> Result<T, QStateError> {
        if self.dim() != pure_reference.dim() {
            return Err(QStateError::DimensionMismatch {
                left: self.dim(),
                right: pure_reference.dim(),
            });
        }
        let purity = pure_reference.mat.mul(&pure_reference.mat).trace().re;
        if (purity - T::one()).abs() > T::of(1e-9) {
            return Err(QStateError::NotPure {
                purity: purity.to_f64_lossy(),
            });
        }
        Ok(self.mat.mul(&pure_reference.mat).trace().re)
    }
}

/// Serialized form: `{dim, entries: [[re, im], ...]}` row-major.
#[derive(Serialize, Deserialize)]
struct DensityMatrixWire {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

impl<T: Real> Serialize for DensityMatrix<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        DensityMatrixWire {
            dim: self.dim(),
            entries: self
                .mat
                .data()
                .iter()
                .map(|c| [c.re.to_f64_lossy(), c.im.to_f64_lossy()])
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de, T: Real> Deserialize<'de> for DensityMatrix<T> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = DensityMatrixWire::deserialize(deserializer)?;
        if wire.entries.len() != wire.dim * wire.dim {
            return Err(serde::de::Error::custom("entry count does not match dim"));
        }
        let mut mat = CMatrix::zeros(wire.dim);
        for (idx, [re, im]) in wire.entries.into_iter().enumerate() {
            mat[(idx / wire.dim, idx % wire.dim)] = Complex::new(T::of(re), T::of(im));
        }
        DensityMatrix::new(mat).map_err(serde::de::Error::custom)
    }
}
