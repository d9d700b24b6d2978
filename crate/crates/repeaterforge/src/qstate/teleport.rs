//! Teleportation channel and average teleportation fidelity.

use num_complex::Complex;

use crate::scalar::Real;

use super::matrix::{CMatrix, DensityMatrix};
use super::{bell_ket, ops, BellIndex, QStateError};

/// The six Pauli eigenstates (a regular octahedron on the Bloch sphere).
pub fn octahedron_states<T: Real>() -> Vec<Vec<Complex<T>>> {
    let h = T::of(std::f64::consts::FRAC_1_SQRT_2);
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let hr = Complex::new(h, T::zero());
    let hi = Complex::new(T::zero(), h);
    vec![
        vec![one, zero],  // |0⟩
        vec![zero, one],  // |1⟩
        vec![hr, hr],     // |+⟩
        vec![hr, -hr],    // |-⟩
        vec![hr, hi],     // |+i⟩
        vec![hr, -hi],    // |-i⟩
    ]
}

/// Applies the teleportation channel Λ_σ to the one-qubit state ψ:
/// Λ_σ(ρ) = Σ_ij (X^i Z^j ⊗ ⟨Φ_ij|) (σ ⊗ ρ) (X^i Z^j ⊗ |Φ_ij⟩).
pub fn teleportation_channel_apply<T: Real>(
    sigma: &DensityMatrix<T>,
    psi: &DensityMatrix<T>,
) -> Result<DensityMatrix<T>, QStateError> {
    if sigma.n_qubits() != 2 {
        return Err(QStateError::DimensionMismatch {
            left: sigma.dim(),
            right: 4,
        });
    }
    if psi.n_qubits() != 1 {
        return Err(QStateError::DimensionMismatch {
            left: psi.dim(),
            right: 2,
        });
    }
    let joint = sigma.matrix().tensor(psi.matrix());
    let mut out = CMatrix::zeros(2);
    for idx in BellIndex::ALL {
        // M maps the 3-qubit space (σ_1, σ_2, ψ) to the output qubit:
        // M[a, (b c d)] = P[a, b] Φ_ij[(c d)]^*.
        let pauli = ops::pauli_frame::<T>(idx);
        let phi = bell_ket::<T>(idx);
        let mut m = vec![vec![Complex::new(T::zero(), T::zero()); 8]; 2];
        for a in 0..2 {
            for b in 0..2 {
                for cd in 0..4 {
                    m[a][b * 4 + cd] = pauli[(a, b)] * phi[cd].conj();
                }
            }
        }
        // out += M joint M†
        for a in 0..2 {
            for a2 in 0..2 {
                let mut acc = Complex::new(T::zero(), T::zero());
                for x in 0..8 {
                    for y in 0..8 {
                        acc += m[a][x] * joint[(x, y)] * m[a2][y].conj();
                    }
                }
                out[(a, a2)] += acc;
            }
        }
    }
    DensityMatrix::new(out)
}

/// Average teleportation fidelity of the resource state σ, evaluated as the
/// six-state octahedron average of ⟨ψ|Λ_σ(|ψ⟩⟨ψ|)|ψ⟩.
pub fn avg_teleportation_fidelity<T: Real>(sigma: &DensityMatrix<T>) -> Result<T, QStateError> {
    let mut total = T::zero();
    for ket in octahedron_states::<T>() {
        let psi = DensityMatrix::from_pure(&ket)?;
        let out = teleportation_channel_apply(sigma, &psi)?;
        total += out.overlap(&psi)?;
    }
    Ok(total / T::of(6.0))
}

/// The two-copy overlap 2 ∫dψ ⟨ψ ψ̄|σ|ψ ψ̄⟩ (second factor conjugated — the
/// pairing the Bell-bra contraction produces) evaluated over the same
/// octahedron, a complex projective 2-design. Numerically identical to
/// [`avg_teleportation_fidelity`]; kept as the independent remote-state-
/// preparation route for tests.
pub fn symmetric_overlap_fidelity<T: Real>(sigma: &DensityMatrix<T>) -> Result<T, QStateError> {
    if sigma.n_qubits() != 2 {
        return Err(QStateError::DimensionMismatch {
            left: sigma.dim(),
            right: 4,
        });
    }
    let mut total = T::zero();
    for ket in octahedron_states::<T>() {
        let mut pair = [Complex::new(T::zero(), T::zero()); 4];
        for a in 0..2 {
            for b in 0..2 {
                pair[a * 2 + b] = ket[a] * ket[b].conj();
            }
        }
        let mut overlap = Complex::new(T::zero(), T::zero());
        for x in 0..4 {
            for y in 0..4 {
                overlap += pair[x].conj() * sigma.entry(x, y) * pair[y];
            }
        }
        total += overlap.re;
    }
    Ok(T::of(2.0) * total / T::of(6.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{bell_state, DensityMatrix};

    type Dm = DensityMatrix<f64>;

    fn werner(bell_fraction: f64) -> Dm {
        let phi = bell_state::<f64>(BellIndex::new(0, 0));
        let mixed = Dm::maximally_mixed(2);
        let w = 4.0 / 3.0 * (bell_fraction - 0.25);
        Dm::new(
            phi.matrix()
                .scale_re(w)
                .add(&mixed.matrix().scale_re(1.0 - w)),
        )
        .unwrap()
    }

    #[test]
    fn phi_plus_gives_identity_channel() {
        let sigma = bell_state::<f64>(BellIndex::new(0, 0));
        for ket in octahedron_states::<f64>() {
            let psi = Dm::from_pure(&ket).unwrap();
            let out = teleportation_channel_apply(&sigma, &psi).unwrap();
            assert!(out.matrix().max_abs_diff(psi.matrix()) < 1e-12);
        }
    }

    #[test]
    fn maximally_mixed_resource_outputs_maximally_mixed() {
        let sigma = Dm::maximally_mixed(2);
        for ket in octahedron_states::<f64>() {
            let psi = Dm::from_pure(&ket).unwrap();
            let out = teleportation_channel_apply(&sigma, &psi).unwrap();
            assert!(out.matrix().max_abs_diff(Dm::maximally_mixed(1).matrix()) < 1e-12);
        }
    }

    #[test]
    fn channel_is_linear_in_sigma() {
        let s1 = bell_state::<f64>(BellIndex::new(1, 0));
        let s2 = Dm::maximally_mixed(2);
        let blend = Dm::new(s1.matrix().scale_re(0.5).add(&s2.matrix().scale_re(0.5))).unwrap();
        let psi = Dm::from_pure(&octahedron_states::<f64>()[2]).unwrap();
        let lhs = teleportation_channel_apply(&blend, &psi).unwrap();
        let o1 = teleportation_channel_apply(&s1, &psi).unwrap();
        let o2 = teleportation_channel_apply(&s2, &psi).unwrap();
        let rhs = Dm::new(o1.matrix().scale_re(0.5).add(&o2.matrix().scale_re(0.5))).unwrap();
        assert!(lhs.matrix().max_abs_diff(rhs.matrix()) < 1e-12);
    }

    #[test]
    fn fidelity_of_reference_states() {
        let phi = bell_state::<f64>(BellIndex::new(0, 0));
        assert!((avg_teleportation_fidelity(&phi).unwrap() - 1.0).abs() < 1e-12);
        let mixed = Dm::maximally_mixed(2);
        assert!((avg_teleportation_fidelity(&mixed).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn werner_states_follow_linear_relation() {
        for f in [0.25, 0.5, 0.75, 1.0] {
            let sigma = werner(f);
            let tel = avg_teleportation_fidelity(&sigma).unwrap();
            assert!(
                (tel - (2.0 * f + 1.0) / 3.0).abs() < 1e-12,
                "F = {f}: got {tel}"
            );
        }
    }

    #[test]
    fn wrong_dimensions_rejected() {
        let one_qubit = Dm::maximally_mixed(1);
        let two_qubit = Dm::maximally_mixed(2);
        assert!(teleportation_channel_apply(&one_qubit, &one_qubit).is_err());
        assert!(teleportation_channel_apply(&two_qubit, &two_qubit).is_err());
        assert!(avg_teleportation_fidelity(&one_qubit).is_err());
    }
}
