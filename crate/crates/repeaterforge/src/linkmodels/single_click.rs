//! Closed-form single-click link model with bright-state parameters, double
//! excitation and interferometric phase drift.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::qstate::{apply_channel, CMatrix, ChannelSpec, DensityMatrix};
use crate::scalar::Real;

use super::{check_prob, DetectorMode, LinkModelError, LinkOutcome};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingleClickParams<T> {
    pub alpha_a: T,
    pub alpha_b: T,
    pub p_a: T,
    pub p_b: T,
    pub visibility: T,
    pub p_dc: T,
    pub p_dexc: T,
    pub sigma_phase: T,
    pub detector_mode: DetectorMode,
}

impl<T: Real> SingleClickParams<T> {
    pub fn validate(&self) -> Result<(), LinkModelError> {
        for (name, v) in [("alpha_a", self.alpha_a), ("alpha_b", self.alpha_b)] {
            if v < T::zero() || v >= T::one() {
                return Err(LinkModelError::InvalidParameter {
                    name,
                    value: v.to_f64_lossy(),
                });
            }
        }
        check_prob("p_a", self.p_a)?;
        check_prob("p_b", self.p_b)?;
        check_prob("visibility", self.visibility)?;
        check_prob("p_dc", self.p_dc)?;
        check_prob("p_dexc", self.p_dexc)?;
        if self.sigma_phase < T::zero() {
            return Err(LinkModelError::InvalidParameter {
                name: "sigma_phase",
                value: self.sigma_phase.to_f64_lossy(),
            });
        }
        Ok(())
    }
}

/// Case probabilities (p1, p2, p3, p4): both bright, only A bright, only B
/// bright, both dark. Each is summed over the two detectors.
pub(crate) fn case_probabilities<T: Real>(p: &SingleClickParams<T>) -> [T; 4] {
    let one = T::one();
    let two = T::of(2.0);
    let no_dc = one - p.p_dc;
    // No dark count in the other detector (NNR) and additionally none in the
    // clicking detector (NR).
    let survive_factor = match p.detector_mode {
        DetectorMode::NR => no_dc * no_dc,
        DetectorMode::NNR => no_dc,
    };
    let p_1a = p.alpha_a
        * p.alpha_b
        * survive_factor
        * (p.p_a * (one - p.p_b) + p.p_b * (one - p.p_a));
    let p_1b = two * p.alpha_a * p.alpha_b * (one - p.p_a) * (one - p.p_b) * no_dc * p.p_dc;
    let p_1c = match p.detector_mode {
        DetectorMode::NR => T::zero(),
        DetectorMode::NNR => {
            let p_same_dets = one - (one - p.visibility) / two;
            p.alpha_a * p.alpha_b * p.p_a * p.p_b * p_same_dets * no_dc
        }
    };
    let p_2a = p.alpha_a * (one - p.alpha_b) * survive_factor * p.p_a;
    let p_2b = two * p.alpha_a * (one - p.alpha_b) * (one - p.p_a) * no_dc * p.p_dc;
    let p_3a = p.alpha_b * (one - p.alpha_a) * survive_factor * p.p_b;
    let p_3b = two * p.alpha_b * (one - p.alpha_a) * (one - p.p_b) * no_dc * p.p_dc;
    let p_4 = two * (one - p.alpha_a) * (one - p.alpha_b) * no_dc * p.p_dc;
    [p_1a + p_1b + p_1c, p_2a + p_2b, p_3a + p_3b, p_4]
}

/// Success probability and the two heralded branch states of the single-click
/// scheme. Basis: |0⟩ = bright, |1⟩ = dark, node A first.
pub fn single_click_outcome<T: Real>(
    p: &SingleClickParams<T>,
) -> Result<LinkOutcome<T>, LinkModelError> {
    p.validate()?;
    let [p1, p2, p3, p4] = case_probabilities(p);
    let success = p1 + p2 + p3 + p4;
    if !(success > T::zero()) {
        return Err(LinkModelError::ZeroSuccessProbability);
    }

    let coherence = (p.visibility * p2 * p3).sqrt();
    let state = |plus: bool| -> Result<DensityMatrix<T>, LinkModelError> {
        let mut mat = CMatrix::zeros(4);
        mat[(0, 0)] = Complex::new(p1, T::zero());
        mat[(1, 1)] = Complex::new(p2, T::zero());
        mat[(2, 2)] = Complex::new(p3, T::zero());
        mat[(3, 3)] = Complex::new(p4, T::zero());
        let sign = if plus { T::one() } else { -T::one() };
        mat[(1, 2)] = Complex::new(sign * coherence, T::zero());
        mat[(2, 1)] = Complex::new(sign * coherence, T::zero());
        let mut state = DensityMatrix::from_unnormalized(mat)?;
        // Double excitation dephases both qubits with probability p_dexc / 2.
        if p.p_dexc > T::zero() {
            state = apply_channel(
                &state,
                &ChannelSpec::Dephasing {
                    p: p.p_dexc / T::of(2.0),
                },
                &[0, 1],
            )?;
        }
        // Interferometric phase drift dephases one qubit with probability
        // (1 - e^{-σ²/2}) / 2.
        if p.sigma_phase > T::zero() {
            let p_phase = (T::one()
                - (-p.sigma_phase * p.sigma_phase / T::of(2.0)).exp())
                / T::of(2.0);
            state = apply_channel(&state, &ChannelSpec::Dephasing { p: p_phase }, &[0])?;
        }
        Ok(state)
    };

    Ok(LinkOutcome {
        success_prob: success,
        state_plus: state(true)?,
        state_minus: state(false)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{bell_state, fidelity, BellIndex};

    fn base() -> SingleClickParams<f64> {
        SingleClickParams {
            alpha_a: 0.1,
            alpha_b: 0.1,
            p_a: 0.2,
            p_b: 0.2,
            visibility: 1.0,
            p_dc: 0.0,
            p_dexc: 0.0,
            sigma_phase: 0.0,
            detector_mode: DetectorMode::NR,
        }
    }

    #[test]
    fn dark_qubits_with_dark_counts() {
        let q: f64 = 0.03;
        let p = SingleClickParams {
            alpha_a: 0.0,
            alpha_b: 0.0,
            p_dc: q,
            ..base()
        };
        let out = single_click_outcome(&p).unwrap();
        assert!((out.success_prob - 2.0 * q * (1.0 - q)).abs() < 1e-15);
        assert!((out.state_plus.entry(3, 3).re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn symmetric_ideal_case_matches_hand_evaluation() {
        // α = 0.1, p = 0.2, no dark counts: p1 = α² · 2p(1-p), p2 = p3 =
        // α(1-α)p, p4 = 0; F(Ψ+) = (p2 + p3 + 2√(p2 p3)) / (2 (p1+p2+p3)).
        let out = single_click_outcome(&base()).unwrap();
        let p1 = 0.1f64 * 0.1 * 2.0 * 0.2 * 0.8;
        let p2 = 0.1f64 * 0.9 * 0.2;
        let expect = (2.0 * p2 + 2.0 * p2) / (2.0 * (p1 + 2.0 * p2));
        let psi_plus = bell_state::<f64>(BellIndex::new(1, 0));
        let f = fidelity(&out.state_plus, &psi_plus).unwrap();
        assert!((f - expect).abs() < 1e-12, "got {f}, expected {expect}");
        assert!((out.success_prob - (p1 + 2.0 * p2)).abs() < 1e-15);
    }

    #[test]
    fn tiny_alpha_approaches_bell_state() {
        let p = SingleClickParams {
            alpha_a: 1e-10,
            alpha_b: 1e-10,
            ..base()
        };
        let out = single_click_outcome(&p).unwrap();
        let psi_plus = bell_state::<f64>(BellIndex::new(1, 0));
        assert!(fidelity(&out.state_plus, &psi_plus).unwrap() > 1.0 - 1e-9);
        let psi_minus = bell_state::<f64>(BellIndex::new(1, 1));
        assert!(fidelity(&out.state_minus, &psi_minus).unwrap() > 1.0 - 1e-9);
    }

    #[test]
    fn phase_drift_damps_coherence_by_gaussian_factor() {
        // Dephasing one qubit with p = (1 - e^{-σ²/2})/2 scales the Ψ±
        // coherence by 1 - 2p = e^{-σ²/2}; σ → ∞ reaches the fully dephased
        // p = 1/2 point where the coherence vanishes.
        let clean = single_click_outcome(&base()).unwrap();
        for sigma in [0.21f64, 1.0] {
            let drifted = SingleClickParams {
                sigma_phase: sigma,
                ..base()
            };
            let out = single_click_outcome(&drifted).unwrap();
            let ratio = out.state_plus.entry(1, 2).re / clean.state_plus.entry(1, 2).re;
            let expect = (-sigma * sigma / 2.0).exp();
            assert!((ratio - expect).abs() < 1e-12, "σ={sigma}: ratio {ratio}");
        }
        let extreme = SingleClickParams {
            sigma_phase: 1e3,
            ..base()
        };
        let out = single_click_outcome(&extreme).unwrap();
        assert!(out.state_plus.entry(1, 2).norm() < 1e-12);
    }

    #[test]
    fn success_monotone_in_each_parameter() {
        let grid = [0.05, 0.3, 0.7];
        let success = |p: &SingleClickParams<f64>| single_click_outcome(p).unwrap().success_prob;
        for &v in &grid {
            for &w in &grid {
                let mut p = base();
                p.p_dc = 0.01;
                p.alpha_a = v;
                p.alpha_b = w;
                let s0 = success(&p);
                for (bump, name) in [
                    (SingleClickParams { alpha_a: v + 0.1, ..p }, "alpha_a"),
                    (SingleClickParams { alpha_b: w + 0.1, ..p }, "alpha_b"),
                    (SingleClickParams { p_a: p.p_a + 0.1, ..p }, "p_a"),
                    (SingleClickParams { p_b: p.p_b + 0.1, ..p }, "p_b"),
                    (SingleClickParams { p_dc: p.p_dc + 0.05, ..p }, "p_dc"),
                ] {
                    assert!(
                        success(&bump) >= s0 - 1e-12,
                        "success not nondecreasing in {name}"
                    );
                }
            }
        }
    }

    #[test]
    fn rejects_out_of_range() {
        let mut p = base();
        p.alpha_a = 1.0;
        assert!(single_click_outcome(&p).is_err());
        let mut p = base();
        p.sigma_phase = -0.1;
        assert!(single_click_outcome(&p).is_err());
    }
}
