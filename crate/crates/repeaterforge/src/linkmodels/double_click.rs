//! Closed-form double-click (Barrett-Kok) link model.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::qstate::{bell_state, BellIndex, CMatrix, DensityMatrix};
use crate::scalar::Real;

use super::{check_prob, DetectorMode, LinkModelError, LinkOutcome};

/// Coincidence-window substitution factors computed from the time-window
/// module; present iff a coincidence window is configured.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceProbs<T> {
    pub ph_ph: T,
    pub ph_dc: T,
    pub dc_dc: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoubleClickParams<T> {
    pub p_a: T,
    pub p_b: T,
    pub visibility: T,
    pub p_dc: T,
    pub f_em_a: T,
    pub f_em_b: T,
    pub detector_mode: DetectorMode,
    pub coincidence: Option<CoincidenceProbs<T>>,
}

impl<T: Real> DoubleClickParams<T> {
    pub fn validate(&self) -> Result<(), LinkModelError> {
        check_prob("p_a", self.p_a)?;
        check_prob("p_b", self.p_b)?;
        check_prob("visibility", self.visibility)?;
        check_prob("p_dc", self.p_dc)?;
        if self.p_dc >= T::one() {
            return Err(LinkModelError::InvalidParameter {
                name: "p_dc",
                value: self.p_dc.to_f64_lossy(),
            });
        }
        for (name, f) in [("f_em_a", self.f_em_a), ("f_em_b", self.f_em_b)] {
            if f < T::of(0.25) || f > T::one() {
                return Err(LinkModelError::InvalidParameter {
                    name,
                    value: f.to_f64_lossy(),
                });
            }
        }
        if let Some(c) = &self.coincidence {
            check_prob("ph_ph", c.ph_ph)?;
            check_prob("ph_dc", c.ph_dc)?;
            check_prob("dc_dc", c.dc_dc)?;
        }
        Ok(())
    }
}

/// Case probabilities of the double-click model: the true success and the
/// four false-positive cases, with coincidence-window substitutions applied.
pub(crate) fn case_probabilities<T: Real>(p: &DoubleClickParams<T>) -> [T; 5] {
    let one = T::one();
    let half = T::of(0.5);
    let no_dc = one - p.p_dc;
    let both = p.p_a * p.p_b;
    let single = p.p_a * (one - p.p_b) + (one - p.p_a) * p.p_b;
    let (p_t, p_f1, p_f2, p_f3) = match p.detector_mode {
        DetectorMode::NR => {
            let nd4 = no_dc * no_dc * no_dc * no_dc;
            (
                half * both * p.visibility * nd4,
                half * both * (one - p.visibility) * nd4,
                T::zero(),
                T::of(2.0) * single * p.p_dc * no_dc * no_dc * no_dc,
            )
        }
        DetectorMode::NNR => {
            let nd2 = no_dc * no_dc;
            (
                half * both * p.visibility * nd2,
                half * both * (one - p.visibility) * nd2,
                half * both * (one + p.visibility) * p.p_dc * nd2,
                T::of(2.0) * single * p.p_dc * nd2,
            )
        }
    };
    let p_f4 = T::of(4.0) * (one - p.p_a) * (one - p.p_b) * p.p_dc * p.p_dc * no_dc * no_dc;
    match &p.coincidence {
        Some(c) => [
            c.ph_ph * p_t,
            c.ph_ph * p_f1,
            c.ph_dc * p_f2,
            c.ph_dc * p_f3,
            c.dc_dc * p_f4,
        ],
        None => [p_t, p_f1, p_f2, p_f3, p_f4],
    }
}

/// Success probability and the normalized post-measurement states of the two
/// PBS branches (same PBS -> Ψ+, different PBS -> Ψ-).
pub fn double_click_outcome<T: Real>(
    p: &DoubleClickParams<T>,
) -> Result<LinkOutcome<T>, LinkModelError> {
    p.validate()?;
    let [p_t, p_f1, p_f2, p_f3, p_f4] = case_probabilities(p);
    let success = p_t + p_f1 + p_f2 + p_f3 + p_f4;
    if !(success > T::zero()) {
        return Err(LinkModelError::ZeroSuccessProbability);
    }
    let q_em =
        (T::of(4.0) * p.f_em_a - T::one()) * (T::of(4.0) * p.f_em_b - T::one()) / T::of(9.0);

    let state = |plus: bool| -> Result<DensityMatrix<T>, LinkModelError> {
        let psi = bell_state::<T>(if plus {
            BellIndex::new(1, 0)
        } else {
            BellIndex::new(1, 1)
        });
        let mut mat = psi.matrix().scale_re(q_em * p_t);
        // Classically anticorrelated component from distinguishable photons.
        let mut anti = CMatrix::zeros(4);
        anti[(1, 1)] = Complex::new(T::of(0.5), T::zero());
        anti[(2, 2)] = Complex::new(T::of(0.5), T::zero());
        mat = mat.add(&anti.scale_re(q_em * p_f1));
        // Classically correlated component (same-detector bunching + dark count).
        let mut corr = CMatrix::zeros(4);
        corr[(0, 0)] = Complex::new(T::of(0.5), T::zero());
        corr[(3, 3)] = Complex::new(T::of(0.5), T::zero());
        mat = mat.add(&corr.scale_re(q_em * p_f2));
        let mixed_weight = (T::one() - q_em) * (p_t + p_f1 + p_f2) + p_f3 + p_f4;
        mat = mat.add(
            &CMatrix::identity(4).scale_re(mixed_weight / T::of(4.0)),
        );
        Ok(DensityMatrix::from_unnormalized(mat)?)
    };

    Ok(LinkOutcome {
        success_prob: success,
        state_plus: state(true)?,
        state_minus: state(false)?,
    })
}
