//! Performance targets induced by verified blind quantum computation: the
//! rate/fidelity feasibility bound, test-round failure probabilities and
//! target comparisons.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, PartialEq)]
pub enum TargetError {
    #[error("parameter {name} = {value} out of range")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("failure-probability constraint violated: combined term {value} > 1/2, bound inapplicable")]
    BoundInapplicable { value: f64 },
}

/// Required entangling rate and average teleportation fidelity, together with
/// the server memory coherence time they were derived for.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerformanceTarget {
    pub f_tel: f64,
    pub rate_hz: f64,
    pub server_coherence_time: f64,
}

impl PerformanceTarget {
    /// Target 1 of the study: F_tel = 0.8717, R = 0.1 Hz at T = 100 s.
    pub fn target_one() -> Self {
        Self {
            f_tel: 0.8717,
            rate_hz: 0.1,
            server_coherence_time: 100.0,
        }
    }

    /// Target 2: F_tel = 0.8571, R = 0.5 Hz at T = 100 s.
    pub fn target_two() -> Self {
        Self {
            f_tel: 0.8571,
            rate_hz: 0.5,
            server_coherence_time: 100.0,
        }
    }
}

/// Signed margins of an achieved (rate, fidelity) pair against a target.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetMargins {
    pub met: bool,
    pub rate_margin: f64,
    pub fidelity_margin: f64,
}

/// Minimum average teleportation fidelity for which two-qubit VBQC is
/// composably secure at entangling rate `rate_hz` and server coherence time
/// `coherence_time`: ½ (1 + e^{1/(2RT)} / √2).
pub fn vbqc_min_fidelity<T: Real>(rate_hz: T, coherence_time: T) -> Result<T, TargetError> {
    if !(rate_hz > T::zero()) {
        return Err(TargetError::OutOfRange {
            name: "rate_hz",
            value: rate_hz.to_f64_lossy(),
        });
    }
    if !(coherence_time > T::zero()) {
        return Err(TargetError::OutOfRange {
            name: "coherence_time",
            value: coherence_time.to_f64_lossy(),
        });
    }
    let rt = rate_hz * coherence_time;
    Ok((T::one() + (T::one() / (T::of(2.0) * rt)).exp() / T::SQRT_2()) / T::of(2.0))
}

/// Probability that a single test round fails when the dummy and trap qubits
/// are prepared with the given fidelities.
pub fn test_round_failure_prob<T: Real>(f_dummy: T, f_trap: T) -> Result<T, TargetError> {
    for (name, v) in [("f_dummy", f_dummy), ("f_trap", f_trap)] {
        if v < T::zero() || v > T::one() {
            return Err(TargetError::OutOfRange {
                name,
                value: v.to_f64_lossy(),
            });
        }
    }
    Ok(f_dummy * (T::one() - f_trap) + f_trap * (T::one() - f_dummy))
}

/// Bound on the average test-round failure probability with depolarizing
/// server memory: e^{-1/(RT)} p_fail + ½ (1 - e^{-1/(RT)}). Requires the
/// combined failure term to be at most ½.
pub fn avg_failure_bound<T: Real>(
    f_dummy_bar: T,
    f_trap_bar: T,
    rate_hz: T,
    coherence_time: T,
) -> Result<T, TargetError> {
    let p_fail = test_round_failure_prob(f_dummy_bar, f_trap_bar)?;
    if p_fail > T::of(0.5) + T::of(1e-12) {
        return Err(TargetError::BoundInapplicable {
            value: p_fail.to_f64_lossy(),
        });
    }
    if !(rate_hz > T::zero()) || !(coherence_time > T::zero()) {
        return Err(TargetError::OutOfRange {
            name: "rate_or_time",
            value: rate_hz.to_f64_lossy(),
        });
    }
    let damp = (-(T::one() / (rate_hz * coherence_time))).exp();
    Ok(damp * p_fail + (T::one() - damp) / T::of(2.0))
}

/// Compares achieved values against a target; exact equality counts as met.
pub fn targets_met(rate_hz: f64, f_tel: f64, target: &PerformanceTarget) -> TargetMargins {
    let rate_margin = rate_hz - target.rate_hz;
    let fidelity_margin = f_tel - target.f_tel;
    TargetMargins {
        met: rate_margin >= 0.0 && fidelity_margin >= 0.0,
        rate_margin,
        fidelity_margin,
    }
}
