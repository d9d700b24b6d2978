//! No-imperfection probabilities and improvement factors.
//!
//! A parameter improved by factor k has its no-imperfection probability
//! taken to the k-th root; closed forms are used where the inversion is
//! exact (T1/T2 scale by k, the ion coherence time by √k).

use crate::hardware::{ParamName, PlatformKind};

use super::OptimizerError;

/// Probability of no imperfection for a parameter value.
pub fn no_imperfection(name: ParamName, value: f64) -> Result<f64, OptimizerError> {
    use ParamName::*;
    let p = match name {
        DetectionProbZeroDistance | SwapQuality | Visibility | ReadoutFidelity0
        | ReadoutFidelity1 => value,
        DoubleExcitationProb | DarkCountProb => 1.0 - value,
        CarbonInitFidelity | CarbonZFidelity | TwoQubitGateFidelity | ElectronInitFidelity
        | ElectronRotFidelity | InitFidelity | ZRotationFidelity => value,
        EmissionFidelity => (4.0 * value - 1.0) / 3.0,
        InducedDephasingAttempts => (1.0 + (-1.0 / value).exp()) / 2.0,
        ElectronT1 | CarbonT1 | MemoryT1 | ElectronT2 | CarbonT2 | MemoryT2 => {
            (-1.0 / value).exp()
        }
        CoherenceTime => (-1.0 / (value * value)).exp(),
        _ => {
            return Err(OptimizerError::NotImprovable { name });
        }
    };
    if !(0.0..=1.0).contains(&p) {
        return Err(OptimizerError::OutOfDomain { name, value });
    }
    Ok(p)
}

/// Inverse of [`no_imperfection`].
pub fn from_no_imperfection(name: ParamName, p_ni: f64) -> Result<f64, OptimizerError> {
    use ParamName::*;
    let value = match name {
        DetectionProbZeroDistance | SwapQuality | Visibility | ReadoutFidelity0
        | ReadoutFidelity1 => p_ni,
        DoubleExcitationProb | DarkCountProb => 1.0 - p_ni,
        CarbonInitFidelity | CarbonZFidelity | TwoQubitGateFidelity | ElectronInitFidelity
        | ElectronRotFidelity | InitFidelity | ZRotationFidelity => p_ni,
        EmissionFidelity => (3.0 * p_ni + 1.0) / 4.0,
        InducedDephasingAttempts => {
            let inner: f64 = 2.0 * p_ni - 1.0;
            if inner <= 0.0 {
                return Err(OptimizerError::OutOfDomain { name, value: p_ni });
            }
            if inner >= 1.0 {
                f64::INFINITY
            } else {
                -1.0 / inner.ln()
            }
        }
        ElectronT1 | CarbonT1 | MemoryT1 | ElectronT2 | CarbonT2 | MemoryT2 => {
            if p_ni >= 1.0 {
                f64::INFINITY
            } else {
                -1.0 / p_ni.ln()
            }
        }
        CoherenceTime => {
            if p_ni >= 1.0 {
                f64::INFINITY
            } else {
                (-1.0 / p_ni.ln()).sqrt()
            }
        }
        _ => return Err(OptimizerError::NotImprovable { name }),
    };
    Ok(value)
}

/// Improves a baseline value by factor `k ≥ 1`.
pub fn improve_parameter(
    name: ParamName,
    baseline_value: f64,
    k: f64,
) -> Result<f64, OptimizerError> {
    if !(k >= 1.0) {
        return Err(OptimizerError::BadFactor { k });
    }
    use ParamName::*;
    // Exact closed forms: e^{-1/T} to the 1/k power means T -> k T, and
    // e^{-1/T²} means T -> √k T.
    match name {
        ElectronT1 | CarbonT1 | MemoryT1 | ElectronT2 | CarbonT2 | MemoryT2 => {
            return Ok(baseline_value * k);
        }
        CoherenceTime => return Ok(baseline_value * k.sqrt()),
        _ => {}
    }
    let p = no_imperfection(name, baseline_value)?;
    from_no_imperfection(name, p.powf(1.0 / k))
}

/// Parameters the optimizer may improve on each platform.
pub fn improvable_params(platform: PlatformKind) -> &'static [ParamName] {
    use ParamName::*;
    match platform {
        PlatformKind::ColorCenter => &[
            DetectionProbZeroDistance,
            Visibility,
            InducedDephasingAttempts,
            TwoQubitGateFidelity,
            ElectronT2,
            CarbonT2,
            DoubleExcitationProb,
            DarkCountProb,
        ],
        PlatformKind::TrappedIon => &[
            DetectionProbZeroDistance,
            Visibility,
            EmissionFidelity,
            CoherenceTime,
            TwoQubitGateFidelity,
            DarkCountProb,
        ],
        PlatformKind::Abstract => &[
            DetectionProbZeroDistance,
            Visibility,
            EmissionFidelity,
            SwapQuality,
            MemoryT1,
            MemoryT2,
            DarkCountProb,
        ],
    }
}
