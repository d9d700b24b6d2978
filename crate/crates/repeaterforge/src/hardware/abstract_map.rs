//! Mapping of platform parameter sets onto the abstract processing-node
//! model: interference and detection parameters copy over unchanged, the
//! swap circuit's no-imperfection product becomes the swap quality, and the
//! memory model collapses onto a single T1/T2 pair (carbon times for color
//! centers; T1 = ∞ and T2 = the collective coherence time for trapped ions,
//! per the textual rule).

use std::collections::BTreeMap;

use super::circuits::swap_circuit;
use super::{HardwareError, HardwareParams, ParamName, PlatformKind};

pub fn map_to_abstract(params: &HardwareParams) -> Result<HardwareParams, HardwareError> {
    if params.platform == PlatformKind::Abstract {
        return Ok(params.clone());
    }
    let circuit = swap_circuit(params)?;
    let mut values = BTreeMap::new();
    for name in [
        ParamName::Visibility,
        ParamName::DarkCountProb,
        ParamName::DetectionProbZeroDistance,
        ParamName::EmissionFidelity,
        ParamName::EmissionDuration,
    ] {
        values.insert(name, params.get(name)?);
    }
    values.insert(ParamName::SwapQuality, circuit.fidelity_product);
    values.insert(ParamName::SwapDuration, circuit.duration);
    match params.platform {
        PlatformKind::ColorCenter => {
            values.insert(ParamName::MemoryT1, params.get(ParamName::CarbonT1)?);
            values.insert(ParamName::MemoryT2, params.get(ParamName::CarbonT2)?);
            values.insert(
                ParamName::AttemptInitDuration,
                params.get(ParamName::ElectronInitDuration)?,
            );
        }
        PlatformKind::TrappedIon => {
            values.insert(ParamName::MemoryT1, f64::INFINITY);
            values.insert(ParamName::MemoryT2, params.get(ParamName::CoherenceTime)?);
            values.insert(
                ParamName::AttemptInitDuration,
                params.get(ParamName::InitDuration)?,
            );
        }
        PlatformKind::Abstract => unreachable!(),
    }
    HardwareParams::new(PlatformKind::Abstract, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardware::baseline;

    #[test]
    fn ti_baseline_maps_to_published_swap_quality() {
        let abstracted = map_to_abstract(&baseline("ti-baseline").unwrap()).unwrap();
        let s_q = abstracted.get(ParamName::SwapQuality).unwrap();
        assert!((s_q - 0.94).abs() < 5e-3, "TI swap quality {s_q}");
        assert_eq!(abstracted.get(ParamName::MemoryT2).unwrap(), 0.085);
        assert!(abstracted.get(ParamName::MemoryT1).unwrap().is_infinite());
        assert_eq!(abstracted.get(ParamName::Visibility).unwrap(), 0.89);
        assert_eq!(
            abstracted.get(ParamName::DetectionProbZeroDistance).unwrap(),
            0.111
        );
    }

    #[test]
    fn cc_baseline_swap_quality_from_documented_circuit() {
        // Two controlled rotations, three single-qubit frame ops, electron
        // init and two mean-flip readouts: 0.97² · 0.995³ · 0.999 · 0.9625².
        let abstracted = map_to_abstract(&baseline("cc-baseline").unwrap()).unwrap();
        let s_q = abstracted.get(ParamName::SwapQuality).unwrap();
        let expect = 0.97f64.powi(2) * 0.995f64.powi(3) * 0.999 * 0.9625f64.powi(2);
        assert!((s_q - expect).abs() < 1e-12, "CC swap quality {s_q}");
        assert_eq!(abstracted.get(ParamName::MemoryT1).unwrap(), 36000.0);
        assert_eq!(abstracted.get(ParamName::MemoryT2).unwrap(), 1.0);
    }

    #[test]
    fn perfect_gates_give_unit_swap_quality() {
        let mut p = baseline("ti-baseline").unwrap();
        for name in [
            ParamName::TwoQubitGateFidelity,
            ParamName::ZRotationFidelity,
            ParamName::ReadoutFidelity0,
            ParamName::ReadoutFidelity1,
        ] {
            p.set(name, 1.0).unwrap();
        }
        let abstracted = map_to_abstract(&p).unwrap();
        assert!((abstracted.get(ParamName::SwapQuality).unwrap() - 1.0).abs() < 1e-12);
    }
}
