//! Named hardware parameter sets mirroring the platform baseline tables.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::HardwareError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlatformKind {
    ColorCenter,
    TrappedIon,
    Abstract,
}

/// One named row of a platform parameter table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, Hash)]
#[serde(rename_all = "snake_case")]
pub enum ParamName {
    Visibility,
    DoubleExcitationProb,
    /// N_{1/e}: entanglement attempts until induced memory dephasing.
    InducedDephasingAttempts,
    DarkCountProb,
    /// Interferometric phase standard deviation (rad).
    SigmaPhase,
    DetectionProbZeroDistance,
    EmissionFidelity,
    EmissionDuration,
    ReadoutFidelity0,
    ReadoutFidelity1,
    ReadoutDuration,
    CarbonInitFidelity,
    CarbonInitDuration,
    CarbonZFidelity,
    CarbonZDuration,
    /// Electron-carbon controlled X-rotation (CC) or Mølmer-Sørensen (TI).
    TwoQubitGateFidelity,
    TwoQubitGateDuration,
    ElectronInitFidelity,
    ElectronInitDuration,
    ElectronRotFidelity,
    ElectronRotDuration,
    ElectronT1,
    ElectronT2,
    CarbonT1,
    CarbonT2,
    /// Trapped-ion state preparation including amortized cooling.
    InitFidelity,
    InitDuration,
    ZRotationFidelity,
    ZRotationDuration,
    /// Trapped-ion collective dephasing coherence time.
    CoherenceTime,
    WavefunctionHalfLife,
    EmissionHalfLife,
    DetectionWindow,
    /// Abstract-model entanglement-swap quality.
    SwapQuality,
    SwapDuration,
    MemoryT1,
    MemoryT2,
    /// Per-attempt initialization charge of the abstract model.
    AttemptInitDuration,
}

impl ParamName {
    /// Domain class used for validation and improvement transforms.
    pub fn class(self) -> ParamClass {
        use ParamName::*;
        match self {
            Visibility | SwapQuality => ParamClass::Probability,
            DoubleExcitationProb | DarkCountProb => ParamClass::ErrorProbability,
            DetectionProbZeroDistance => ParamClass::Probability,
            ReadoutFidelity0 | ReadoutFidelity1 => ParamClass::Probability,
            EmissionFidelity => ParamClass::DepolarizingFidelity,
            CarbonInitFidelity | CarbonZFidelity | TwoQubitGateFidelity
            | ElectronInitFidelity | ElectronRotFidelity | InitFidelity
            | ZRotationFidelity => ParamClass::DepolarizingFidelity,
            InducedDephasingAttempts => ParamClass::PositiveCount,
            SigmaPhase => ParamClass::NonNegative,
            ElectronT1 | ElectronT2 | CarbonT1 | CarbonT2 | CoherenceTime | MemoryT1
            | MemoryT2 => ParamClass::CharacteristicTime,
            EmissionDuration | ReadoutDuration | CarbonInitDuration | CarbonZDuration
            | TwoQubitGateDuration | ElectronInitDuration | ElectronRotDuration
            | InitDuration | ZRotationDuration | WavefunctionHalfLife | EmissionHalfLife
            | DetectionWindow | SwapDuration | AttemptInitDuration => ParamClass::Duration,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamClass {
    Probability,
    ErrorProbability,
    /// Depolarizing-channel fidelity, constrained to [0.25, 1].
    DepolarizingFidelity,
    CharacteristicTime,
    Duration,
    PositiveCount,
    NonNegative,
}

/// A platform tag plus the named parameter map for that platform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardwareParams {
    pub platform: PlatformKind,
    pub values: BTreeMap<ParamName, f64>,
}

impl HardwareParams {
    pub fn new(
        platform: PlatformKind,
        values: BTreeMap<ParamName, f64>,
    ) -> Result<Self, HardwareError> {
        let params = Self { platform, values };
        params.validate()?;
        Ok(params)
    }

    pub fn get(&self, name: ParamName) -> Result<f64, HardwareError> {
        self.values
            .get(&name)
            .copied()
            .ok_or(HardwareError::MissingParameter { name })
    }

    pub fn set(&mut self, name: ParamName, value: f64) -> Result<(), HardwareError> {
        check_value(name, value)?;
        self.values.insert(name, value);
        Ok(())
    }

    pub fn validate(&self) -> Result<(), HardwareError> {
        for (&name, &value) in &self.values {
            check_value(name, value)?;
        }
        for name in required_params(self.platform) {
            if !self.values.contains_key(name) {
                return Err(HardwareError::MissingParameter { name: *name });
            }
        }
        Ok(())
    }

    /// Mean readout bit-flip probability, (q0 + q1) / 2.
    pub fn mean_readout_flip(&self) -> Result<f64, HardwareError> {
        let q0 = 1.0 - self.get(ParamName::ReadoutFidelity0)?;
        let q1 = 1.0 - self.get(ParamName::ReadoutFidelity1)?;
        Ok(0.5 * (q0 + q1))
    }

    /// Copy of this parameter set with every noise source switched off:
    /// fidelities and probabilities-of-success at 1, error probabilities at
    /// 0, characteristic times at infinity. Durations are untouched. Photon
    /// loss in fiber is a property of the topology and remains.
    pub fn perfected(&self) -> HardwareParams {
        let mut out = self.clone();
        for (&name, value) in out.values.iter_mut() {
            match name.class() {
                ParamClass::Probability | ParamClass::DepolarizingFidelity => *value = 1.0,
                ParamClass::ErrorProbability => *value = 0.0,
                ParamClass::CharacteristicTime | ParamClass::PositiveCount => {
                    *value = f64::INFINITY
                }
                ParamClass::NonNegative => *value = 0.0,
                ParamClass::Duration => {}
            }
        }
        out
    }
}

fn check_value(name: ParamName, value: f64) -> Result<(), HardwareError> {
    let ok = match name.class() {
        ParamClass::Probability | ParamClass::ErrorProbability => (0.0..=1.0).contains(&value),
        ParamClass::DepolarizingFidelity => (0.25..=1.0).contains(&value),
        ParamClass::CharacteristicTime => value > 0.0, // +inf allowed (no relaxation)
        ParamClass::Duration => value >= 0.0 && value.is_finite(),
        ParamClass::PositiveCount => value > 0.0, // +inf allowed (no dephasing)
        ParamClass::NonNegative => value >= 0.0 && value.is_finite(),
    };
    if ok {
        Ok(())
    } else {
        Err(HardwareError::InvalidParameter { name, value })
    }
}

pub(crate) fn required_params(platform: PlatformKind) -> &'static [ParamName] {
    use ParamName::*;
    match platform {
        PlatformKind::ColorCenter => &[
            Visibility,
            DoubleExcitationProb,
            InducedDephasingAttempts,
            DarkCountProb,
            SigmaPhase,
            DetectionProbZeroDistance,
            EmissionFidelity,
            EmissionDuration,
            ReadoutFidelity0,
            ReadoutFidelity1,
            ReadoutDuration,
            CarbonInitFidelity,
            CarbonInitDuration,
            CarbonZFidelity,
            CarbonZDuration,
            TwoQubitGateFidelity,
            TwoQubitGateDuration,
            ElectronInitFidelity,
            ElectronInitDuration,
            ElectronRotFidelity,
            ElectronRotDuration,
            ElectronT1,
            ElectronT2,
            CarbonT1,
            CarbonT2,
        ],
        PlatformKind::TrappedIon => &[
            Visibility,
            DarkCountProb,
            DetectionProbZeroDistance,
            EmissionFidelity,
            EmissionDuration,
            ReadoutFidelity0,
            ReadoutFidelity1,
            ReadoutDuration,
            InitFidelity,
            InitDuration,
            ZRotationFidelity,
            ZRotationDuration,
            TwoQubitGateFidelity,
            TwoQubitGateDuration,
            CoherenceTime,
            WavefunctionHalfLife,
            EmissionHalfLife,
            DetectionWindow,
        ],
        PlatformKind::Abstract => &[
            Visibility,
            DarkCountProb,
            DetectionProbZeroDistance,
            EmissionFidelity,
            EmissionDuration,
            SwapQuality,
            SwapDuration,
            MemoryT1,
            MemoryT2,
            AttemptInitDuration,
        ],
    }
}
