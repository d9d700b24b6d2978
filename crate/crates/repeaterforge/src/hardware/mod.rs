//! Platform models: parameter tables, gate circuits with per-op depolarizing
//! noise, idle decoherence, induced dephasing, photon emission and the
//! platform-to-abstract parameter mapping.

mod abstract_map;
mod baselines;
mod circuits;
pub mod params;
mod register;

pub use abstract_map::map_to_abstract;
pub use baselines::baseline;
pub use circuits::{move_to_memory, swap_circuit, OutcomeBits, SwapCircuit};
pub use params::{HardwareParams, ParamName, PlatformKind};
pub use register::{
    apply_induced_dephasing, decohere_idle, decohere_link_qubit, decoherence_channels,
    emit_entangled_photon_state, emitted_pair_state, QubitRegister, QubitRole,
};

use thiserror::Error;

use crate::qstate::QStateError;

#[derive(Debug, Error)]
pub enum HardwareError {
    #[error("missing hardware parameter {name:?}")]
    MissingParameter { name: ParamName },
    #[error("invalid hardware parameter {name:?} = {value}")]
    InvalidParameter { name: ParamName, value: f64 },
    #[error("unknown baseline {0:?}; available: cc-baseline, ti-baseline")]
    UnknownBaseline(String),
    #[error("baseline data malformed: {0}")]
    MalformedBaseline(String),
    #[error("operation not available on platform {platform:?}")]
    WrongPlatform { platform: PlatformKind },
    #[error("qubit {index} is busy")]
    QubitBusy { index: usize },
    #[error("qubit {index} is empty")]
    QubitEmpty { index: usize },
    #[error(transparent)]
    State(#[from] QStateError),
}
