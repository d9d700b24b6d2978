//! Discrete-event simulation kernel and the sequential SWAP-ASAP protocol
//! stack for one-repeater (or repeaterless) chains.

pub mod event;
mod metrics;
mod protocol;
mod topology;

pub use event::{Event, EventQueue, Payload};
pub use metrics::{compute_metrics, Metrics};
pub use protocol::{
    agreement_handshake, run_simulation, sample_swap, DeliveryRecord, EntanglementScheme,
    ProtocolConfig, SimulationOutput, TI_REFERENCE_COINCIDENCE_WINDOW,
};
pub use topology::{
    LinkSpec, NetworkTopology, Segment, DEFAULT_REFRACTIVE_INDEX, SPEED_OF_LIGHT_M_PER_S,
};

use thiserror::Error;

use crate::hardware::HardwareError;
use crate::linkmodels::LinkModelError;
use crate::qstate::QStateError;
use crate::timewindows::TimeWindowError;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid topology: {0}")]
    BadTopology(String),
    #[error("invalid protocol configuration: {0}")]
    BadConfig(String),
    #[error("round budget exceeded after {rounds} rounds ({delivered} pairs delivered)")]
    MaxRoundsExceeded { rounds: u64, delivered: usize },
    #[error("simulation stalled with {delivered} pairs delivered")]
    Stalled { delivered: usize },
    #[error("need at least 2 delivery records, found {found}")]
    NotEnoughRecords { found: usize },
    #[error(transparent)]
    Hardware(#[from] HardwareError),
    #[error(transparent)]
    Link(#[from] LinkModelError),
    #[error(transparent)]
    State(#[from] QStateError),
    #[error(transparent)]
    TimeWindow(#[from] TimeWindowError),
}
