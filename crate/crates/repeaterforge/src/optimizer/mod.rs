//! Hardware-cost machinery, the scalarized cost function, a genetic
//! algorithm with VAR termination and the absolute-minimal-requirements
//! sweep.

mod cost;
mod evaluate;
mod ga;
mod improve;
mod sweep;

pub use cost::{hardware_cost, total_cost, CostWeights};
pub use evaluate::{
    evaluate_candidate, improved_params, storage_coherence_time, CandidateSolution, Evaluation,
    Scenario, SchemeKind, Tunables,
};
pub use ga::{genetic_optimize, GaConfig, GaResult, GenerationRecord};
pub use improve::{from_no_imperfection, improvable_params, improve_parameter, no_imperfection};
pub use sweep::{absolute_minimal_sweep, SweepConfig, SweepResult};

use thiserror::Error;

use crate::engine::EngineError;
use crate::hardware::{HardwareError, ParamName};

#[derive(Debug, Error)]
pub enum OptimizerError {
    #[error("parameter {name:?} has no no-imperfection transform")]
    NotImprovable { name: ParamName },
    #[error("parameter {name:?} value {value} outside the transform domain")]
    OutOfDomain { name: ParamName, value: f64 },
    #[error("improvement factor {k} must be at least 1")]
    BadFactor { k: f64 },
    #[error("invalid optimizer configuration: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Hardware(#[from] HardwareError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}
