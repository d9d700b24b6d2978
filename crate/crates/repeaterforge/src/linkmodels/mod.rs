//! Analytical models for heralded elementary-link generation: success
//! probability, post-measurement two-qubit state for the single-click and
//! double-click schemes, the brute-force POVM oracle, and the geometric
//! attempt sampler.

mod double_click;
mod povm;
mod sampling;
mod single_click;

pub use double_click::{double_click_outcome, CoincidenceProbs, DoubleClickParams};
pub use povm::double_click_oracle;
pub use sampling::{sample_link, GeometricDelay};
pub use single_click::{single_click_outcome, SingleClickParams};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qstate::{BellIndex, DensityMatrix, QStateError};
use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum LinkModelError {
    #[error("invalid link parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("success probability is zero; link generation would never terminate")]
    ZeroSuccessProbability,
    #[error(transparent)]
    State(#[from] QStateError),
}

/// Photon-number-resolving vs non-resolving detectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DetectorMode {
    /// Number-resolving: multi-photon events at one detector herald failure.
    NR,
    /// Non-number-resolving: one or more photons give a single click.
    NNR,
}

/// Success probability and the post-measurement states of the two heralded
/// branches (`plus` = both clicks behind the same polarizing beam splitter /
/// first detector for single click).
#[derive(Clone, Debug)]
pub struct LinkOutcome<T> {
    pub success_prob: T,
    pub state_plus: DensityMatrix<T>,
    pub state_minus: DensityMatrix<T>,
}

impl<T: Real> LinkOutcome<T> {
    /// Bell correction frame for a heralded branch: the coherent part of both
    /// schemes lives on the Ψ± pair, i.e. frames X¹Z⁰ and X¹Z¹.
    pub fn frame(plus_branch: bool) -> BellIndex {
        if plus_branch {
            BellIndex::new(1, 0)
        } else {
            BellIndex::new(1, 1)
        }
    }

    pub fn state(&self, plus_branch: bool) -> &DensityMatrix<T> {
        if plus_branch {
            &self.state_plus
        } else {
            &self.state_minus
        }
    }
}

/// A heralded link: attempt count, elapsed delay, post-measurement state and
/// the Pauli frame of the heralded branch.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LinkSample {
    pub n_attempts: u64,
    pub delay: f64,
    pub state: DensityMatrix<f64>,
    pub bell_index: BellIndex,
}

pub(crate) fn check_prob<T: Real>(name: &'static str, v: T) -> Result<(), LinkModelError> {
    if v >= T::zero() && v <= T::one() {
        Ok(())
    } else {
        Err(LinkModelError::InvalidParameter {
            name,
            value: v.to_f64_lossy(),
        })
    }
}
