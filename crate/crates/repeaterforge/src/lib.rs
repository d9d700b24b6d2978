//! Discrete-event simulation of processing-node quantum-repeater chains on
//! asymmetric fiber paths, with analytical elementary-link models and a
//! genetic-algorithm search for minimal hardware improvements that meet
//! rate/fidelity targets derived from verified blind quantum computation.

// Guards written as `!(x > 0)` are deliberate: they reject NaN, which the
// inverted comparison would silently accept.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod engine;
pub mod hardware;
pub mod linkmodels;
pub mod optimizer;
pub mod qstate;
pub mod report;
pub mod targetmetric;
pub mod timewindows;
pub mod validate;
pub mod scalar;

pub use scalar::Real;

/// Concrete density matrix used by the simulation stack.
pub type DensityMatrix64 = qstate::DensityMatrix<f64>;
/// Concrete complex matrix used by the simulation stack.
pub type CMatrix64 = qstate::CMatrix<f64>;
