//! p-spin optimization machinery: Gaussian coupling tensors, a generic AMP
//! iteration engine with truncation and sign rounding, TAP and gradient
//! descent schedules, exhaustive ground-state oracles and desk-scale
//! landscape experiments (overlap gaps, stability, chaos, concentration).
//!
//! Numeric kernels are generic over the scalar type through [`Scalar`];
//! the aliases below fix the f64 instantiation that the CLI and the
//! experiment runners use.

pub mod amp;
pub mod error;
pub mod experiments;
pub mod oracle;
pub mod report;
pub mod rng;
pub mod scalar;
pub mod schedules;
pub mod tensor;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Dense coupling tensor over f64, the default instantiation.
pub type CouplingTensor64 = tensor::CouplingTensor<f64>;
/// Dense coupling tensor over f32.
pub type CouplingTensor32 = tensor::CouplingTensor<f32>;
/// AMP schedule over f64.
pub type AmpSchedule64 = amp::AmpSchedule<f64>;
/// Iteration trace over f64.
pub type IterationTrace64 = amp::IterationTrace<f64>;
/// Ground-state result over f64.
pub type GroundStateResult64 = oracle::GroundStateResult<f64>;
/// Near-optimal configuration set over f64.
pub type NearOptimalSet64 = oracle::NearOptimalSet<f64>;
