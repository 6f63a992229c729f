#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod forced;
pub mod linalg;
pub mod propagator;
pub mod scalar;
pub mod spectral;
pub mod stats;
pub mod system;

pub use error::{Error, Result};
pub use scalar::Real;

pub type C64 = num_complex::Complex64;
pub type Matrix = linalg::ComplexMatrix<f64>;
pub type System = system::PeriodicSystem<f64>;
pub type Forcing = system::ForcingSpec<f64>;
pub type Settings = propagator::IntegratorSettings<f64>;
pub type Propagator = propagator::Propagation<f64>;
pub type Split = spectral::SpectralSplit<f64>;
pub type Trace = forced::ForcedTrace<f64>;
pub type Verdict = forced::BoundednessVerdict<f64>;
pub type Sweep = forced::SweepResult<f64>;
