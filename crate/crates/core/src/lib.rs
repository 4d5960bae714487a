pub mod bias;
pub mod catalog;
pub mod cli;
pub mod dihedral;
pub mod distribution;
pub mod error;
pub mod kernels;
pub mod quadrature;
pub mod rng;
pub mod scalar;
pub mod special;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision instantiations.
pub type TestFunction = kernels::HolonomyTestFunction<f64>;
pub type Kernel = kernels::SmoothingKernel<f64>;
pub type Scale = kernels::KernelScale<f64>;
pub type Signal = bias::SignalModel<f64>;
pub type Amplitudes = distribution::AmplitudeSet<f64>;
pub type Distribution = distribution::BiasDistribution<f64>;
