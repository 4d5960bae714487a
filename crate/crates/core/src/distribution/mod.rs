//! Limit law of the bias signal: amplitudes, the Bessel-product
//! characteristic function, Fourier inversion, torus sampling, time averages
//! and distribution distances.

mod amplitudes;
mod charfn;
mod inversion;
mod sampling;
mod stats;
mod timeavg;

pub use amplitudes::{AmplitudeSet, CoordinateMode};
pub use charfn::{char_fn, char_fn_centered};
pub use inversion::{
    arcsine_cdf, arcsine_reference, default_grid, density_inversion, interpolate, uniform_grid,
    BiasDistribution, Method, DEFAULT_TAIL_EPSILON,
};
pub use sampling::{
    evaluate_point, sample_distribution, satisfies_relation, FunctionalEstimate, SampleResult,
    SamplingOptions, TorusSampler, DEFAULT_BINS,
};
pub use stats::{ks_one_sample, ks_two_sample, l1_distance};
pub use timeavg::{time_average, time_average_model, Functional};
