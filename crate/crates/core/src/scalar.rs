//! Scalar abstraction shared by the numeric modules.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar used by quadrature, special functions, kernels and
/// the distribution code. Implemented for `f32` and `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Sum + Send + Sync + 'static
{
    /// Default absolute tolerance for adaptive quadrature at this precision.
    fn quad_tol() -> Self;

    /// Converts an `f64` literal; every literal used in this crate is
    /// representable (possibly rounded) in `f32`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn quad_tol() -> Self {
        1e-12
    }
}

impl Real for f32 {
    fn quad_tol() -> Self {
        1e-5
    }
}
