use num_complex::Complex;

use super::AmplitudeSet;
use crate::error::{Error, Result};
use crate::special::{bessel_j0, j0_unchecked, J0_MAX_ARG};
use crate::scalar::Real;

/// Π_j J0(a_j ξ), the characteristic function centred at zero.
pub fn char_fn_centered<T: Real>(amps: &AmplitudeSet<T>, xi: T) -> Result<T> {
    let mut prod = T::one();
    for &a in &amps.amplitudes {
        prod = prod * bessel_j0(a * xi)?;
    }
    Ok(prod)
}

/// e^{-iξb} Π_j J0(a_j ξ).
pub fn char_fn<T: Real>(amps: &AmplitudeSet<T>, xi: T) -> Result<Complex<T>> {
    let prod = char_fn_centered(amps, xi)?;
    let angle = -xi * amps.center;
    Ok(Complex::new(angle.cos(), angle.sin()) * prod)
}

/// Product over the strictly positive amplitudes, without range checks;
/// callers keep every `a_j ξ` within [`J0_MAX_ARG`].
pub(crate) fn bessel_product<T: Real>(amplitudes: &[T], xi: T) -> T {
    amplitudes.iter().fold(T::one(), |acc, &a| acc * j0_unchecked(a * xi))
}

pub(crate) fn check_range<T: Real>(amplitudes: &[T], xi_max: T) -> Result<()> {
    let a_max = amplitudes.iter().fold(T::zero(), |m, &a| m.max(a));
    if (a_max * xi_max).to_f64_lossy() > J0_MAX_ARG {
        return Err(Error::NumericGuard(format!(
            "frequency cutoff {xi_max} exceeds the J0 range for amplitude {a_max}"
        )));
    }
    Ok(())
}
