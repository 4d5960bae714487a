//! Bessel function of the first kind, order zero.
//!
//! Three regimes:
//! * `|x| < 2`: Maclaurin series (no cancellation problem in this range);
//! * `2 <= |x| <= 25`: Miller backward recurrence normalised by
//!   `J0 + 2 * sum J_{2k} = 1`;
//! * `|x| > 25`: Hankel asymptotic expansion, summed until the terms stop
//!   decreasing. The phase uses `cos x ± sin x` so that no rounding of
//!   `x - pi/4` enters for large arguments.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest accepted |x|.
pub const J0_MAX_ARG: f64 = 1e8;

const SERIES_LIMIT: f64 = 2.0;
const ASYMPTOTIC_FROM: f64 = 25.0;

pub fn bessel_j0<T: Real>(x: T) -> Result<T> {
    let ax = x.abs();
    if !(ax.to_f64_lossy() <= J0_MAX_ARG) {
        return Err(Error::Precondition(format!(
            "bessel_j0 argument {x} outside |x| <= {J0_MAX_ARG:e}"
        )));
    }
    Ok(j0_unchecked(ax))
}

/// J0 without the range guard; callers must keep `|x| <= J0_MAX_ARG`.
pub(crate) fn j0_unchecked<T: Real>(x: T) -> T {
    let ax = x.abs();
    if ax < T::lit(SERIES_LIMIT) {
        series(ax)
    } else if ax <= T::lit(ASYMPTOTIC_FROM) {
        miller(ax)
    } else {
        hankel(ax)
    }
}

fn series<T: Real>(x: T) -> T {
    let q = -(x * x) / T::lit(4.0);
    let mut term = T::one();
    let mut sum = T::one();
    for k in 1..60 {
        let kf = T::from_u32(k).unwrap();
        term = term * q / (kf * kf);
        sum = sum + term;
        if term.abs() <= T::epsilon() * T::lit(1e-3) {
            break;
        }
    }
    sum
}

fn miller<T: Real>(x: T) -> T {
    let xf = x.to_f64_lossy();
    let mut start = (1.3 * xf + 40.0) as usize;
    if start % 2 == 1 {
        start += 1;
    }
    let two = T::lit(2.0);
    let big = T::lit(1e10);
    let mut next = T::zero(); // J_{k+1}
    let mut cur = T::lit(1e-30); // J_k
    let mut norm = T::zero(); // 2 * sum of even orders >= 2
    let mut j0 = T::zero();
    for k in (1..=start).rev() {
        let prev = two * T::from_usize(k).unwrap() / x * cur - next;
        next = cur;
        cur = prev;
        // cur now holds J_{k-1}
        let order = k - 1;
        if cur.abs() > big {
            let s = T::one() / big;
            cur = cur * s;
            next = next * s;
            norm = norm * s;
        }
        if order == 0 {
            j0 = cur;
        } else if order % 2 == 0 {
            norm = norm + two * cur;
        }
    }
    j0 / (j0 + norm)
}

fn hankel<T: Real>(x: T) -> T {
    let eight_x = T::lit(8.0) * x;
    // t_k = prod_{j<=k} (2j-1)^2 / (k! (8x)^k)
    let mut t = T::one();
    let mut p = T::one();
    let mut q = T::zero();
    let mut last = T::infinity();
    for k in 1..200u32 {
        let odd = T::from_u32(2 * k - 1).unwrap();
        t = t * odd * odd / (T::from_u32(k).unwrap() * eight_x);
        if t >= last {
            break;
        }
        last = t;
        // signs: P = 1 - t2 + t4 - ..., Q = -t1 + t3 - ...
        match k % 4 {
            0 => p = p + t,
            1 => q = q - t,
            2 => p = p - t,
            _ => q = q + t,
        }
        if t < T::epsilon() * T::lit(1e-3) {
            break;
        }
    }
    let (s, c) = x.sin_cos();
    let root_half = T::FRAC_1_SQRT_2();
    let cos_chi = (c + s) * root_half;
    let sin_chi = (s - c) * root_half;
    (T::lit(2.0) / (T::PI() * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j0_at_zero_is_one() {
        assert_eq!(bessel_j0(0.0f64).unwrap(), 1.0);
    }

    #[test]
    fn j0_is_even() {
        for &x in &[0.3, 1.7, 5.5, 19.0, 33.3, 1e5] {
            assert_eq!(bessel_j0(x).unwrap(), bessel_j0(-x).unwrap());
        }
    }

    #[test]
    fn j0_regimes_agree_at_boundaries() {
        // symmetric difference quotient cancels the slope, leaving the jump
        let eps = 1e-6;
        for &b in &[SERIES_LIMIT, ASYMPTOTIC_FROM] {
            let below = bessel_j0(b - eps).unwrap();
            let above = bessel_j0(b + eps).unwrap();
            let at = bessel_j0(b).unwrap();
            let jump = (below + above) / 2.0 - at;
            assert!(jump.abs() < 2e-12, "jump at {b}: {jump:e}");
        }
    }

    #[test]
    fn j0_range_guard() {
        assert!(bessel_j0(2e8f64).is_err());
        assert!(bessel_j0(f64::NAN).is_err());
        assert!(bessel_j0(1e8f64).is_ok());
    }

    #[test]
    fn j0_f32_close_to_f64() {
        for &x in &[0.5f32, 3.0, 12.0, 40.0] {
            let a = bessel_j0(x).unwrap() as f64;
            let b = bessel_j0(x as f64).unwrap();
            assert!((a - b).abs() < 1e-5);
        }
    }
}
