use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::bias::SignalModel;
use crate::catalog::SpectrumCatalog;
use crate::error::{Error, Result};
use crate::kernels::{HolonomyTestFunction, KernelScale, SmoothingKernel};
use crate::scalar::Real;

/// Named functional h applied to the signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Functional {
    Identity,
    Square,
    /// 1 if x > c, else 0.
    IndicatorGreater(f64),
    /// exp(clamp(x, −c, c)).
    ClippedExp(f64),
    /// The constant 1.
    One,
}

impl Functional {
    #[inline]
    pub fn apply<T: Real>(&self, x: T) -> T {
        match *self {
            Functional::Identity => x,
            Functional::Square => x * x,
            Functional::IndicatorGreater(c) => {
                if x > T::lit(c) {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Functional::ClippedExp(c) => x.max(-T::lit(c)).min(T::lit(c)).exp(),
            Functional::One => T::one(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Functional::Identity => "identity".into(),
            Functional::Square => "square".into(),
            Functional::IndicatorGreater(c) => format!("indicator>{c}"),
            Functional::ClippedExp(c) => format!("clipped-exp:{c}"),
            Functional::One => "one".into(),
        }
    }
}

impl std::str::FromStr for Functional {
    type Err = Error;

    /// `identity`, `square`, `one`, `indicator>c`, `clipped-exp:c`.
    fn from_str(s: &str) -> Result<Self> {
        let number = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad functional parameter in `{s}`")))
        };
        match s.trim() {
            "identity" => Ok(Functional::Identity),
            "square" => Ok(Functional::Square),
            "one" => Ok(Functional::One),
            other => {
                if let Some(c) = other.strip_prefix("indicator>") {
                    Ok(Functional::IndicatorGreater(number(c)?))
                } else if let Some(c) = other.strip_prefix("clipped-exp:") {
                    let c = number(c)?;
                    if !(c > 0.0) {
                        return Err(Error::Config("clipped-exp needs c > 0".into()));
                    }
                    Ok(Functional::ClippedExp(c))
                } else {
                    Err(Error::Config(format!("unknown functional `{other}`")))
                }
            }
        }
    }
}

impl Serialize for Functional {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.name())
    }
}

const SIMPSON_CHUNK: usize = 4096;

/// (1/(Y − η₀)) ∫_{η₀}^{Y} h(E^(T)(y)) dy by composite Simpson.
pub fn time_average<T: Real>(
    catalog: &SpectrumCatalog,
    f: &HolonomyTestFunction<T>,
    kernel: &SmoothingKernel<T>,
    scale: &KernelScale<T>,
    cutoff: T,
    h: Functional,
    horizon: T,
    grid_step: T,
) -> Result<T> {
    let model = SignalModel::new(catalog, f, kernel, scale, cutoff)?;
    time_average_model(&model, h, horizon, grid_step)
}

/// As [`time_average`] for a precomputed signal. The step actually used is
/// `(Y − η₀)/N` with `N` the smallest even count such that it does not exceed
/// `grid_step`; the weights are normalized by their sum so that `h ≡ 1`
/// averages to exactly 1.
pub fn time_average_model<T: Real>(
    model: &SignalModel<T>,
    h: Functional,
    horizon: T,
    grid_step: T,
) -> Result<T> {
    let start = model.eta0;
    if !(horizon > start) {
        return Err(Error::Config(format!(
            "time average needs Y > eta0 (Y = {horizon}, eta0 = {start})"
        )));
    }
    if !(grid_step > T::zero()) {
        return Err(Error::Config(format!("grid step must be positive, got {grid_step}")));
    }
    let s_max = model.max_frequency();
    if s_max > T::zero() {
        let limit = T::PI() / (T::lit(4.0) * s_max);
        if grid_step > limit {
            return Err(Error::NumericGuard(format!(
                "grid step {grid_step} does not resolve frequency {s_max}; need step <= {limit}"
            )));
        }
    }
    let span = horizon - start;
    let mut n = (span / grid_step).ceil().to_usize().ok_or_else(|| {
        Error::NumericGuard(format!("grid of step {grid_step} over {span} is too large"))
    })?;
    n = n.max(2);
    if n % 2 == 1 {
        n += 1;
    }
    let step = span / T::from_usize(n).unwrap();

    let weight = |i: usize| {
        if i == 0 || i == n {
            T::one()
        } else if i % 2 == 1 {
            T::lit(4.0)
        } else {
            T::lit(2.0)
        }
    };
    let chunk_ids: Vec<usize> = (0..=n / SIMPSON_CHUNK).collect();
    let partial: Vec<(T, T)> = chunk_ids
        .into_par_iter()
        .map(|c| {
            let lo = c * SIMPSON_CHUNK;
            let hi = ((c + 1) * SIMPSON_CHUNK).min(n + 1);
            let mut acc = T::zero();
            let mut wsum = T::zero();
            for i in lo..hi {
                let y = if i == n {
                    horizon
                } else {
                    start + step * T::from_usize(i).unwrap()
                };
                let w = weight(i);
                acc = acc + w * h.apply(model.eval_unchecked(y));
                wsum = wsum + w;
            }
            (acc, wsum)
        })
        .collect();
    let (acc, wsum) = partial
        .into_iter()
        .fold((T::zero(), T::zero()), |(a, w), (pa, pw)| (a + pa, w + pw));
    Ok(acc / wsum)
}
