//! Bias constant b_{f,η}, the truncated signal E^(T)[f, g_{y,η}], geometric
//! sums over geodesic tables and the spectral main terms of the smoothed
//! trace formula.

use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::catalog::{SpectralLine, SpectrumCatalog};
use crate::error::{Error, Result};
use crate::kernels::{
    c_s_eta, window_eval, HolonomyTestFunction, KernelScale, SmoothingKernel, WindowKind,
};
use crate::scalar::Real;

/// Relative tolerance for `length = k * primitive_length`.
pub const PRIMITIVE_RATIO_TOL: f64 = 1e-9;

/// Closed geodesic: length, holonomy in `[0, 2π)` and the length of the
/// primitive geodesic it iterates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicRecord {
    pub length: f64,
    pub holonomy: f64,
    pub primitive_length: f64,
}

impl GeodesicRecord {
    pub fn new(length: f64, holonomy: f64, primitive_length: f64) -> Result<Self> {
        let r = Self {
            length,
            holonomy,
            primitive_length,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn primitive(length: f64, holonomy: f64) -> Result<Self> {
        Self::new(length, holonomy, length)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0) || !(self.primitive_length > 0.0) {
            return Err(Error::Constraint(format!(
                "geodesic lengths must be positive (length {}, primitive {})",
                self.length, self.primitive_length
            )));
        }
        if !self.holonomy.is_finite() {
            return Err(Error::Constraint("geodesic holonomy must be finite".into()));
        }
        let ratio = self.length / self.primitive_length;
        let k = ratio.round();
        if k < 1.0 || (ratio - k).abs() > PRIMITIVE_RATIO_TOL * ratio {
            return Err(Error::Constraint(format!(
                "length {} is not a multiple of primitive length {}",
                self.length, self.primitive_length
            )));
        }
        Ok(())
    }

    /// `k` with `length = k * primitive_length`.
    pub fn iterate(&self) -> u64 {
        (self.length / self.primitive_length).round() as u64
    }

    pub fn is_primitive(&self) -> bool {
        self.iterate() == 1
    }
}

/// Parses a CSV geodesic table with header `length,holonomy,primitive_length`.
pub fn parse_geodesics(text: &str) -> Result<Vec<GeodesicRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if headers != ["length", "holonomy", "primitive_length"] {
        return Err(Error::Parse(format!(
            "geodesic CSV header must be `length,holonomy,primitive_length`, found `{}`",
            headers.join(",")
        )));
    }
    let mut out = Vec::new();
    for row in reader.deserialize::<GeodesicRecord>() {
        let row = row?;
        row.validate()?;
        out.push(row);
    }
    Ok(out)
}

pub fn load_geodesics(path: &Path) -> Result<Vec<GeodesicRecord>> {
    parse_geodesics(&std::fs::read_to_string(path)?)
}

/// b_{f,η} split into the zero-parameter part and the trivial-representation
/// part: `value = zero_line_contribution - trivial_contribution`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BiasConstant<T> {
    pub value: T,
    pub zero_line_contribution: T,
    pub trivial_contribution: T,
    pub c0: T,
}

/// c_{0,η}, which is real.
pub fn c0<T: Real>(kernel: &SmoothingKernel<T>, scale: &KernelScale<T>) -> Result<T> {
    Ok(c_s_eta(kernel, scale, T::zero())?.value.re)
}

/// b_{f,η} = (Σ_{p≥1} m(π_{0,p}) Re f̂(p) − 2 Re f̂(1)) · 2c_{0,η}, with one
/// representative per zero-parameter class.
pub fn bias_constant<T: Real>(
    catalog: &SpectrumCatalog,
    f: &HolonomyTestFunction<T>,
    kernel: &SmoothingKernel<T>,
    scale: &KernelScale<T>,
) -> Result<BiasConstant<T>> {
    f.require_bias_mode()?;
    let c0 = c0(kernel, scale)?;
    Ok(bias_constant_with_c0(catalog, f, c0))
}

fn bias_constant_with_c0<T: Real>(
    catalog: &SpectrumCatalog,
    f: &HolonomyTestFunction<T>,
    c0: T,
) -> BiasConstant<T> {
    let two = T::lit(2.0);
    let zero_sum: T = catalog
        .zero_lines
        .iter()
        .filter(|z| z.p >= 1)
        .fold(T::zero(), |acc, z| acc + T::from_u64(z.mult).unwrap() * f.coeff(z.p).re);
    let zero_line_contribution = zero_sum * two * c0;
    let trivial_contribution = two * f.coeff(1).re * two * c0;
    BiasConstant {
        value: zero_line_contribution - trivial_contribution,
        zero_line_contribution,
        trivial_contribution,
        c0,
    }
}

/// One oscillating term `2·mult·Re(A e^{isy})` with `A = f̂(-p)c_{s,η}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalTerm<T> {
    pub s: T,
    pub p: i64,
    pub mult: u64,
    pub coefficient: Complex<T>,
}

impl<T: Real> SignalTerm<T> {
    #[inline]
    pub fn eval(&self, y: T) -> T {
        let (sin, cos) = (self.s * y).sin_cos();
        let re = self.coefficient.re * cos - self.coefficient.im * sin;
        T::lit(2.0) * T::from_u64(self.mult).unwrap() * re
    }

    /// `2·mult·|A|`.
    pub fn amplitude(&self) -> T {
        T::lit(2.0) * T::from_u64(self.mult).unwrap() * self.coefficient.norm()
    }

    /// `arg A`.
    pub fn phase(&self) -> T {
        self.coefficient.arg()
    }
}

/// E^(T) with all constants precomputed, for evaluation on y-grids.
#[derive(Debug, Clone)]
pub struct SignalModel<T> {
    pub terms: Vec<SignalTerm<T>>,
    pub bias: BiasConstant<T>,
    pub cutoff: T,
    pub eta0: T,
}

impl<T: Real> SignalModel<T> {
    pub fn new(
        catalog: &SpectrumCatalog,
        f: &HolonomyTestFunction<T>,
        kernel: &SmoothingKernel<T>,
        scale: &KernelScale<T>,
        cutoff: T,
    ) -> Result<Self> {
        let bias = bias_constant(catalog, f, kernel, scale)?;
        let terms = signal_terms(&catalog.lines, f, kernel, scale, cutoff)?;
        Ok(Self {
            terms,
            bias,
            cutoff,
            eta0: scale.eta0,
        })
    }

    pub fn center(&self) -> T {
        self.bias.value
    }

    /// Σ of the oscillating terms only.
    pub fn oscillation(&self, y: T) -> T {
        self.terms.iter().map(|t| t.eval(y)).sum()
    }

    /// E^(T)(y) without the `y >= η₀` check.
    pub fn eval_unchecked(&self, y: T) -> T {
        self.oscillation(y) + self.bias.value
    }

    pub fn eval(&self, y: T) -> Result<T> {
        if !(y >= self.eta0) {
            return Err(Error::Precondition(format!(
                "E^(T) is defined for y >= eta0 = {}, got y = {y}",
                self.eta0
            )));
        }
        Ok(self.eval_unchecked(y))
    }

    pub fn max_frequency(&self) -> T {
        self.terms.iter().map(|t| t.s.abs()).fold(T::zero(), T::max)
    }

    /// Σ 2·mult·|f̂(-p)c_{s,η}|.
    pub fn total_amplitude(&self) -> T {
        self.terms.iter().map(|t| t.amplitude()).sum()
    }
}

/// Terms for lines with `s ≠ 0`, `|s| < T`, `|p| < T`. Lines need not be
/// canonical: `(s, p)` and `(-s, -p)` give the same term for real f.
pub fn signal_terms<T: Real>(
    lines: &[SpectralLine],
    f: &HolonomyTestFunction<T>,
    kernel: &SmoothingKernel<T>,
    scale: &KernelScale<T>,
    cutoff: T,
) -> Result<Vec<SignalTerm<T>>> {
    let mut out = Vec::with_capacity(lines.len());
    for l in lines {
        let s = T::lit(l.s);
        let p = T::from_i64(l.p).unwrap();
        if l.s == 0.0 || !(s.abs() < cutoff) || !(p.abs() < cutoff) {
            continue;
        }
        let fc = f.coeff(-l.p);
        if fc.re == T::zero() && fc.im == T::zero() {
            out.push(SignalTerm {
                s,
                p: l.p,
                mult: l.mult,
                coefficient: fc,
            });
            continue;
        }
        let c = c_s_eta(kernel, scale, s)?.value;
        out.push(SignalTerm {
            s,
            p: l.p,
            mult: l.mult,
            coefficient: fc * c,
        });
    }
    Ok(out)
}

/// E^(T)[f, g_{y,η}] = 2 Σ mult·Re(f̂(-p)e^{isy}c_{s,η}) + b_{f,η}.
pub fn eval_et<T: Real>(
    catalog: &SpectrumCatalog,
    f: &HolonomyTestFunction<T>,
    kernel: &SmoothingKernel<T>,
    scale: &KernelScale<T>,
    cutoff: T,
    y: T,
) -> Result<T> {
    SignalModel::new(catalog, f, kernel, scale, cutoff)?.eval(y)
}

/// (e^u + e^{-u} − 2cos θ)^{-1}.
pub fn weyl_weight<T: Real>(u: T, theta: T) -> Result<T> {
    if !(u > T::zero()) {
        return Err(Error::Precondition(format!(
            "weyl_weight needs u > 0, got {u}"
        )));
    }
    let d = u.exp() + (-u).exp() - T::lit(2.0) * theta.cos();
    Ok(T::one() / d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    /// Σ ℓ(γ) g_{y,η}(ℓ(γ)) f(hol γ).
    Plain,
    /// Same sum as `Plain`.
    LengthTimesF,
    /// Σ ℓ(γ₀) w(γ) (e^ℓ + e^{-ℓ}) g_{y,η}(ℓ(γ)) f(hol γ).
    WeylTilde,
}

impl std::str::FromStr for Weighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Weighting::Plain),
            "length-times-f" => Ok(Weighting::LengthTimesF),
            "weyl-tilde" => Ok(Weighting::WeylTilde),
            other => Err(Error::Config(format!("unknown weighting `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometricSum<T> {
    pub value: T,
    /// e^{-y} · value.
    pub normalized: T,
    pub records_used: usize,
}

/// Geometric-side sum over a geodesic table.
#[allow(clippy::too_many_arguments)]
pub fn geometric_bias_sum<T: Real, F: Fn(T) -> T>(
    geodesics: &[GeodesicRecord],
    f: F,
    kernel: &SmoothingKernel<T>,
    scale: &KernelScale<T>,
    y: T,
    primitive_only: bool,
    weighting: Weighting,
) -> Result<GeometricSum<T>> {
    if !(y > scale.eta) {
        return Err(Error::Precondition(format!(
            "geometric sum needs y > eta (y = {y}, eta = {})",
            scale.eta
        )));
    }
    let mut value = T::zero();
    let mut used = 0;
    for g in geodesics {
        g.validate()?;
        if primitive_only && !g.is_primitive() {
            continue;
        }
        used += 1;
        let len = T::lit(g.length);
        if len.abs() >= y + scale.eta {
            continue;
        }
        let window = window_eval(WindowKind::G, kernel, scale, y, len)?;
        if window == T::zero() {
            continue;
        }
        let hol = T::lit(g.holonomy);
        let weight = match weighting {
            Weighting::Plain | Weighting::LengthTimesF => len,
            Weighting::WeylTilde => {
                T::lit(g.primitive_length) * weyl_weight(len, hol)? * (len.exp() + (-len).exp())
            }
        };
        value = value + weight * window * f(hol);
    }
    Ok(GeometricSum {
        value,
        normalized: (-y).exp() * value,
        records_used: used,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    /// f_even(θ) = (f(θ) + f(-θ))/2.
    Even,
    /// f_odd(θ) = (f(θ) - f(-θ))/2.
    Odd,
    /// f itself; the sum of the even and odd evaluations.
    Full,
}

impl std::str::FromStr for Parity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            "full" | "both" => Ok(Parity::Full),
            other => Err(Error::Config(format!("unknown parity `{other}`"))),
        }
    }
}

/// Label of the error class that the main terms leave out.
pub const TRACE_DROPPED_ERROR: &str = "O(1/eta^2 + 1)";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceMainTerms<T> {
    pub value: T,
    /// 2e^y Σ mult·Re(f̂(-p)e^{isy}c_{s,η}) over all classes, zero lines included.
    pub spectral: T,
    /// −(f̂(1) + f̂(-1)) e^y c_{0,η}.
    pub trivial: T,
    pub parity: Parity,
    pub dropped_error: &'static str,
}

/// Main terms of the smoothed trace formula for L̃[f, g_{y,η}].
pub fn trace_rhs_spectral<T: Real>(
    catalog: &SpectrumCatalog,
    f: &HolonomyTestFunction<T>,
    kernel: &SmoothingKernel<T>,
    scale: &KernelScale<T>,
    y: T,
    parity: Parity,
) -> Result<TraceMainTerms<T>> {
    f.require_bias_mode()?;
    let part = match parity {
        Parity::Even => f.even_part(),
        Parity::Odd => f.odd_part(),
        Parity::Full => f.clone(),
    };
    let ey = y.exp();
    let c0 = c0(kernel, scale)?;
    let two = T::lit(2.0);
    let mut spectral = T::zero();
    for l in &catalog.zero_lines {
        let m = T::from_u64(l.mult).unwrap();
        spectral = spectral + two * m * part.coeff(-l.p).re * c0;
    }
    let terms = signal_terms(&catalog.lines, &part, kernel, scale, T::infinity())?;
    spectral = spectral + terms.iter().map(|t| t.eval(y)).sum::<T>();
    spectral = spectral * ey;
    let trivial = -(part.coeff(1) + part.coeff(-1)).re * ey * c0;
    Ok(TraceMainTerms {
        value: spectral + trivial,
        spectral,
        trivial,
        parity,
        dropped_error: TRACE_DROPPED_ERROR,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (SmoothingKernel<f64>, KernelScale<f64>) {
        (SmoothingKernel::bump().unwrap(), KernelScale::tight(0.1).unwrap())
    }

    #[test]
    fn no_zero_lines_gives_minus_two_c0() {
        let (k, sc) = setup();
        let b = bias_constant(&SpectrumCatalog::empty(), &HolonomyTestFunction::cos(1), &k, &sc).unwrap();
        assert_eq!(b.value, -2.0 * b.c0);
        assert_eq!(b.zero_line_contribution, 0.0);
    }

    #[test]
    fn two_zero_lines_cancel() {
        let (k, sc) = setup();
        let cat = SpectrumCatalog::new([SpectralLine::zero(1, 2)], vec![], false).unwrap();
        let b = bias_constant(&cat, &HolonomyTestFunction::cos(1), &k, &sc).unwrap();
        assert_eq!(b.value, 0.0);
    }

    #[test]
    fn cos_three_has_no_bias() {
        let (k, sc) = setup();
        let b = bias_constant(&SpectrumCatalog::empty(), &HolonomyTestFunction::cos(3), &k, &sc).unwrap();
        assert_eq!(b.value, 0.0);
    }

    #[test]
    fn bias_mode_is_enforced() {
        let (k, sc) = setup();
        let e = bias_constant(&SpectrumCatalog::empty(), &HolonomyTestFunction::cos(0), &k, &sc);
        assert!(matches!(e, Err(Error::Precondition(_))));
    }

    #[test]
    fn empty_signal_is_bias() {
        let (k, sc) = setup();
        let f = HolonomyTestFunction::cos(1);
        let b = bias_constant(&SpectrumCatalog::empty(), &f, &k, &sc).unwrap().value;
        for y in [0.1, 1.0, 7.5] {
            assert_eq!(eval_et(&SpectrumCatalog::empty(), &f, &k, &sc, 10.0, y).unwrap(), b);
        }
        assert!(eval_et(&SpectrumCatalog::empty(), &f, &k, &sc, 10.0, 0.05).is_err());
    }

    #[test]
    fn weyl_weight_values() {
        let w = weyl_weight(2f64.ln(), std::f64::consts::FRAC_PI_2).unwrap();
        assert!((w - 0.4).abs() < 1e-15);
        assert!(weyl_weight(0.0f64, 1.0).is_err());
        let u = 0.8f64;
        let w0 = weyl_weight(u, 0.0).unwrap();
        assert!((w0 - (2.0 * (u / 2.0).sinh()).powi(-2)).abs() < 1e-13);
    }

    #[test]
    fn geodesic_record_validation() {
        assert!(GeodesicRecord::new(2.0, 0.0, 1.0).unwrap().iterate() == 2);
        assert!(GeodesicRecord::new(2.5, 0.0, 1.0).is_err());
        assert!(GeodesicRecord::new(-1.0, 0.0, -1.0).is_err());
        assert!(GeodesicRecord::new(0.5, 0.0, 1.0).is_err());
        let t = parse_geodesics("length,holonomy,primitive_length\n1.0,3.0,1.0\n2.0,6.0,1.0\n").unwrap();
        assert_eq!(t.len(), 2);
        assert!(parse_geodesics("l,h,p\n1,2,3\n").is_err());
    }

    #[test]
    fn plateau_record() {
        let (k, sc) = setup();
        let recs = [GeodesicRecord::primitive(1.0, std::f64::consts::PI).unwrap()];
        let s = geometric_bias_sum(&recs, |t: f64| t.cos(), &k, &sc, 2.0, true, Weighting::Plain).unwrap();
        assert!((s.value + 1.0).abs() < 1e-14);
        assert!((s.normalized - s.value * (-2.0f64).exp()).abs() < 1e-15);
        let edge = [GeodesicRecord::primitive(2.2, 0.0).unwrap()];
        let s = geometric_bias_sum(&edge, |t: f64| t.cos(), &k, &sc, 2.0, true, Weighting::Plain).unwrap();
        assert_eq!(s.value, 0.0);
    }

    #[test]
    fn trace_rhs_empty_catalog() {
        let (k, sc) = setup();
        let f = HolonomyTestFunction::cos(1);
        let y = 3.0;
        let t = trace_rhs_spectral(&SpectrumCatalog::empty(), &f, &k, &sc, y, Parity::Full).unwrap();
        let c0 = c0(&k, &sc).unwrap();
        assert!((t.value + y.exp() * c0).abs() < 1e-12);
        assert_eq!(t.dropped_error, "O(1/eta^2 + 1)");
        let odd = trace_rhs_spectral(&SpectrumCatalog::empty(), &f, &k, &sc, y, Parity::Odd).unwrap();
        assert_eq!(odd.value, 0.0);
    }
}
