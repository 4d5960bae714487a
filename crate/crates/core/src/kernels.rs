//! Smoothing kernel ψ, its scaled version ψ_η, the complex Laplace transform
//! Ψ(z) = ∫ψ(t)e^{zt}dt, the constants c_{s,η}, the smoothed windows
//! g_{y,η} = ψ_η ⋆ χ_{[-y,y]} and h_{y,η} = ψ_η ⋆ (χ_{[-y,y]}·sgn), and
//! holonomy test functions given by Fourier coefficients on the circle.
//!
//! Conventions: circle coefficients are f̂(p) = (1/2π)∫f(θ)e^{-ipθ}dθ and the
//! line transform is ψ̂(ξ) = ∫ψ(t)e^{-2πiξt}dt = Ψ(-2πiξ).

use std::collections::BTreeMap;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{GaussLegendre, TanhSinh};
use crate::scalar::Real;

/// Guard on |Re z| for [`laplace_psi`]; e^{700} is close to the `f64` limit.
pub const LAPLACE_RE_GUARD: f64 = 700.0;

/// Below this |s| the window transforms switch to their Taylor expansions.
pub const SMALL_S: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    /// C·exp(-1/(1-t²)) on (-1, 1).
    Bump,
}

impl std::str::FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bump" => Ok(KernelKind::Bump),
            other => Err(Error::Config(format!("unknown kernel `{other}`"))),
        }
    }
}

/// Even, smooth, non-negative kernel supported in [-1, 1] with unit integral.
#[derive(Debug, Clone, Copy)]
pub struct SmoothingKernel<T> {
    pub kind: KernelKind,
    pub normalization: T,
}

impl<T: Real> SmoothingKernel<T> {
    pub fn new(kind: KernelKind) -> Result<Self> {
        match kind {
            KernelKind::Bump => Self::bump(),
        }
    }

    /// The normalised bump; the constant is computed once here by quadrature.
    pub fn bump() -> Result<Self> {
        let raw = TanhSinh::<T>::default().integrate(bump_shape::<T>, -T::one(), T::one())?;
        Ok(Self {
            kind: KernelKind::Bump,
            normalization: T::one() / raw.value,
        })
    }

    /// ψ(t).
    #[inline]
    pub fn eval(&self, t: T) -> T {
        match self.kind {
            KernelKind::Bump => self.normalization * bump_shape(t),
        }
    }

    /// ∫_{-1}^{u} ψ.
    pub fn cdf(&self, u: T) -> Result<T> {
        if u <= -T::one() {
            return Ok(T::zero());
        }
        if u >= T::one() {
            return Ok(T::one());
        }
        if u > T::zero() {
            return Ok(T::one() - self.cdf(-u)?);
        }
        let q = TanhSinh::<T>::default().integrate(|t| self.eval(t), -T::one(), u)?;
        Ok(q.value)
    }
}

#[inline]
fn bump_shape<T: Real>(t: T) -> T {
    let one_minus = T::one() - t * t;
    if one_minus <= T::zero() {
        T::zero()
    } else {
        (-T::one() / one_minus).exp()
    }
}

/// Smoothing scale η with ceiling η₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelScale<T> {
    pub eta: T,
    pub eta0: T,
}

impl<T: Real> KernelScale<T> {
    pub fn new(eta: T, eta0: T) -> Result<Self> {
        if !(eta > T::zero() && eta <= eta0 && eta0.is_finite()) {
            return Err(Error::Config(format!(
                "kernel scale requires 0 < eta <= eta0, got eta = {eta}, eta0 = {eta0}"
            )));
        }
        Ok(Self { eta, eta0 })
    }

    /// η₀ = η.
    pub fn tight(eta: T) -> Result<Self> {
        Self::new(eta, eta)
    }
}

/// ψ_η(t) = ψ(t/η)/η.
pub fn kernel_eval<T: Real>(kernel: &SmoothingKernel<T>, scale: &KernelScale<T>, t: T) -> T {
    if t.abs() >= scale.eta {
        return T::zero();
    }
    kernel.eval(t / scale.eta) / scale.eta
}

/// Ψ(z) = ∫_{-1}^{1} ψ(t) e^{zt} dt.
pub fn laplace_psi<T: Real>(kernel: &SmoothingKernel<T>, z: Complex<T>) -> Result<Complex<T>> {
    if !(z.re.abs() <= T::lit(LAPLACE_RE_GUARD)) || !z.im.is_finite() {
        return Err(Error::Precondition(format!(
            "laplace_psi argument {z} violates |Re z| <= {LAPLACE_RE_GUARD}"
        )));
    }
    if z.re == T::zero() && z.im == T::zero() {
        return Ok(Complex::new(T::one(), T::zero()));
    }
    let q = TanhSinh::<T>::default().integrate(
        |t: T| (z * t).exp() * kernel.eval(t),
        -T::one(),
        T::one(),
    )?;
    Ok(q.value)
}

/// ψ̂(ξ) = ∫ψ(t)e^{-2πiξt}dt; real because ψ is even.
pub fn psi_hat<T: Real>(kernel: &SmoothingKernel<T>, xi: T) -> Result<T> {
    let z = Complex::new(T::zero(), -T::lit(2.0) * T::PI() * xi);
    Ok(laplace_psi(kernel, z)?.re)
}

/// c_{s,η} together with the parameters it was computed for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingConstant<T> {
    pub s: T,
    pub eta: T,
    pub value: Complex<T>,
}

/// c_{s,η} = Ψ(η(1+is)) / (1+is).
pub fn c_s_eta<T: Real>(
    kernel: &SmoothingKernel<T>,
    scale: &KernelScale<T>,
    s: T,
) -> Result<SmoothingConstant<T>> {
    let one_is = Complex::new(T::one(), s);
    let value = laplace_psi(kernel, one_is * scale.eta)? / one_is;
    Ok(SmoothingConstant {
        s,
        eta: scale.eta,
        value,
    })
}

/// c_{s,η} from its defining integral ∫ψ_η(t)e^{t(1+is)}/(1+is)dt, evaluated
/// in the original variable with composite Gauss–Legendre. Independent of the
/// tanh-sinh route used by [`c_s_eta`].
pub fn c_s_eta_direct<T: Real>(
    kernel: &SmoothingKernel<T>,
    scale: &KernelScale<T>,
    s: T,
) -> SmoothingConstant<T> {
    let eta = scale.eta;
    let one_is = Complex::new(T::one(), s);
    let oscillations = (eta * (T::one() + s.abs())).to_f64_lossy();
    let panels = 48 + (4.0 * oscillations).ceil() as usize;
    let gl = GaussLegendre::<T>::new(20);
    let integral: Complex<T> = gl.integrate_composite(
        |t: T| (one_is * t).exp() * kernel_eval(kernel, scale, t),
        -eta,
        eta,
        panels,
    );
    SmoothingConstant {
        s,
        eta,
        value: integral / one_is,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    /// g_{y,η} = ψ_η ⋆ χ_{[-y,y]} (even).
    G,
    /// h_{y,η} = ψ_η ⋆ (χ_{[-y,y]}·sgn) (odd).
    H,
}

/// g_{y,η}(x) or h_{y,η}(x).
pub fn window_eval<T: Real>(
    kind: WindowKind,
    kernel: &SmoothingKernel<T>,
    scale: &KernelScale<T>,
    y: T,
    x: T,
) -> Result<T> {
    let eta = scale.eta;
    let phi = |v: T| kernel.cdf(v / eta);
    match kind {
        WindowKind::G => Ok(phi(x + y)? - phi(x - y)?),
        WindowKind::H => {
            let mid = phi(x)?;
            Ok((mid - phi(x - y)?) - (phi(x + y)? - mid))
        }
    }
}

/// ∫ w(x) e^{isx} dx for the window w ∈ {g_{y,η}, h_{y,η}}:
/// g ↦ 2ψ̂(-ηs/2π)·sin(sy)/s, h ↦ 2ψ̂(-ηs/2π)·(cos(sy)-1)/(is).
pub fn window_transform<T: Real>(
    kind: WindowKind,
    kernel: &SmoothingKernel<T>,
    scale: &KernelScale<T>,
    y: T,
    s: T,
) -> Result<Complex<T>> {
    if !(y > scale.eta) {
        return Err(Error::Precondition(format!(
            "window transform needs y > eta (y = {y}, eta = {})",
            scale.eta
        )));
    }
    let two = T::lit(2.0);
    let psi = psi_hat(kernel, -scale.eta * s / (two * T::PI()))?;
    let small = s.abs() < T::lit(SMALL_S);
    match kind {
        WindowKind::G => {
            let sinc = if small {
                y - s * s * y * y * y / T::lit(6.0)
            } else {
                (s * y).sin() / s
            };
            Ok(Complex::new(two * psi * sinc, T::zero()))
        }
        WindowKind::H => {
            // (cos(sy) - 1)/(is) = i (1 - cos(sy))/s
            let ratio = if small {
                s * y * y / two
            } else {
                (T::one() - (s * y).cos()) / s
            };
            Ok(Complex::new(T::zero(), two * psi * ratio))
        }
    }
}

/// A function on the circle given by finitely many Fourier coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct HolonomyTestFunction<T> {
    coeffs: BTreeMap<i64, Complex<T>>,
    real: bool,
}

/// One row of the JSON coefficient table accepted on the command line.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CoefficientRow {
    pub p: i64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl<T: Real> HolonomyTestFunction<T> {
    pub fn from_coeffs(coeffs: impl IntoIterator<Item = (i64, Complex<T>)>) -> Self {
        let mut map: BTreeMap<i64, Complex<T>> = BTreeMap::new();
        for (p, c) in coeffs {
            let e = map.entry(p).or_insert_with(|| Complex::new(T::zero(), T::zero()));
            *e = *e + c;
        }
        map.retain(|_, c| c.re != T::zero() || c.im != T::zero());
        let tol = T::epsilon() * T::lit(64.0);
        let real = map.iter().all(|(&p, &c)| {
            let mirror = map
                .get(&-p)
                .copied()
                .unwrap_or_else(|| Complex::new(T::zero(), T::zero()));
            (c - mirror.conj()).norm() <= tol * (T::one() + c.norm())
        });
        Self { coeffs: map, real }
    }

    /// cos(kθ).
    pub fn cos(k: i64) -> Self {
        let half = T::lit(0.5);
        if k == 0 {
            return Self::from_coeffs([(0, Complex::new(T::one(), T::zero()))]);
        }
        Self::from_coeffs([
            (k, Complex::new(half, T::zero())),
            (-k, Complex::new(half, T::zero())),
        ])
    }

    /// sin(kθ).
    pub fn sin(k: i64) -> Self {
        let half = T::lit(0.5);
        Self::from_coeffs([
            (k, Complex::new(T::zero(), -half)),
            (-k, Complex::new(T::zero(), half)),
        ])
    }

    pub fn from_rows(rows: &[CoefficientRow]) -> Self {
        Self::from_coeffs(
            rows.iter()
                .map(|r| (r.p, Complex::new(T::lit(r.re), T::lit(r.im)))),
        )
    }

    /// Parses `cos:k`, `sin:k`, or a JSON coefficient table
    /// `[{"p":..,"re":..,"im":..}, ...]`.
    pub fn parse_spec(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if let Some(k) = spec.strip_prefix("cos:") {
            return Ok(Self::cos(parse_int(k)?));
        }
        if let Some(k) = spec.strip_prefix("sin:") {
            return Ok(Self::sin(parse_int(k)?));
        }
        if spec.starts_with('[') {
            let rows: Vec<CoefficientRow> = serde_json::from_str(spec)?;
            return Ok(Self::from_rows(&rows));
        }
        Err(Error::Parse(format!(
            "test function `{spec}` is not cos:k, sin:k or a JSON coefficient table"
        )))
    }

    pub fn coeff(&self, p: i64) -> Complex<T> {
        self.coeffs
            .get(&p)
            .copied()
            .unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, Complex<T>> {
        &self.coeffs
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn max_frequency(&self) -> i64 {
        self.coeffs.keys().map(|p| p.abs()).max().unwrap_or(0)
    }

    /// f(θ) = Σ f̂(p)e^{ipθ}; the real part for real-valued f.
    pub fn eval(&self, theta: T) -> T {
        self.eval_complex(theta).re
    }

    pub fn eval_complex(&self, theta: T) -> Complex<T> {
        self.coeffs.iter().fold(Complex::new(T::zero(), T::zero()), |acc, (&p, &c)| {
            let angle = T::from_i64(p).unwrap() * theta;
            acc + c * Complex::new(angle.cos(), angle.sin())
        })
    }

    /// (f(θ) + f(-θ))/2.
    pub fn even_part(&self) -> Self {
        self.symmetrized(T::one())
    }

    /// (f(θ) - f(-θ))/2.
    pub fn odd_part(&self) -> Self {
        self.symmetrized(-T::one())
    }

    fn symmetrized(&self, sign: T) -> Self {
        let half = T::lit(0.5);
        let keys: Vec<i64> = self
            .coeffs
            .keys()
            .flat_map(|&p| [p, -p])
            .collect();
        Self::from_coeffs(
            keys.into_iter()
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .map(|p| (p, (self.coeff(p) + self.coeff(-p) * sign) * half)),
        )
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|(&p, &c)| (p, c * factor)))
    }

    /// Checks the bias-mode requirements: real-valued and f̂(0) = 0.
    pub fn require_bias_mode(&self) -> Result<()> {
        if self.coeff(0).norm() > T::epsilon() * T::lit(16.0) {
            return Err(Error::Precondition(format!(
                "bias mode needs a mean-zero test function, but f̂(0) = {}",
                self.coeff(0)
            )));
        }
        if !self.real {
            return Err(Error::Precondition(
                "bias mode needs a real-valued test function (f̂(-p) = conj f̂(p))".into(),
            ));
        }
        Ok(())
    }
}

fn parse_int(s: &str) -> Result<i64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("`{s}` is not an integer frequency")))
}

/// f̂(p) of a coefficient table: exact lookup.
pub fn fourier_coeff<T: Real>(f: &HolonomyTestFunction<T>, p: i64) -> Complex<T> {
    f.coeff(p)
}

/// f̂(p) of a closed-form periodic function by the trapezoidal rule, which is
/// spectrally accurate for smooth periodic integrands. The node count doubles
/// until two successive estimates agree to `tol`.
pub fn fourier_coeff_fn<T: Real, F: Fn(T) -> T>(f: F, p: i64, tol: T) -> Result<Complex<T>> {
    let two_pi = T::lit(2.0) * T::PI();
    let mut n: usize = 16usize.max(4 * p.unsigned_abs() as usize + 4);
    let estimate = |n: usize| {
        let nf = T::from_usize(n).unwrap();
        let mut acc = Complex::new(T::zero(), T::zero());
        for k in 0..n {
            let theta = two_pi * T::from_usize(k).unwrap() / nf;
            let angle = -T::from_i64(p).unwrap() * theta;
            acc = acc + Complex::new(angle.cos(), angle.sin()) * f(theta);
        }
        acc / nf
    };
    let mut prev = estimate(n);
    while n < (1 << 22) {
        n *= 2;
        let cur = estimate(n);
        if (cur - prev).norm() <= tol {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::NumericGuard(format!(
        "Fourier coefficient p = {p} did not converge"
    )))
}
