//! Quadrature rules: adaptive tanh-sinh on finite intervals and composite
//! Gauss–Legendre.
//!
//! Every integrand in this crate is either compactly supported or has been
//! mapped onto a finite interval, so no infinite-range rule is provided.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Values a quadrature rule can accumulate: real or complex.
pub trait QuadValue<T: Real>:
    Copy + Zero + Add<Output = Self> + Sub<Output = Self> + Mul<T, Output = Self> + Send + Sync
{
    fn magnitude(&self) -> T;
}

impl<T: Real> QuadValue<T> for T {
    fn magnitude(&self) -> T {
        self.abs()
    }
}

impl<T: Real> QuadValue<T> for Complex<T> {
    fn magnitude(&self) -> T {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Quadrature<V, T> {
    pub value: V,
    /// Difference between the last two refinement levels.
    pub error: T,
    pub evaluations: usize,
    pub level: u32,
}

/// Adaptive tanh-sinh (double exponential) rule.
///
/// Level `k` uses step `2^-k`; each level only evaluates the new odd nodes and
/// reuses the previous sum. Nodes are placed at distance `d * delta` from the
/// endpoints with `delta = 1 - tanh(pi/2 sinh t)` computed without
/// cancellation; nodes that round onto an endpoint are dropped.
#[derive(Debug, Clone, Copy)]
pub struct TanhSinh<T> {
    pub tol: T,
    pub min_level: u32,
    pub max_level: u32,
}

impl<T: Real> Default for TanhSinh<T> {
    fn default() -> Self {
        Self {
            tol: T::quad_tol(),
            min_level: 3,
            max_level: 12,
        }
    }
}

impl<T: Real> TanhSinh<T> {
    pub fn with_tol(tol: T) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    pub fn integrate<V, F>(&self, mut f: F, a: T, b: T) -> Result<Quadrature<V, T>>
    where
        V: QuadValue<T>,
        F: FnMut(T) -> V,
    {
        if a == b {
            return Ok(Quadrature {
                value: V::zero(),
                error: T::zero(),
                evaluations: 0,
                level: 0,
            });
        }
        if b < a {
            let q = self.integrate(f, b, a)?;
            return Ok(Quadrature {
                value: V::zero() - q.value,
                ..q
            });
        }
        let two = T::lit(2.0);
        let half_pi = T::FRAC_PI_2();
        let c = (a + b) / two;
        let d = (b - a) / two;

        let mut evaluations = 1usize;
        // Running sum of w_j f(x_j) over all nodes so far (without the step).
        let mut sum = f(c) * half_pi;
        let mut prev: Option<V> = None;
        let mut prev_err = T::infinity();

        for level in 0..=self.max_level {
            let h = T::lit(0.5f64.powi(level as i32));
            let (start, stride) = if level == 0 { (1u64, 1u64) } else { (1u64, 2u64) };
            let mut j = start;
            loop {
                let t = h * T::from_u64(j).unwrap();
                let u = half_pi * t.sinh();
                let cosh_u = u.cosh();
                if !cosh_u.is_finite() {
                    break;
                }
                let w = half_pi * t.cosh() / (cosh_u * cosh_u);
                let delta = T::one() / (u.exp() * cosh_u);
                let right = b - d * delta;
                let left = a + d * delta;
                if (right >= b && left <= a) || w < T::min_positive_value() {
                    break;
                }
                if right < b {
                    sum = sum + f(right) * w;
                    evaluations += 1;
                }
                if left > a {
                    sum = sum + f(left) * w;
                    evaluations += 1;
                }
                j += stride;
            }
            let estimate = sum * (h * d);
            if let Some(p) = prev {
                let err = (estimate - p).magnitude();
                prev_err = err;
                if level >= self.min_level
                    && (err <= self.tol || err <= self.tol * estimate.magnitude())
                {
                    return Ok(Quadrature {
                        value: estimate,
                        error: err,
                        evaluations,
                        level,
                    });
                }
            }
            prev = Some(estimate);
        }
        Err(Error::NumericGuard(format!(
            "tanh-sinh did not converge on [{a}, {b}] (last level difference {prev_err})"
        )))
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// Builds the `n`-point rule by Newton iteration on P_n, computed in `f64`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0f64; n];
        let mut weights = vec![0.0f64; n];
        let nf = n as f64;
        for i in 0..(n + 1) / 2 {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self {
            nodes: nodes.into_iter().map(T::lit).collect(),
            weights: weights.into_iter().map(T::lit).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: T, b: T) -> impl Iterator<Item = (T, T)> + '_ {
        let two = T::lit(2.0);
        let c = (a + b) / two;
        let d = (b - a) / two;
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (c + d * x, d * w))
    }

    pub fn integrate<V, F>(&self, mut f: F, a: T, b: T) -> V
    where
        V: QuadValue<T>,
        F: FnMut(T) -> V,
    {
        self.mapped(a, b)
            .fold(V::zero(), |acc, (x, w)| acc + f(x) * w)
    }

    /// Composite rule with `panels` equal sub-intervals.
    pub fn integrate_composite<V, F>(&self, mut f: F, a: T, b: T, panels: usize) -> V
    where
        V: QuadValue<T>,
        F: FnMut(T) -> V,
    {
        let panels = panels.max(1);
        let width = (b - a) / T::from_usize(panels).unwrap();
        (0..panels).fold(V::zero(), |acc, k| {
            let lo = a + width * T::from_usize(k).unwrap();
            let hi = if k + 1 == panels { b } else { lo + width };
            acc + self.integrate(&mut f, lo, hi)
        })
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tanh_sinh_polynomial_and_exp() {
        let ts = TanhSinh::<f64>::default();
        let q = ts.integrate(|x: f64| x * x, 0.0, 3.0).unwrap();
        assert!((q.value - 9.0).abs() < 1e-13);
        let q = ts.integrate(|x: f64| x.exp(), -1.0, 2.0).unwrap();
        assert!((q.value - (2f64.exp() - (-1f64).exp())).abs() < 1e-13);
    }

    #[test]
    fn tanh_sinh_endpoint_singularity() {
        // ∫_0^1 1/sqrt(x) dx = 2
        let ts = TanhSinh::<f64>::with_tol(1e-10);
        let q = ts.integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0).unwrap();
        assert!((q.value - 2.0).abs() < 1e-8, "{}", q.value);
    }

    #[test]
    fn tanh_sinh_reversed_interval_negates() {
        let ts = TanhSinh::<f64>::default();
        let q = ts.integrate(|x: f64| x.cos(), 1.0, 0.0).unwrap();
        assert!((q.value + 1f64.sin()).abs() < 1e-13);
    }

    #[test]
    fn tanh_sinh_complex_oscillatory() {
        let ts = TanhSinh::<f64>::default();
        let q = ts
            .integrate(|x: f64| Complex::new(0.0, 40.0 * x).exp(), -1.0, 1.0)
            .unwrap();
        let exact = 2.0 * (40f64).sin() / 40.0;
        assert!((q.value.re - exact).abs() < 1e-12);
        assert!(q.value.im.abs() < 1e-12);
    }

    #[test]
    fn tanh_sinh_f32() {
        let ts = TanhSinh::<f32>::default();
        let q = ts.integrate(|x: f32| x.sin(), 0.0, std::f32::consts::PI).unwrap();
        assert!((q.value - 2.0).abs() < 1e-5);
    }

    #[test]
    fn gauss_legendre_exact_for_degree_2n_minus_1() {
        let gl = GaussLegendre::<f64>::new(8);
        let v: f64 = gl.integrate(|x: f64| x.powi(15) + x.powi(14), -1.0, 1.0);
        assert!((v - 2.0 / 15.0).abs() < 1e-14);
        let w: f64 = gl.mapped(-1.0, 1.0).map(|(_, w)| w).sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_odd_order_has_center_node() {
        let gl = GaussLegendre::<f64>::new(5);
        let nodes: Vec<f64> = gl.mapped(-1.0, 1.0).map(|(x, _)| x).collect();
        assert_eq!(nodes[2], 0.0);
        let v: f64 = gl.integrate_composite(|x: f64| x.sin(), 0.0, 10.0, 20);
        assert!((v - (1.0 - 10f64.cos())).abs() < 1e-13);
    }
}
