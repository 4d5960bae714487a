use rayon::prelude::*;
use serde::Serialize;

use super::charfn::{bessel_product, check_range};
use super::AmplitudeSet;
use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::scalar::Real;

pub const DEFAULT_TAIL_EPSILON: f64 = 1e-8;

/// Gauss–Legendre order per panel.
const PANEL_ORDER: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Inversion,
    MonteCarlo,
    Arcsine,
}

/// Density of the limit law on a grid with summary statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasDistribution<T> {
    pub grid: Vec<T>,
    pub density: Vec<T>,
    /// ∫p before renormalization. For inversion this uses the analytic
    /// prefactor 1/π.
    pub mass: T,
    pub mean: T,
    pub center: T,
    pub positive_probability: T,
    pub symmetry_defect: T,
    pub method: Method,
    /// Most negative raw density value before clipping (zero if none).
    pub clipped_min: T,
    pub clipped_points: usize,
    /// Prefactor that gives unit mass, to compare with 1/π.
    pub fitted_constant: Option<T>,
    /// Upper limit Ξ of the ξ-integral.
    pub xi_max: Option<T>,
    pub panels: Option<usize>,
}

/// Uniform grid over `[b - (1+margin)Σa, b + (1+margin)Σa]`, symmetric about b.
pub fn default_grid<T: Real>(amps: &AmplitudeSet<T>, points: usize, margin: T) -> Vec<T> {
    let half = amps.total_amplitude() * (T::one() + margin);
    uniform_grid(amps.center - half, amps.center + half, points.max(2))
}

pub fn uniform_grid<T: Real>(lo: T, hi: T, points: usize) -> Vec<T> {
    let n = T::from_usize(points - 1).unwrap();
    (0..points)
        .map(|k| {
            let t = T::from_usize(k).unwrap() / n;
            lo * (T::one() - t) + hi * t
        })
        .collect()
}

/// Envelope Π min(1, √(2/(π a ξ))) of |Π J0(a ξ)|.
fn envelope<T: Real>(amplitudes: &[T], xi: T) -> T {
    let c = T::lit(2.0) / T::PI();
    amplitudes
        .iter()
        .fold(T::one(), |acc, &a| acc * T::one().min((c / (a * xi)).sqrt()))
}

/// Smallest Ξ (to bisection accuracy) with envelope(Ξ) < eps.
fn tail_cutoff<T: Real>(amplitudes: &[T], eps: T) -> T {
    let mut hi = T::one();
    while envelope(amplitudes, hi) >= eps {
        hi = hi * T::lit(2.0);
    }
    let mut lo = hi / T::lit(2.0);
    for _ in 0..60 {
        let mid = (lo + hi) / T::lit(2.0);
        if envelope(amplitudes, mid) >= eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Panel boundaries on `[0, Ξ]`: consecutive zeros of J0(a_min ξ), with each
/// interval split so that no panel spans more than one period of the fastest
/// oscillation `ω_max`.
fn panels<T: Real>(a_min: T, omega_max: T, xi_max: T) -> Vec<T> {
    let pi = T::PI();
    let max_width = T::lit(2.0) * pi / omega_max.max(T::lit(1e-300));
    let mut edges = vec![T::zero()];
    let mut k = 1u64;
    loop {
        // McMahon approximation of the k-th zero of J0, refined enough for
        // panel placement.
        let beta = (T::from_u64(k).unwrap() - T::lit(0.25)) * pi;
        let zero = (beta + T::one() / (T::lit(8.0) * beta)) / a_min;
        let end = zero.min(xi_max);
        let start = *edges.last().unwrap();
        let pieces = ((end - start) / max_width).ceil().max(T::one());
        let m = pieces.to_usize().unwrap().max(1);
        for i in 1..=m {
            edges.push(start + (end - start) * T::from_usize(i).unwrap() / T::from_usize(m).unwrap());
        }
        if end >= xi_max {
            break;
        }
        k += 1;
    }
    edges
}

/// p(x) = (1/π)∫_0^Ξ Π J0(a_j ξ) cos(ξ(x − b)) dξ on the grid.
pub fn density_inversion<T: Real>(
    amps: &AmplitudeSet<T>,
    grid: &[T],
    tail_epsilon: T,
) -> Result<BiasDistribution<T>> {
    let positive: Vec<T> = amps.amplitudes.iter().copied().filter(|&a| a > T::zero()).collect();
    if positive.len() < 3 {
        return Err(Error::Precondition(format!(
            "density inversion needs at least 3 positive amplitudes, found {}; \
             use `sample` (sample_distribution) or the arcsine reference instead",
            positive.len()
        )));
    }
    if !(tail_epsilon > T::zero() && tail_epsilon < T::one()) {
        return Err(Error::Config(format!("tail epsilon must lie in (0, 1), got {tail_epsilon}")));
    }
    check_grid(amps, grid)?;
    let b = amps.center;

    let xi_max = tail_cutoff(&positive, tail_epsilon);
    check_range(&positive, xi_max)?;
    let a_min = positive.iter().fold(T::infinity(), |m, &a| m.min(a));
    let offset_max = grid
        .iter()
        .fold(T::zero(), |m, &x| m.max((x - b).abs()));
    let omega_max = amps.total_amplitude() + offset_max;
    let edges = panels(a_min, omega_max, xi_max);
    let gl = GaussLegendre::<T>::new(PANEL_ORDER);

    // quadrature nodes and weights with the Bessel product folded in
    let nodes: Vec<(T, T)> = edges
        .par_windows(2)
        .flat_map_iter(|w| {
            gl.mapped(w[0], w[1])
                .map(|(x, wt)| (x, wt * bessel_product(&positive, x)))
                .collect::<Vec<_>>()
        })
        .collect();

    let inv_pi = T::one() / T::PI();
    let uniform = grid_is_uniform(grid);
    let raw: Vec<T> = grid
        .par_chunks(64)
        .flat_map_iter(|chunk| evaluate_chunk(&nodes, chunk, b, uniform))
        .map(|v| v * inv_pi)
        .collect();

    let mass = trapezoid(grid, &raw);
    if !(mass > T::zero()) {
        return Err(Error::NumericGuard(format!("inverted density has mass {mass}")));
    }
    let mut clipped_min = T::zero();
    let mut clipped_points = 0;
    let density: Vec<T> = raw
        .iter()
        .map(|&v| {
            let v = v / mass;
            if v < T::zero() {
                clipped_min = clipped_min.min(v);
                clipped_points += 1;
                T::zero()
            } else {
                v
            }
        })
        .collect();

    let stats = summarize(grid, &density, b);
    Ok(BiasDistribution {
        grid: grid.to_vec(),
        density,
        mass,
        mean: stats.mean,
        center: b,
        positive_probability: stats.positive_probability,
        symmetry_defect: stats.symmetry_defect,
        method: Method::Inversion,
        clipped_min,
        clipped_points,
        fitted_constant: Some(inv_pi / mass),
        xi_max: Some(xi_max),
        panels: Some(edges.len() - 1),
    })
}

fn check_grid<T: Real>(amps: &AmplitudeSet<T>, grid: &[T]) -> Result<()> {
    if grid.len() < 2 || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Config("density grid must be strictly increasing with >= 2 points".into()));
    }
    let spacing = grid.windows(2).fold(T::zero(), |m, w| m.max(w[1] - w[0]));
    let (lo, hi) = amps.support();
    if grid[0] > lo + spacing || grid[grid.len() - 1] < hi - spacing {
        return Err(Error::Config(format!(
            "grid [{}, {}] does not cover the support [{lo}, {hi}]",
            grid[0],
            grid[grid.len() - 1]
        )));
    }
    Ok(())
}

fn grid_is_uniform<T: Real>(grid: &[T]) -> bool {
    let n = grid.len();
    let h = (grid[n - 1] - grid[0]) / T::from_usize(n - 1).unwrap();
    grid.windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= h * T::lit(1e-9))
}

/// Σ_i w_i cos(ξ_i (x − b)) for the points of a chunk. On uniform grids the
/// cosines come from one rotation per node, restarted at every chunk.
fn evaluate_chunk<T: Real>(nodes: &[(T, T)], xs: &[T], b: T, uniform: bool) -> Vec<T> {
    if !uniform || xs.len() < 2 {
        return xs
            .iter()
            .map(|&x| nodes.iter().map(|&(xi, w)| w * (xi * (x - b)).cos()).sum())
            .collect();
    }
    let h = xs[1] - xs[0];
    let d0 = xs[0] - b;
    let mut out = vec![T::zero(); xs.len()];
    for &(xi, w) in nodes {
        let (s0, c0) = (xi * d0).sin_cos();
        let (sh, ch) = (xi * h).sin_cos();
        let (mut c, mut s) = (c0, s0);
        for o in out.iter_mut() {
            *o = *o + w * c;
            let nc = c * ch - s * sh;
            s = s * ch + c * sh;
            c = nc;
        }
    }
    out
}

pub(crate) fn trapezoid<T: Real>(x: &[T], y: &[T]) -> T {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xw, yw)| (xw[1] - xw[0]) * (yw[0] + yw[1]) / T::lit(2.0))
        .sum()
}

pub(crate) struct Summary<T> {
    pub mean: T,
    pub positive_probability: T,
    pub symmetry_defect: T,
}

/// Mean, P(X > 0) and sup |p(b + x) − p(b − x)| of a unit-mass grid density.
pub(crate) fn summarize<T: Real>(grid: &[T], density: &[T], center: T) -> Summary<T> {
    let mass = trapezoid(grid, density);
    let xp: Vec<T> = grid.iter().zip(density).map(|(&x, &p)| x * p).collect();
    let mean = trapezoid(grid, &xp) / mass;

    let mut positive = T::zero();
    for i in 0..grid.len() - 1 {
        let (x0, x1, p0, p1) = (grid[i], grid[i + 1], density[i], density[i + 1]);
        if x0 >= T::zero() {
            positive = positive + (x1 - x0) * (p0 + p1) / T::lit(2.0);
        } else if x1 > T::zero() {
            let t = -x0 / (x1 - x0);
            let pz = p0 + (p1 - p0) * t;
            positive = positive + x1 * (pz + p1) / T::lit(2.0);
        }
    }

    let mut defect = T::zero();
    for (&x, &p) in grid.iter().zip(density) {
        let mirror = center + center - x;
        if let Some(q) = interpolate(grid, density, mirror) {
            defect = defect.max((p - q).abs());
        }
    }
    Summary {
        mean,
        positive_probability: positive / mass,
        symmetry_defect: defect,
    }
}

/// Linear interpolation; `None` outside the grid.
pub fn interpolate<T: Real>(grid: &[T], values: &[T], x: T) -> Option<T> {
    let n = grid.len();
    let span = grid[n - 1] - grid[0];
    let slack = span * T::lit(1e-12);
    if x < grid[0] - slack || x > grid[n - 1] + slack {
        return None;
    }
    let i = grid.partition_point(|&g| g <= x).clamp(1, n - 1);
    let (x0, x1) = (grid[i - 1], grid[i]);
    let t = ((x - x0) / (x1 - x0)).max(T::zero()).min(T::one());
    Some(values[i - 1] + (values[i] - values[i - 1]) * t)
}

/// 1/(π√(a² − x²)), the density of a·cos(2πU) for U uniform on [0, 1).
pub fn arcsine_reference<T: Real>(a: T, x: T) -> Result<T> {
    if !(a > T::zero()) || !(x.abs() < a) {
        return Err(Error::Precondition(format!(
            "arcsine density needs |x| < a, got a = {a}, x = {x}"
        )));
    }
    Ok(T::one() / (T::PI() * ((a - x) * (a + x)).sqrt()))
}

/// CDF of a·cos(2πU): 1/2 + arcsin(x/a)/π, clamped to [0, 1].
pub fn arcsine_cdf<T: Real>(a: T, x: T) -> T {
    if x <= -a {
        T::zero()
    } else if x >= a {
        T::one()
    } else {
        T::lit(0.5) + (x / a).asin() / T::PI()
    }
}
