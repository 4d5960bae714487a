use rayon::prelude::*;
use serde::Serialize;

use super::inversion::{summarize, BiasDistribution, Method};
use super::timeavg::Functional;
use super::AmplitudeSet;
use crate::catalog::RelationLattice;
use crate::error::{Error, Result};
use crate::rng::{chunks, fill_u64, substream};
use crate::scalar::Real;

pub const DEFAULT_BINS: usize = 200;

/// 2^-64.
const TWO_POW_NEG_64: f64 = 1.0 / 18_446_744_073_709_551_616.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SamplingOptions {
    /// Rank-1 lattice points with a seeded shift instead of ChaCha draws.
    pub qmc: bool,
    pub bins: usize,
    /// Keep every sample value (memory `8n` bytes).
    pub keep_samples: bool,
    /// Functionals whose sample means are accumulated.
    pub functionals: Vec<Functional>,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        Self {
            qmc: false,
            bins: DEFAULT_BINS,
            keep_samples: false,
            functionals: Vec::new(),
        }
    }
}

/// Sample mean and standard error of h(X).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionalEstimate {
    pub functional: Functional,
    pub mean: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleResult<T> {
    /// Histogram density on bin centres over the support `[b − Σa, b + Σa]`.
    pub distribution: BiasDistribution<T>,
    pub n_samples: usize,
    pub sample_mean: T,
    pub sample_std: T,
    pub min: T,
    pub max: T,
    /// Samples outside `[b − Σa, b + Σa]`; the check is exact.
    pub support_violations: usize,
    pub functionals: Vec<FunctionalEstimate>,
    pub samples: Option<Vec<T>>,
}

/// Generates fixed-point torus points `x = M t mod 1` (phase `x / 2^64`).
#[derive(Debug, Clone)]
pub struct TorusSampler {
    basis: Vec<Vec<u64>>,
    rank: usize,
    seed: u64,
    qmc: Option<Rank1Lattice>,
}

#[derive(Debug, Clone)]
struct Rank1Lattice {
    n: u64,
    generator: Vec<u64>,
    shift: Vec<u64>,
}

impl TorusSampler {
    pub fn new(lattice: &RelationLattice, seed: u64, qmc_points: Option<usize>) -> Self {
        let basis = lattice.subtorus_basis_wrapping();
        let rank = lattice.rank;
        let qmc = qmc_points.map(|n| {
            let mut shift = vec![0u64; rank];
            fill_u64(&mut substream(seed, u64::MAX), &mut shift);
            Rank1Lattice {
                n: n.max(1) as u64,
                generator: korobov_generator(n.max(1) as u64, rank),
                shift,
            }
        });
        Self {
            basis,
            rank,
            seed,
            qmc,
        }
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Points `start..end` of chunk `chunk`, written row-major into `out`.
    pub fn fill_chunk(&self, chunk: u64, start: usize, end: usize, out: &mut Vec<u64>) {
        let n = self.dimension();
        let mut t = vec![0u64; self.rank];
        let mut rng = substream(self.seed, chunk);
        out.clear();
        out.reserve((end - start) * n);
        for k in start..end {
            match &self.qmc {
                None => fill_u64(&mut rng, &mut t),
                Some(lat) => {
                    for (j, tj) in t.iter_mut().enumerate() {
                        let m = ((k as u128 * lat.generator[j] as u128) % lat.n as u128) << 64;
                        *tj = ((m / lat.n as u128) as u64).wrapping_add(lat.shift[j]);
                    }
                }
            }
            for row in &self.basis {
                let x = row
                    .iter()
                    .zip(&t)
                    .fold(0u64, |acc, (&m, &tj)| acc.wrapping_add(m.wrapping_mul(tj)));
                out.push(x);
            }
        }
    }

    /// The first `count` points, one vector per point.
    pub fn points(&self, count: usize) -> Vec<Vec<u64>> {
        let n = self.dimension();
        let mut buf = Vec::new();
        let mut out = Vec::with_capacity(count);
        for (c, s, e) in chunks(count) {
            self.fill_chunk(c, s, e, &mut buf);
            out.extend(buf.chunks(n.max(1)).map(|p| p.to_vec()));
        }
        if n == 0 {
            out = vec![Vec::new(); count];
        }
        out
    }
}

/// Korobov vector (1, g, g², …) mod n with g the integer nearest n(√5 − 1)/2
/// that is coprime to n.
fn korobov_generator(n: u64, dim: usize) -> Vec<u64> {
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let mut g = ((n as f64 * golden).round() as u64).max(1);
    while gcd(g, n) != 1 {
        g += 1;
    }
    let mut out = Vec::with_capacity(dim);
    let mut cur = 1u64 % n.max(1);
    for _ in 0..dim {
        out.push(cur);
        cur = ((cur as u128 * g as u128) % n as u128) as u64;
    }
    out
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Fixed-point phase to radians.
#[inline]
fn angle<T: Real>(x: u64) -> T {
    T::lit(x as f64 * TWO_POW_NEG_64) * T::lit(2.0) * T::PI()
}

/// w(x) = Σ a_j cos(2π x_{c(j)} + φ_j) + b for a torus point.
#[inline]
pub fn evaluate_point<T: Real>(amps: &AmplitudeSet<T>, point: &[u64]) -> T {
    let mut s = T::zero();
    for ((&a, &phi), &c) in amps.amplitudes.iter().zip(&amps.phases).zip(&amps.coordinates) {
        s = s + a * (angle::<T>(point[c]) + phi).cos();
    }
    amps.center + s
}

struct ChunkStats<T> {
    counts: Vec<u64>,
    sum: T,
    sum_sq: T,
    min: T,
    max: T,
    violations: usize,
    positive: usize,
    functional_sums: Vec<(f64, f64)>,
    samples: Option<Vec<T>>,
}

/// Pushforward of Haar measure on the subtorus `x = M t mod 1` under w.
pub fn sample_distribution<T: Real>(
    amps: &AmplitudeSet<T>,
    lattice: &RelationLattice,
    n_samples: usize,
    seed: u64,
    options: &SamplingOptions,
) -> Result<SampleResult<T>> {
    if n_samples == 0 {
        return Err(Error::Config("n_samples must be >= 1".into()));
    }
    if options.bins == 0 {
        return Err(Error::Config("histogram needs at least one bin".into()));
    }
    if lattice.n != amps.coordinate_count() {
        return Err(Error::Precondition(format!(
            "lattice has {} coordinates but the amplitude set uses {}",
            lattice.n,
            amps.coordinate_count()
        )));
    }
    let sampler = TorusSampler::new(lattice, seed, options.qmc.then_some(n_samples));
    let b = amps.center;
    let total = amps.total_amplitude();
    let (lo, hi) = (b - total, b + total);
    let bins = options.bins;
    let width = if total > T::zero() {
        (hi - lo) / T::from_usize(bins).unwrap()
    } else {
        T::one()
    };
    let dim = sampler.dimension().max(1);

    let partials: Vec<ChunkStats<T>> = chunks(n_samples)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(c, s, e)| {
            let mut buf = Vec::new();
            sampler.fill_chunk(c, s, e, &mut buf);
            let mut st = ChunkStats {
                counts: vec![0; bins],
                sum: T::zero(),
                sum_sq: T::zero(),
                min: T::infinity(),
                max: T::neg_infinity(),
                violations: 0,
                positive: 0,
                functional_sums: vec![(0.0, 0.0); options.functionals.len()],
                samples: options.keep_samples.then(|| Vec::with_capacity(e - s)),
            };
            for k in 0..e - s {
                let point = if sampler.dimension() == 0 {
                    &[][..]
                } else {
                    &buf[k * dim..(k + 1) * dim]
                };
                let w = evaluate_point(amps, point);
                if w < lo || w > hi {
                    st.violations += 1;
                }
                if w > T::zero() {
                    st.positive += 1;
                }
                let idx = ((w - lo) / width).floor().to_isize().unwrap_or(0);
                st.counts[idx.clamp(0, bins as isize - 1) as usize] += 1;
                st.sum = st.sum + w;
                st.sum_sq = st.sum_sq + (w - b) * (w - b);
                st.min = st.min.min(w);
                st.max = st.max.max(w);
                let wf = w.to_f64_lossy();
                for (acc, h) in st.functional_sums.iter_mut().zip(&options.functionals) {
                    let v = h.apply(wf);
                    acc.0 += v;
                    acc.1 += v * v;
                }
                if let Some(v) = st.samples.as_mut() {
                    v.push(w);
                }
            }
            st
        })
        .collect();

    let mut counts = vec![0u64; bins];
    let (mut sum, mut sum_sq) = (T::zero(), T::zero());
    let (mut min, mut max) = (T::infinity(), T::neg_infinity());
    let mut violations = 0;
    let mut positive = 0;
    let mut fsums = vec![(0.0, 0.0); options.functionals.len()];
    let mut samples = options.keep_samples.then(|| Vec::with_capacity(n_samples));
    for st in partials {
        for (c, x) in counts.iter_mut().zip(&st.counts) {
            *c += x;
        }
        sum = sum + st.sum;
        sum_sq = sum_sq + st.sum_sq;
        min = min.min(st.min);
        max = max.max(st.max);
        violations += st.violations;
        positive += st.positive;
        for (acc, x) in fsums.iter_mut().zip(&st.functional_sums) {
            acc.0 += x.0;
            acc.1 += x.1;
        }
        if let (Some(all), Some(part)) = (samples.as_mut(), st.samples) {
            all.extend(part);
        }
    }

    let nf = T::from_usize(n_samples).unwrap();
    let mean = sum / nf;
    let var = (sum_sq / nf - (mean - b) * (mean - b)).max(T::zero());
    let std = (var * nf / (nf - T::one()).max(T::one())).sqrt();

    let grid: Vec<T> = (0..bins)
        .map(|i| lo + width * (T::from_usize(i).unwrap() + T::lit(0.5)))
        .collect();
    let density: Vec<T> = counts
        .iter()
        .map(|&c| T::from_u64(c).unwrap() / (nf * width))
        .collect();
    let mass = density.iter().fold(T::zero(), |acc, &p| acc + p * width);
    let stats = summarize(&grid, &density, b);

    let nf64 = n_samples as f64;
    let functionals = options
        .functionals
        .iter()
        .zip(&fsums)
        .map(|(&h, &(s1, s2))| {
            let m = s1 / nf64;
            let v = (s2 / nf64 - m * m).max(0.0);
            FunctionalEstimate {
                functional: h,
                mean: m,
                std_error: (v / nf64).sqrt(),
            }
        })
        .collect();

    Ok(SampleResult {
        distribution: BiasDistribution {
            grid,
            density,
            mass,
            mean,
            center: b,
            positive_probability: T::from_usize(positive).unwrap() / nf,
            symmetry_defect: stats.symmetry_defect,
            method: Method::MonteCarlo,
            clipped_min: T::zero(),
            clipped_points: 0,
            fitted_constant: None,
            xi_max: None,
            panels: None,
        },
        n_samples,
        sample_mean: mean,
        sample_std: std,
        min,
        max,
        support_violations: violations,
        functionals,
        samples,
    })
}

/// Checks `k · x ≡ 0 (mod 1)` exactly for a fixed-point torus point.
pub fn satisfies_relation(relation: &[i64], point: &[u64]) -> bool {
    relation
        .iter()
        .zip(point)
        .fold(0u64, |acc, (&k, &x)| acc.wrapping_add((k as u64).wrapping_mul(x)))
        == 0
}
