use serde::{Deserialize, Serialize};

use crate::bias::SignalModel;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// How classes map to torus coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoordinateMode {
    /// Every class `(s, p)` gets its own coordinate.
    #[default]
    PerClass,
    /// Classes with equal `s` share one coordinate.
    SharedFrequency,
}

impl std::str::FromStr for CoordinateMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per-class" => Ok(CoordinateMode::PerClass),
            "shared-frequency" => Ok(CoordinateMode::SharedFrequency),
            other => Err(Error::Config(format!("unknown coordinate mode `{other}`"))),
        }
    }
}

/// Amplitudes a_j = 2·mult_j·|f̂(-p_j)c_{s_j,η}| and phases arg(f̂(-p_j)c_{s_j,η})
/// of the oscillating terms, ordered by max(|s_j|, |p_j|).
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeSet<T> {
    pub amplitudes: Vec<T>,
    pub phases: Vec<T>,
    /// Torus coordinate carrying term `j`.
    pub coordinates: Vec<usize>,
    pub center: T,
    /// `(s, p)` per term, empty for synthetic sets.
    pub classes: Vec<(T, i64)>,
    /// Frequency of each torus coordinate.
    pub coordinate_frequencies: Vec<T>,
    pub mode: CoordinateMode,
    /// Terms that share their `s` with another term.
    pub repeated_frequency_terms: Vec<usize>,
}

impl<T: Real> AmplitudeSet<T> {
    /// Amplitudes `a_j` on independent coordinates with zero phases.
    pub fn synthetic(amplitudes: Vec<T>, center: T) -> Result<Self> {
        if amplitudes.iter().any(|a| !(*a >= T::zero()) || !a.is_finite()) {
            return Err(Error::Constraint("amplitudes must be finite and >= 0".into()));
        }
        let n = amplitudes.len();
        Ok(Self {
            phases: vec![T::zero(); n],
            coordinates: (0..n).collect(),
            center,
            classes: Vec::new(),
            coordinate_frequencies: Vec::new(),
            mode: CoordinateMode::PerClass,
            repeated_frequency_terms: Vec::new(),
            amplitudes,
        })
    }

    /// Amplitudes of a precomputed signal. Coordinates follow the order of
    /// the signal terms (the truncated catalog's line order), which is the
    /// coordinate order of its relation lattice.
    pub fn from_signal(model: &SignalModel<T>, mode: CoordinateMode) -> Self {
        let terms = &model.terms;
        let mut coordinate_frequencies: Vec<T> = Vec::new();
        let mut coordinates = Vec::with_capacity(terms.len());
        for t in terms {
            let idx = match mode {
                CoordinateMode::PerClass => None,
                CoordinateMode::SharedFrequency => {
                    coordinate_frequencies.iter().position(|&s| s == t.s)
                }
            };
            coordinates.push(idx.unwrap_or_else(|| {
                coordinate_frequencies.push(t.s);
                coordinate_frequencies.len() - 1
            }));
        }
        let repeated_frequency_terms: Vec<usize> = (0..terms.len())
            .filter(|&i| terms.iter().enumerate().any(|(j, u)| j != i && u.s == terms[i].s))
            .collect();

        let mut order: Vec<usize> = (0..terms.len()).collect();
        let height = |i: usize| {
            let t = &terms[i];
            t.s.abs().max(T::from_i64(t.p.abs()).unwrap())
        };
        order.sort_by(|&i, &j| height(i).partial_cmp(&height(j)).unwrap());

        Self {
            amplitudes: order.iter().map(|&i| terms[i].amplitude()).collect(),
            phases: order.iter().map(|&i| terms[i].phase()).collect(),
            coordinates: order.iter().map(|&i| coordinates[i]).collect(),
            center: model.center(),
            classes: order.iter().map(|&i| (terms[i].s, terms[i].p)).collect(),
            coordinate_frequencies,
            mode,
            repeated_frequency_terms: repeated_frequency_terms
                .into_iter()
                .map(|i| order.iter().position(|&k| k == i).unwrap())
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// Number of torus coordinates referenced.
    pub fn coordinate_count(&self) -> usize {
        self.coordinates.iter().map(|c| c + 1).max().unwrap_or(0)
    }

    /// Σ a_j, summed in index order.
    pub fn total_amplitude(&self) -> T {
        self.amplitudes.iter().fold(T::zero(), |acc, &a| acc + a)
    }

    pub fn positive_count(&self) -> usize {
        self.amplitudes.iter().filter(|&&a| a > T::zero()).count()
    }

    /// `[b - Σa, b + Σa]`.
    pub fn support(&self) -> (T, T) {
        let a = self.total_amplitude();
        (self.center - a, self.center + a)
    }

    /// Σ a_j²/2, the variance of the limit law under independent coordinates.
    pub fn variance(&self) -> T {
        self.amplitudes.iter().map(|&a| a * a).sum::<T>() / T::lit(2.0)
    }
}
