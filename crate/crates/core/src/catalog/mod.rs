//! Spectral catalogs: principal-series lines `(s, p, mult)`, zero-parameter
//! lines, optional exact frequencies over named basis values, and the Weyl
//! type multiplicity check.

mod io;
mod lattice;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

pub use io::{load_catalog, parse_catalog, CatalogFormat};
pub use lattice::{relation_lattice, relation_lattice_from_frequencies, RelationLattice};

/// Named basis frequency (radians per unit length).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisFrequency {
    pub name: String,
    pub value: f64,
}

/// Exact rational combination of basis frequencies.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactFrequency {
    pub coeffs: BTreeMap<String, BigRational>,
}

impl ExactFrequency {
    pub fn new(coeffs: impl IntoIterator<Item = (String, BigRational)>) -> Result<Self> {
        let coeffs: BTreeMap<String, BigRational> =
            coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if coeffs.is_empty() {
            return Err(Error::Constraint(
                "exact frequency needs at least one nonzero coefficient".into(),
            ));
        }
        Ok(Self { coeffs })
    }

    /// c·name.
    pub fn single(name: &str, coeff: BigRational) -> Result<Self> {
        Self::new([(name.to_string(), coeff)])
    }

    pub fn negated(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(k, v)| (k.clone(), -v.clone())).collect(),
        }
    }

    /// Realized value; every term is rounded once from its exact rational.
    pub fn value(&self, basis: &[BasisFrequency]) -> Result<f64> {
        let mut total = 0.0;
        for (name, c) in &self.coeffs {
            let b = basis
                .iter()
                .find(|b| &b.name == name)
                .ok_or_else(|| Error::Basis(name.clone()))?;
            total += c.to_f64().unwrap_or(f64::NAN) * b.value;
        }
        Ok(total)
    }
}

impl fmt::Display for ExactFrequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(k, v)| format!("({})*{k}", format_rational(v)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `num/den`, always with an explicit denominator.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Accepts `num/den` or a bare integer.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let bad = || Error::Parse(format!("`{text}` is not a rational of the form num/den"));
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

/// One principal-series class `π_{is,p}` with its multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralLine {
    pub s: f64,
    pub exact: Option<ExactFrequency>,
    pub p: i64,
    pub mult: u64,
}

impl SpectralLine {
    pub fn new(s: f64, p: i64, mult: u64) -> Self {
        Self {
            s,
            exact: None,
            p,
            mult,
        }
    }

    pub fn zero(p: i64, mult: u64) -> Self {
        Self::new(0.0, p, mult)
    }

    /// Representative of the class `(s, p) ~ (-s, -p)`: `s > 0`, or `s = 0`
    /// and `p >= 0`.
    pub fn canonical(&self) -> Self {
        let flip = self.s < 0.0 || (self.s == 0.0 && self.p < 0);
        if !flip {
            return self.clone();
        }
        Self {
            s: if self.s == 0.0 { 0.0 } else { -self.s },
            exact: if self.s == 0.0 {
                None
            } else {
                self.exact.as_ref().map(ExactFrequency::negated)
            },
            p: -self.p,
            mult: self.mult,
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.s > 0.0 || (self.s == 0.0 && self.p >= 0)
    }

    /// max(|s|, |p|), the ordering key of the amplitude indexing.
    pub fn height(&self) -> f64 {
        self.s.abs().max(self.p.unsigned_abs() as f64)
    }
}

/// Canonicalized spectral data.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumCatalog {
    pub lines: Vec<SpectralLine>,
    pub zero_lines: Vec<SpectralLine>,
    pub basis: Vec<BasisFrequency>,
    pub independence_declared: bool,
}

impl SpectrumCatalog {
    pub fn empty() -> Self {
        Self {
            lines: Vec::new(),
            zero_lines: Vec::new(),
            basis: Vec::new(),
            independence_declared: false,
        }
    }

    /// Canonicalizes raw lines: picks class representatives, moves `s = 0`
    /// into the zero lines, merges duplicates by summing multiplicities, and
    /// sorts by `(s, p)`.
    pub fn new(
        raw: impl IntoIterator<Item = SpectralLine>,
        basis: Vec<BasisFrequency>,
        independence_declared: bool,
    ) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for b in &basis {
            if !seen.insert(b.name.clone()) {
                return Err(Error::Constraint(format!("basis `{}` declared twice", b.name)));
            }
            if !b.value.is_finite() {
                return Err(Error::Constraint(format!("basis `{}` is not finite", b.name)));
            }
        }

        let mut merged: BTreeMap<(OrdF64, i64), SpectralLine> = BTreeMap::new();
        for mut line in raw {
            if line.mult < 1 {
                return Err(Error::Constraint(format!(
                    "multiplicity must be >= 1 (line s = {}, p = {})",
                    line.s, line.p
                )));
            }
            if let Some(ex) = &line.exact {
                line.s = ex.value(&basis)?;
            }
            if !line.s.is_finite() {
                return Err(Error::Constraint(format!("spectral parameter {} is not finite", line.s)));
            }
            if line.s == 0.0 {
                line.exact = None;
                line.s = 0.0;
            }
            let line = line.canonical();
            match merged.entry((OrdF64(line.s), line.p)) {
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(line);
                }
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    let cur = o.get_mut();
                    if cur.exact != line.exact {
                        return Err(Error::Constraint(format!(
                            "conflicting duplicate lines at s = {}, p = {}",
                            line.s, line.p
                        )));
                    }
                    cur.mult = cur
                        .mult
                        .checked_add(line.mult)
                        .ok_or_else(|| Error::Constraint("multiplicity overflow".into()))?;
                }
            }
        }

        let (zero_lines, lines) = merged.into_values().partition(|l| l.s == 0.0);
        Ok(Self {
            lines,
            zero_lines,
            basis,
            independence_declared,
        })
    }

    /// Lines with `|s| < t` and `|p| < t`.
    pub fn truncated(&self, t: f64) -> Self {
        Self {
            lines: self
                .lines
                .iter()
                .filter(|l| l.s.abs() < t && (l.p.unsigned_abs() as f64) < t)
                .cloned()
                .collect(),
            ..self.clone()
        }
    }

    pub fn has_exact_frequencies(&self) -> bool {
        !self.lines.is_empty() && self.lines.iter().all(|l| l.exact.is_some())
    }

    pub fn with_doubled_multiplicities(&self) -> Self {
        let double = |v: &Vec<SpectralLine>| {
            v.iter()
                .map(|l| SpectralLine {
                    mult: l.mult * 2,
                    ..l.clone()
                })
                .collect()
        };
        Self {
            lines: double(&self.lines),
            zero_lines: double(&self.zero_lines),
            ..self.clone()
        }
    }

    /// Groups of line indices sharing the same float `s` (different `p`).
    pub fn repeated_frequencies(&self) -> Vec<Vec<usize>> {
        let mut groups: BTreeMap<OrdF64, Vec<usize>> = BTreeMap::new();
        for (i, l) in self.lines.iter().enumerate() {
            groups.entry(OrdF64(l.s)).or_default().push(i);
        }
        groups.into_values().filter(|g| g.len() > 1).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// A unit window `[R-1, R+1]` at weight `n` whose multiplicity count exceeds
/// `slack * volume * (R^2 + n^2) + slack`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeylViolation {
    pub n: i64,
    pub r: i64,
    pub count: u64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct WeylReport {
    pub violations: Vec<WeylViolation>,
}

impl WeylReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Warn-only check of the multiplicity bound. For each weight `n` the
/// parameters `ν` counted are `s` from lines `(s, n)`, `-s` from lines
/// `(s, -n)`, and `0` from zero lines with `|p| = |n|`.
pub fn validate_weyl(catalog: &SpectrumCatalog, volume: f64, slack: f64) -> Result<WeylReport> {
    if !(volume > 0.0) || !(slack > 0.0) {
        return Err(Error::Config(format!(
            "validate_weyl needs positive volume and slack, got {volume}, {slack}"
        )));
    }
    let mut by_weight: BTreeMap<i64, Vec<(f64, u64)>> = BTreeMap::new();
    for l in &catalog.lines {
        by_weight.entry(l.p).or_default().push((l.s, l.mult));
        by_weight.entry(-l.p).or_default().push((-l.s, l.mult));
    }
    for z in &catalog.zero_lines {
        by_weight.entry(z.p).or_default().push((0.0, z.mult));
        if z.p != 0 {
            by_weight.entry(-z.p).or_default().push((0.0, z.mult));
        }
    }

    let mut report = WeylReport::default();
    for (&n, nus) in &by_weight {
        let mut centers = BTreeSet::new();
        for &(nu, _) in nus {
            let lo = (nu - 1.0).ceil() as i64;
            let hi = (nu + 1.0).floor() as i64;
            centers.extend(lo..=hi);
        }
        for r in centers {
            let rf = r as f64;
            let count: u64 = nus
                .iter()
                .filter(|(nu, _)| *nu >= rf - 1.0 && *nu <= rf + 1.0)
                .map(|(_, m)| *m)
                .sum();
            let nf = n as f64;
            let bound = slack * volume * (rf * rf + nf * nf) + slack;
            if count as f64 > bound {
                report.violations.push(WeylViolation { n, r, count, bound });
            }
        }
    }
    Ok(report)
}
