//! Exact integer relations among exact frequencies and the saturated lattice
//! spanning their annihilator.
//!
//! Frequencies are rational combinations of named basis values that are
//! treated as linearly independent over Q, so `k·s = 0` holds exactly iff
//! `k` lies in the integer left kernel of the coefficient matrix. Kernels are
//! read off from a unimodular row reduction of `[A | I]`, which yields a
//! basis of the full (hence saturated) integer kernel.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{ExactFrequency, SpectrumCatalog};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationLattice {
    /// Rows `k` with `Σ k_j s_j = 0`, in Hermite normal form.
    pub relations: Vec<Vec<BigInt>>,
    /// `n × r` matrix whose columns span the integer annihilator of the
    /// relations.
    pub subtorus_basis: Vec<Vec<BigInt>>,
    pub rank: usize,
    pub n: usize,
}

impl RelationLattice {
    pub fn identity(n: usize) -> Self {
        let subtorus_basis = (0..n)
            .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
            .collect();
        Self {
            relations: Vec::new(),
            subtorus_basis,
            rank: n,
            n,
        }
    }

    /// Column `j` of `M`.
    pub fn basis_column(&self, j: usize) -> Vec<BigInt> {
        self.subtorus_basis.iter().map(|row| row[j].clone()).collect()
    }

    /// `relations · M`, which must vanish.
    pub fn relation_products(&self) -> Vec<Vec<BigInt>> {
        self.relations
            .iter()
            .map(|k| {
                (0..self.rank)
                    .map(|j| {
                        k.iter()
                            .zip(&self.subtorus_basis)
                            .map(|(a, row)| a * &row[j])
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }

    pub fn relations_i64(&self) -> Option<Vec<Vec<i64>>> {
        self.relations
            .iter()
            .map(|r| r.iter().map(|x| x.to_i64()).collect())
            .collect()
    }

    pub fn subtorus_basis_i64(&self) -> Option<Vec<Vec<i64>>> {
        self.subtorus_basis
            .iter()
            .map(|r| r.iter().map(|x| x.to_i64()).collect())
            .collect()
    }

    /// Entries of `M` reduced mod 2^64, for fixed-point torus arithmetic.
    pub fn subtorus_basis_wrapping(&self) -> Vec<Vec<u64>> {
        let modulus = BigInt::one() << 64;
        self.subtorus_basis
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| x.mod_floor(&modulus).to_u64().expect("reduced below 2^64"))
                    .collect()
            })
            .collect()
    }
}

/// Relation lattice of the catalog's lines (one coordinate per line).
pub fn relation_lattice(catalog: &SpectrumCatalog) -> Result<RelationLattice> {
    let n = catalog.lines.len();
    if catalog.independence_declared {
        return Ok(RelationLattice::identity(n));
    }
    let exact: Option<Vec<ExactFrequency>> =
        catalog.lines.iter().map(|l| l.exact.clone()).collect();
    match exact {
        Some(freqs) => Ok(relation_lattice_from_frequencies(&freqs)),
        None => Err(Error::RelationRefused(
            "catalog has float frequencies and no independence declaration; \
             supply exact frequencies over a basis or set independence_declared"
                .into(),
        )),
    }
}

pub fn relation_lattice_from_frequencies(freqs: &[ExactFrequency]) -> RelationLattice {
    let n = freqs.len();
    let names: Vec<&String> = freqs
        .iter()
        .flat_map(|f| f.coeffs.keys())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let lcm = freqs
        .iter()
        .flat_map(|f| f.coeffs.values())
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let a: Vec<Vec<BigInt>> = freqs
        .iter()
        .map(|f| {
            names
                .iter()
                .map(|name| match f.coeffs.get(*name) {
                    Some(c) => (c * &lcm).to_integer(),
                    None => BigInt::zero(),
                })
                .collect()
        })
        .collect();

    let relations = hermite_rows(left_kernel(&a, names.len()), n);
    let subtorus = if relations.is_empty() {
        RelationLattice::identity(n).subtorus_basis
    } else {
        let transposed: Vec<Vec<BigInt>> = (0..n)
            .map(|j| relations.iter().map(|r| r[j].clone()).collect())
            .collect();
        let cols = hermite_rows(left_kernel(&transposed, relations.len()), n);
        (0..n)
            .map(|i| cols.iter().map(|c| c[i].clone()).collect())
            .collect()
    };
    let rank = n - relations.len();
    RelationLattice {
        relations,
        subtorus_basis: subtorus,
        rank,
        n,
    }
}

/// Basis of `{k ∈ Z^n : kᵀA = 0}` for an `n × cols` integer matrix.
fn left_kernel(a: &[Vec<BigInt>], cols: usize) -> Vec<Vec<BigInt>> {
    let n = a.len();
    let mut aug: Vec<Vec<BigInt>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| BigInt::from((i == j) as i64)));
            r
        })
        .collect();
    let rank = echelon(&mut aug, cols, false);
    aug.into_iter().skip(rank).map(|r| r[cols..].to_vec()).collect()
}

/// Hermite normal form of the row lattice spanned by `rows`.
fn hermite_rows(mut rows: Vec<Vec<BigInt>>, cols: usize) -> Vec<Vec<BigInt>> {
    let rank = echelon(&mut rows, cols, true);
    rows.truncate(rank);
    rows
}

/// Unimodular row reduction to echelon form on the first `cols` columns.
/// Pivots are made positive; with `reduce_above` entries above each pivot
/// are reduced into `[0, pivot)`. Returns the number of pivots.
fn echelon(rows: &mut [Vec<BigInt>], cols: usize, reduce_above: bool) -> usize {
    let mut pivot = 0;
    for col in 0..cols {
        if pivot == rows.len() {
            break;
        }
        loop {
            let best = (pivot..rows.len())
                .filter(|&i| !rows[i][col].is_zero())
                .min_by(|&i, &j| rows[i][col].abs().cmp(&rows[j][col].abs()));
            let Some(best) = best else { break };
            rows.swap(pivot, best);
            let mut done = true;
            for i in pivot + 1..rows.len() {
                if rows[i][col].is_zero() {
                    continue;
                }
                let q = rows[i][col].div_floor(&rows[pivot][col]);
                let (head, tail) = rows.split_at_mut(i);
                axpy(&mut tail[0], &q, &head[pivot]);
                if !tail[0][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if pivot == rows.len() || rows[pivot][col].is_zero() {
            continue;
        }
        if rows[pivot][col].is_negative() {
            for x in rows[pivot].iter_mut() {
                *x = -&*x;
            }
        }
        if reduce_above {
            for i in 0..pivot {
                let q = rows[i][col].div_floor(&rows[pivot][col]);
                if q.is_zero() {
                    continue;
                }
                let (head, tail) = rows.split_at_mut(pivot);
                axpy(&mut head[i], &q, &tail[0]);
            }
        }
        pivot += 1;
    }
    pivot
}

/// `dst -= q * src`.
fn axpy(dst: &mut [BigInt], q: &BigInt, src: &[BigInt]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d -= q * s;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn beta(n: i64, d: i64) -> ExactFrequency {
        ExactFrequency::single("beta", BigRational::new(n.into(), d.into())).unwrap()
    }

    fn ints(rows: &[Vec<BigInt>]) -> Vec<Vec<i64>> {
        rows.iter().map(|r| r.iter().map(|x| x.to_i64().unwrap()).collect()).collect()
    }

    #[test]
    fn progression_has_rank_one() {
        let lat = relation_lattice_from_frequencies(&[beta(11, 18), beta(29, 18), beta(47, 18)]);
        assert_eq!(lat.rank, 1);
        assert_eq!(ints(&lat.subtorus_basis), vec![vec![11], vec![29], vec![47]]);
        assert_eq!(lat.relations.len(), 2);
        assert!(lat.relation_products().iter().flatten().all(|x| x.is_zero()));
    }

    #[test]
    fn duplicate_frequency() {
        let lat = relation_lattice_from_frequencies(&[beta(1, 1), beta(1, 1)]);
        assert_eq!(lat.rank, 1);
        assert_eq!(ints(&lat.relations), vec![vec![1, -1]]);
        assert_eq!(ints(&lat.subtorus_basis), vec![vec![1], vec![1]]);
    }

    #[test]
    fn independent_basis_values() {
        let a = ExactFrequency::single("a", BigRational::from_integer(1.into())).unwrap();
        let b = ExactFrequency::single("b", BigRational::new(1.into(), 3.into())).unwrap();
        let lat = relation_lattice_from_frequencies(&[a, b]);
        assert_eq!(lat.rank, 2);
        assert!(lat.relations.is_empty());
        assert_eq!(ints(&lat.subtorus_basis), vec![vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn kernel_is_saturated() {
        // 2a and 4a: relation (2, -1); the annihilator is spanned by (1, 2)
        let lat = relation_lattice_from_frequencies(&[beta(2, 1), beta(4, 1)]);
        assert_eq!(ints(&lat.relations), vec![vec![2, -1]]);
        assert_eq!(ints(&lat.subtorus_basis), vec![vec![1], vec![2]]);
    }

    #[test]
    fn wrapping_basis_for_negative_entries() {
        let lat = relation_lattice_from_frequencies(&[beta(1, 1), beta(-1, 1)]);
        assert_eq!(ints(&lat.subtorus_basis), vec![vec![1], vec![-1]]);
        assert_eq!(lat.subtorus_basis_wrapping(), vec![vec![1], vec![u64::MAX]]);
    }
}
