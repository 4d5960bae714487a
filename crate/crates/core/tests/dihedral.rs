use std::f64::consts::PI;

use holonomy_bias::catalog::relation_lattice;
use holonomy_bias::dihedral::*;
use num_rational::BigRational;
use proptest::prelude::*;

type Z = CyclotomicElement;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Schoolbook product in Z[x]/(x⁴ − x² + 1).
fn poly_mul(x: [i128; 4], y: [i128; 4]) -> [i128; 4] {
    let mut c = [0i128; 7];
    for i in 0..4 {
        for j in 0..4 {
            c[i + j] += x[i] * y[j];
        }
    }
    for k in (4..7).rev() {
        // x^k = x^{k-2} − x^{k-4}
        let t = c[k];
        c[k] = 0;
        c[k - 2] += t;
        c[k - 4] -= t;
    }
    [c[0], c[1], c[2], c[3]]
}

/// log(2+√3) = 2 atanh((1+√3)/(3+√3)) by its power series.
fn log_unit_series() -> f64 {
    let r = 3f64.sqrt();
    let y = (1.0 + r) / (3.0 + r);
    let mut sum = 0.0;
    let mut pow = y;
    for k in 0..200 {
        sum += pow / (2 * k + 1) as f64;
        pow *= y * y;
    }
    2.0 * sum
}

fn fields() -> (ResidueField, ResidueField) {
    (residue_field(2, 1, 5).unwrap(), residue_field(4, 1, 17).unwrap())
}

fn coeff() -> impl Strategy<Value = i128> {
    -1000i128..1000
}

fn element() -> impl Strategy<Value = Z> {
    (coeff(), coeff(), coeff(), coeff()).prop_map(|(a, b, c, d)| Z::new(a, b, c, d))
}

proptest! {
    #[test]
    fn prop_ring_axioms(x in element(), y in element(), z in element()) {
        prop_assert_eq!((x * y).coeffs(), poly_mul(x.coeffs(), y.coeffs()));
        prop_assert_eq!(x * y, y * x);
        prop_assert_eq!((x * y) * z, x * (y * z));
        prop_assert_eq!(x * (y + z), x * y + x * z);
        prop_assert_eq!(x - x, Z::int(0));
        prop_assert_eq!(-x + x, Z::int(0));
    }

    #[test]
    fn prop_reduction_is_a_homomorphism(x in element(), y in element(), big in any::<bool>()) {
        let (f1, f2) = fields();
        let f = if big { f2 } else { f1 };
        prop_assert_eq!(f.reduce(&(x * y)), f.mul(f.reduce(&x), f.reduce(&y)));
        let (rx, ry) = (f.reduce(&x), f.reduce(&y));
        prop_assert_eq!(f.reduce(&(x + y)), f.elem(rx.0 as i128 + ry.0 as i128, rx.1 as i128 + ry.1 as i128));
    }

    #[test]
    fn prop_frobenius_fixes_everything(c0 in 0u64..17, c1 in 0u64..17) {
        let (_, f2) = fields();
        let x = FieldElement(c0, c1);
        prop_assert_eq!(f2.pow(x, f2.size()), x);
    }

    #[test]
    fn prop_dlog_round_trip_large_field(c0 in 0u64..17, c1 in 0u64..17) {
        prop_assume!(c0 != 0 || c1 != 0);
        let (_, f2) = fields();
        let g = f2.elem(7, 1);
        let x = FieldElement(c0, c1);
        let k = discrete_log(&f2, g, x).unwrap();
        prop_assert!(k < 288);
        prop_assert_eq!(f2.pow(g, k), x);
    }
}

#[test]
fn dlog_round_trip_small_field_exhaustive() {
    let (f1, _) = fields();
    let g = f1.elem(3, 1);
    let mut seen = std::collections::BTreeSet::new();
    for x in f1.elements().filter(|x| !x.is_zero()) {
        let k = discrete_log(&f1, g, x).unwrap();
        assert_eq!(f1.pow(g, k), x);
        assert!(seen.insert(k));
    }
    assert_eq!(seen.len(), 24);
    for x in f1.elements() {
        assert_eq!(f1.pow(x, 25), x);
    }
}

#[test]
fn cyclotomic_identities() {
    assert_eq!(Z::zeta() * Z::new(0, 0, 0, 1), Z::new(-1, 0, 1, 0));
    let s = Z::new(0, 2, 0, -1);
    assert_eq!(s, Z::sqrt3());
    assert_eq!(s * s, Z::int(3));
    assert_eq!(Z::fundamental_unit(), Z::int(2) + s);
    // (2+√3)(2−√3) = 1
    assert_eq!(Z::fundamental_unit() * (Z::int(2) - s), Z::one());
    let (f1, f2) = fields();
    assert_eq!(f1.reduce(&Z::fundamental_unit()), f1.elem(4, 2));
    assert_eq!(f2.reduce(&Z::fundamental_unit()), f2.elem(6, 2));
    assert_eq!(f1.reduce(&(Z::int(2) + Z::i())), f1.elem(0, 0));
    assert_eq!(f2.reduce(&(Z::int(4) + Z::i())), f2.elem(0, 0));
}

#[test]
fn orders_and_logs() {
    let (f1, f2) = fields();
    let g1 = f1.elem(3, 1);
    let g2 = f2.elem(7, 1);
    assert_eq!(element_order(&f1, g1).unwrap(), 24);
    assert_eq!(element_order(&f2, g2).unwrap(), 288);
    let zeta = f1.reduce(&Z::zeta());
    assert_eq!(discrete_log(&f1, g1, zeta).unwrap(), 14);
    assert_eq!(f1.pow(g1, 20), f1.elem(0, 2));
    assert_eq!(f1.pow(g1, 14), zeta);
    assert_eq!(discrete_log(&f1, g1, f1.elem(4, 2)).unwrap(), 16);
    assert_eq!(discrete_log(&f2, g2, f2.elem(6, 2)).unwrap(), 208);
    assert_eq!(discrete_log(&f2, g2, f2.reduce(&Z::zeta())).unwrap(), 24);
    assert_eq!(f2.pow(g2, 24), f2.reduce(&Z::zeta()));
}

#[test]
fn solution_and_global_unit_phase() {
    let (c1, c2) = standard_characters().unwrap();
    let sol = solve_hecke(&c1, &c2).unwrap();
    assert_eq!(sol.t_offset, q(11, 18));
    assert_eq!(sol.k1_residue, 4);
    assert!(sol.zeta_condition_holds(4));
    // 14/24 + 24/288 = 2/3
    assert_eq!(sol.zeta_phase, q(14, 24) + q(24, 288));
    assert_eq!(sol.unit_phase, q(16, 24) + q(208, 288));
    let log_u = log_unit_series();
    assert!((log_u - (2.0 + 3f64.sqrt()).ln()).abs() < 1e-15);
    for n in -10..10 {
        let t = 2.0 * PI * (n as f64 + 11.0 / 18.0) / log_u;
        assert!((sol.t(n) - t).abs() < 1e-12 * t.abs().max(1.0));
        let phase = t * log_u + 2.0 * PI * 25.0 / 18.0;
        let r = (phase / (2.0 * PI)).round();
        assert!((phase - 2.0 * PI * r).abs() < 1e-12);
        assert!(sol.unit_residual_phase(n).abs() < 1e-12);
    }
}

#[test]
fn progression_export() {
    let (c1, c2) = standard_characters().unwrap();
    let sol = solve_hecke(&c1, &c2).unwrap();
    assert_eq!(export_progression(&sol, 0..=9, 1, 1).unwrap_err().exit_code(), 3);
    let cat = export_progression(&sol, 0..=2, 4, 1).unwrap();
    let beta = 2.0 * PI / log_unit_series();
    assert!((cat.lines[0].s - 11.0 / 18.0 * beta).abs() < 1e-14 * beta);
    let coeffs: Vec<BigRational> = cat.lines.iter().map(|l| l.exact.as_ref().unwrap().coeffs[BETA_NAME].clone()).collect();
    assert_eq!(coeffs, vec![q(11, 18), q(29, 18), q(47, 18)]);
    let lat = relation_lattice(&cat).unwrap();
    assert_eq!(lat.relations.len(), 2);
    for k in lat.relations_i64().unwrap() {
        assert_eq!(11 * k[0] + 29 * k[1] + 47 * k[2], 0);
    }
    let ten = export_progression(&sol, 0..=9, 16, 2).unwrap();
    assert_eq!(ten.lines.len(), 10);
    assert!(ten.lines.iter().all(|l| l.p == 16 && l.mult == 2));
}

#[test]
fn scanned_generators_are_consistent() {
    let (c1, c2) = scanned_characters().unwrap();
    assert_eq!(element_order(&c1.field, c1.generator).unwrap(), 24);
    assert_eq!(element_order(&c2.field, c2.generator).unwrap(), 288);
    for (f, g) in [(&c1.field, c1.generator), (&c2.field, c2.generator)] {
        let earlier = f
            .elements()
            .take_while(|&x| x != g)
            .filter(|&x| !x.is_zero())
            .any(|x| element_order(f, x).unwrap() == f.group_order());
        assert!(!earlier);
    }
    let sol = solve_hecke(&c1, &c2).unwrap();
    assert!(sol.zeta_condition_holds(sol.k1_residue as i64));
    for n in 0..5 {
        assert!(sol.unit_residual_phase(n).abs() < 1e-12);
    }
}
