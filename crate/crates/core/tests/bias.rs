use std::f64::consts::PI;

use holonomy_bias::bias::*;
use holonomy_bias::catalog::{SpectralLine, SpectrumCatalog};
use holonomy_bias::kernels::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn setup(eta: f64) -> (SmoothingKernel<f64>, KernelScale<f64>) {
    (SmoothingKernel::bump().unwrap(), KernelScale::tight(eta).unwrap())
}

fn catalog(lines: &[(f64, i64, u64)], zeros: &[(i64, u64)]) -> SpectrumCatalog {
    let raw = lines
        .iter()
        .map(|&(s, p, m)| SpectralLine::new(s, p, m))
        .chain(zeros.iter().map(|&(p, m)| SpectralLine::zero(p, m)));
    SpectrumCatalog::new(raw, vec![], false).unwrap()
}

fn cos1() -> HolonomyTestFunction<f64> {
    HolonomyTestFunction::cos(1)
}

#[test]
fn empty_catalog_bias_is_minus_two_c0() {
    let (k, sc) = setup(0.1);
    let b = bias_constant(&SpectrumCatalog::empty(), &cos1(), &k, &sc).unwrap();
    assert_eq!(b.value, -2.0 * b.c0);
    assert_eq!(b.value, b.zero_line_contribution - b.trivial_contribution);
    assert!((b.value + 2.0).abs() <= 2.0 * 0.1);
    for eta in [1e-2, 1e-3, 1e-4] {
        let (k, sc) = setup(eta);
        let b = bias_constant(&SpectrumCatalog::empty(), &cos1(), &k, &sc).unwrap();
        assert!((b.value + 2.0).abs() <= 2.0 * eta);
    }
}

#[test]
fn two_copies_of_the_zero_class_cancel_the_bias() {
    let (k, sc) = setup(0.1);
    let b = bias_constant(&catalog(&[], &[(1, 2)]), &cos1(), &k, &sc).unwrap();
    assert_eq!(b.value, 0.0);
    assert_eq!(b.zero_line_contribution, b.trivial_contribution);
}

#[test]
fn cos3_has_no_bias() {
    let (k, sc) = setup(0.1);
    let b = bias_constant(&SpectrumCatalog::empty(), &HolonomyTestFunction::cos(3), &k, &sc).unwrap();
    assert_eq!(b.value, 0.0);
}

#[test]
fn bias_mode_is_enforced() {
    let (k, sc) = setup(0.1);
    let with_mean = HolonomyTestFunction::from_coeffs([
        (0, Complex64::new(0.2, 0.0)),
        (1, Complex64::new(0.5, 0.0)),
        (-1, Complex64::new(0.5, 0.0)),
    ]);
    let e = bias_constant(&SpectrumCatalog::empty(), &with_mean, &k, &sc).unwrap_err();
    assert_eq!(e.exit_code(), 3);
    let complex = HolonomyTestFunction::from_coeffs([(1, Complex64::new(1.0, 0.0))]);
    assert!(bias_constant(&SpectrumCatalog::empty(), &complex, &k, &sc).is_err());
}

#[test]
fn signal_of_empty_catalog_is_the_bias() {
    let (k, sc) = setup(0.1);
    let m = SignalModel::new(&SpectrumCatalog::empty(), &cos1(), &k, &sc, 50.0).unwrap();
    for y in [0.1, 1.0, 7.3, 1000.0] {
        assert_eq!(m.eval(y).unwrap(), m.bias.value);
    }
    assert!(m.eval(0.05).is_err());
}

#[test]
fn single_class_closed_form() {
    let (k, sc) = setup(0.1);
    let (s, p, mult) = (2.5, -1, 3);
    let cat = catalog(&[(s, p, mult)], &[]);
    let m = SignalModel::new(&cat, &cos1(), &k, &sc, f64::INFINITY).unwrap();
    let c = c_s_eta_direct(&k, &sc, s).value;
    let fhat = 0.5;
    for y in [0.3, 1.0, 4.4] {
        let expect = 2.0 * mult as f64 * fhat * c.norm() * (s * y + c.arg()).cos();
        assert!((m.eval(y).unwrap() - m.bias.value - expect).abs() < 1e-13);
    }
    // s y + arg c = 2π gives the peak
    let y = (2.0 * PI - c.arg()) / s;
    let peak = m.eval(y).unwrap() - m.bias.value;
    assert!((peak - 2.0 * mult as f64 * fhat * c.norm()).abs() < 1e-13);
    // almost periodicity
    for y in [0.5, 2.0, 9.0] {
        let a = m.eval(y).unwrap();
        let b = m.eval(y + 2.0 * PI / s).unwrap();
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn three_class_signal_matches_term_by_term_oracle() {
    let (k, sc) = setup(0.1);
    let lines = [(1.3, 1, 1), (2.9, -1, 2), (4.1, 2, 1)];
    let f = HolonomyTestFunction::from_coeffs([
        (1, Complex64::new(0.5, 0.0)),
        (-1, Complex64::new(0.5, 0.0)),
        (2, Complex64::new(0.1, 0.3)),
        (-2, Complex64::new(0.1, -0.3)),
    ]);
    let cat = catalog(&lines, &[(1, 1)]);
    let y = 5.0;
    let got = eval_et(&cat, &f, &k, &sc, 10.0, y).unwrap();
    let b = bias_constant(&cat, &f, &k, &sc).unwrap().value;
    let mut oracle = b;
    for &(s, p, m) in &lines {
        let c = c_s_eta_direct(&k, &sc, s).value;
        let term = f.coeff(-p) * Complex64::new(0.0, s * y).exp() * c;
        oracle += 2.0 * m as f64 * term.re;
    }
    assert!((got - oracle).abs() < 1e-12, "{got} vs {oracle}");
    // cutoff drops |p| >= T and |s| >= T
    let truncated = eval_et(&cat, &f, &k, &sc, 2.0, y).unwrap();
    let c = c_s_eta_direct(&k, &sc, 1.3).value;
    let only = b + 2.0 * (f.coeff(-1) * Complex64::new(0.0, 1.3 * y).exp() * c).re;
    assert!((truncated - only).abs() < 1e-12);
}

#[test]
fn weyl_weight_examples() {
    assert!((weyl_weight(2f64.ln(), PI / 2.0).unwrap() - 0.4).abs() < 1e-15);
    let (u, t) = (0.7, 1.3);
    let z = Complex64::new(u, t);
    let product = 1.0 / ((Complex64::new(1.0, 0.0) - z.exp()).norm() * (Complex64::new(1.0, 0.0) - (-z).exp()).norm());
    assert!((weyl_weight(u, t).unwrap() - product).abs() < 1e-14);
    let u = 1.9;
    let sinh = 2.0 * (u / 2.0f64).sinh();
    assert!((weyl_weight(u, 0.0).unwrap() - 1.0 / (sinh * sinh)).abs() < 1e-14);
    assert!(weyl_weight(0.0, 0.0).is_err());
}

#[test]
fn geometric_plateau_example() {
    let (k, sc) = setup(0.1);
    let recs = [GeodesicRecord::primitive(1.0, PI).unwrap()];
    let f = cos1();
    for w in [Weighting::Plain, Weighting::LengthTimesF] {
        let g = geometric_bias_sum(&recs, |t| f.eval(t), &k, &sc, 2.0, true, w).unwrap();
        assert!((g.value + 1.0).abs() < 1e-15);
        assert!((g.normalized - (-2.0f64).exp() * g.value).abs() < 1e-18);
    }
    let edge = [GeodesicRecord::primitive(2.0 + 0.2, 0.3).unwrap()];
    let g = geometric_bias_sum(&edge, |t| f.eval(t), &k, &sc, 2.0, false, Weighting::Plain).unwrap();
    assert_eq!(g.value, 0.0);
    assert!(geometric_bias_sum(&recs, |t| f.eval(t), &k, &sc, 0.05, false, Weighting::Plain).is_err());
}

fn records() -> Vec<GeodesicRecord> {
    vec![
        GeodesicRecord::primitive(0.9, 0.4).unwrap(),
        GeodesicRecord::primitive(1.7, 2.2).unwrap(),
        GeodesicRecord::new(1.8, 0.8, 0.9).unwrap(),
        GeodesicRecord::primitive(2.95, 5.1).unwrap(),
        GeodesicRecord::new(3.4, 4.4, 1.7).unwrap(),
    ]
}

#[test]
fn weyl_tilde_matches_hand_rolled_sum() {
    let (k, sc) = setup(0.1);
    let f = HolonomyTestFunction::cos(2);
    let y = 3.0;
    let got = geometric_bias_sum(&records(), |t| f.eval(t), &k, &sc, y, false, Weighting::WeylTilde).unwrap();
    let mut oracle = 0.0;
    for r in records() {
        let l = r.length;
        let w = 1.0 / (2.0 * l.cosh() - 2.0 * r.holonomy.cos());
        let g = window_eval(WindowKind::G, &k, &sc, y, l).unwrap();
        oracle += r.primitive_length * w * (l.exp() + (-l).exp()) * g * (2.0 * r.holonomy).cos();
    }
    assert!((got.value - oracle).abs() < 1e-12);
    assert_eq!(got.records_used, 5);
}

#[test]
fn primitive_only_drops_iterates() {
    let (k, sc) = setup(0.1);
    let f = cos1();
    let y = 3.0;
    let all = geometric_bias_sum(&records(), |t| f.eval(t), &k, &sc, y, false, Weighting::Plain).unwrap();
    let prim = geometric_bias_sum(&records(), |t| f.eval(t), &k, &sc, y, true, Weighting::Plain).unwrap();
    let iterates: Vec<GeodesicRecord> = records().into_iter().filter(|r| !r.is_primitive()).collect();
    let rest = geometric_bias_sum(&iterates, |t| f.eval(t), &k, &sc, y, false, Weighting::Plain).unwrap();
    assert!((all.value - prim.value - rest.value).abs() < 1e-14);
    assert_eq!(prim.records_used, 3);
}

#[test]
fn geodesic_table_parsing() {
    let recs = parse_geodesics("length,holonomy,primitive_length\n1.2,0.5,1.2\n2.4,1.0,1.2\n").unwrap();
    assert_eq!(recs.len(), 2);
    assert_eq!(recs[1].iterate(), 2);
    assert_eq!(parse_geodesics("l,h,p\n1,1,1\n").unwrap_err().exit_code(), 2);
    assert_eq!(
        parse_geodesics("length,holonomy,primitive_length\n-1,0,1\n").unwrap_err().exit_code(),
        3
    );
    assert!(parse_geodesics("length,holonomy,primitive_length\n2.5,0,1.0\n").is_err());
}

#[test]
fn trace_main_terms_of_empty_catalog() {
    let (k, sc) = setup(0.1);
    let y = 2.5;
    let t = trace_rhs_spectral(&SpectrumCatalog::empty(), &cos1(), &k, &sc, y, Parity::Full).unwrap();
    let c0 = c0(&k, &sc).unwrap();
    assert!((t.value + y.exp() * c0).abs() < 1e-13);
    assert_eq!(t.spectral, 0.0);
    assert_eq!(t.dropped_error, TRACE_DROPPED_ERROR);
}

#[test]
fn trace_main_terms_regroup_signal() {
    let (k, sc) = setup(0.1);
    let cat = catalog(&[(1.3, 1, 1), (2.9, -1, 2), (3.3, 2, 1)], &[(1, 1), (2, 3)]);
    let f = HolonomyTestFunction::from_coeffs([
        (1, Complex64::new(0.5, 0.0)),
        (-1, Complex64::new(0.5, 0.0)),
        (2, Complex64::new(0.2, 0.0)),
        (-2, Complex64::new(0.2, 0.0)),
    ]);
    let y = 4.0;
    let t = trace_rhs_spectral(&cat, &f, &k, &sc, y, Parity::Full).unwrap();
    let b = bias_constant(&cat, &f, &k, &sc).unwrap();
    let e = eval_et(&cat, &f, &k, &sc, f64::INFINITY, y).unwrap();
    let ey = y.exp();
    let regrouped = ey * (e - b.value) + ey * b.zero_line_contribution
        - (f.coeff(1) + f.coeff(-1)).re * ey * b.c0;
    assert!((t.value - regrouped).abs() < 1e-12 * ey);
}

#[test]
fn trace_single_class_direct_formula() {
    let (k, sc) = setup(0.1);
    let (s, p) = (2.2, 1);
    let cat = catalog(&[(s, p, 2)], &[]);
    let f = HolonomyTestFunction::sin(1);
    let y = 4.0;
    for (parity, part) in [
        (Parity::Even, f.even_part()),
        (Parity::Odd, f.odd_part()),
        (Parity::Full, f.clone()),
    ] {
        let t = trace_rhs_spectral(&cat, &f, &k, &sc, y, parity).unwrap();
        let c = c_s_eta_direct(&k, &sc, s).value;
        let c0 = c_s_eta_direct(&k, &sc, 0.0).value.re;
        let direct = 2.0 * y.exp() * 2.0 * (part.coeff(-p) * Complex64::new(0.0, s * y).exp() * c).re
            - (part.coeff(1) + part.coeff(-1)).re * y.exp() * c0;
        assert!((t.value - direct).abs() < 1e-12 * y.exp(), "{parity:?}");
    }
}

#[test]
fn sign_flip_covariance() {
    let (k, sc) = setup(0.1);
    let cat = catalog(&[(1.3, 1, 1), (2.9, -1, 2)], &[(1, 3)]);
    let f = cos1();
    let g = f.scaled(-1.0);
    let bf = bias_constant(&cat, &f, &k, &sc).unwrap();
    let bg = bias_constant(&cat, &g, &k, &sc).unwrap();
    assert_eq!(bg.value, -bf.value);
    for y in [0.5, 3.0, 11.0] {
        assert_eq!(
            eval_et(&cat, &g, &k, &sc, 20.0, y).unwrap(),
            -eval_et(&cat, &f, &k, &sc, 20.0, y).unwrap()
        );
    }
    let a = geometric_bias_sum(&records(), |t| f.eval(t), &k, &sc, 3.0, false, Weighting::Plain).unwrap();
    let b = geometric_bias_sum(&records(), |t| g.eval(t), &k, &sc, 3.0, false, Weighting::Plain).unwrap();
    assert_eq!(b.value, -a.value);
}

#[test]
fn doubling_multiplicities() {
    let (k, sc) = setup(0.1);
    let cat = catalog(&[(1.3, 1, 1), (2.9, -1, 2)], &[(1, 3)]);
    let dbl = cat.with_doubled_multiplicities();
    let f = cos1();
    let a = bias_constant(&cat, &f, &k, &sc).unwrap();
    let b = bias_constant(&dbl, &f, &k, &sc).unwrap();
    assert_eq!(b.zero_line_contribution, 2.0 * a.zero_line_contribution);
    assert_eq!(b.trivial_contribution, a.trivial_contribution);
    for y in [0.7, 5.0] {
        let osc_a = eval_et(&cat, &f, &k, &sc, 20.0, y).unwrap() - a.value;
        let osc_b = eval_et(&dbl, &f, &k, &sc, 20.0, y).unwrap() - b.value;
        assert!((osc_b - 2.0 * osc_a).abs() < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn prop_merge_does_not_change_signal(
        raw in prop::collection::vec((1i32..30, -3i64..=3, 1u64..4, any::<bool>()), 1..6),
        y in 0.1f64..40.0,
    ) {
        let (k, sc) = setup(0.1);
        let f = HolonomyTestFunction::from_coeffs([
            (1, Complex64::new(0.5, 0.0)),
            (-1, Complex64::new(0.5, 0.0)),
            (2, Complex64::new(0.1, -0.2)),
            (-2, Complex64::new(0.1, 0.2)),
        ]);
        let lines: Vec<SpectralLine> = raw
            .iter()
            .map(|&(s, p, m, flip)| {
                let s = s as f64 * 0.37;
                if flip { SpectralLine::new(-s, -p, m) } else { SpectralLine::new(s, p, m) }
            })
            .collect();
        let unmerged: f64 = signal_terms(&lines, &f, &k, &sc, f64::INFINITY)
            .unwrap()
            .iter()
            .map(|t| t.eval(y))
            .sum();
        let cat = SpectrumCatalog::new(lines, vec![], false).unwrap();
        let merged: f64 = signal_terms(&cat.lines, &f, &k, &sc, f64::INFINITY)
            .unwrap()
            .iter()
            .map(|t| t.eval(y))
            .sum();
        prop_assert!((unmerged - merged).abs() < 1e-12 * (1.0 + unmerged.abs()));
    }

    #[test]
    fn prop_sign_flip_signal(y in 0.1f64..50.0, s1 in 0.5f64..9.0, s2 in 0.5f64..9.0) {
        let (k, sc) = setup(0.1);
        let cat = catalog(&[(s1, 1, 1), (s2 + 10.0, -1, 2)], &[(1, 1)]);
        let f = cos1();
        let a = eval_et(&cat, &f, &k, &sc, 50.0, y).unwrap();
        let b = eval_et(&cat, &f.scaled(-1.0), &k, &sc, 50.0, y).unwrap();
        prop_assert_eq!(a, -b);
    }
}
