//! Arithmetic in Z[ζ₁₂], its residue fields at the inert primes a + i, local
//! characters with exact root-of-unity values, and the unit conditions that
//! pin down an archimedean parameter progression.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::catalog::{format_rational, BasisFrequency, ExactFrequency, SpectralLine, SpectrumCatalog};
use crate::error::{Error, Result};

/// Name of the basis frequency 2π/log(2+√3) in exported catalogs.
pub const BETA_NAME: &str = "beta";
pub const BETA_TAG: &str = "2*pi/log(2+sqrt3)";

/// `a₀ + a₁ζ + a₂ζ² + a₃ζ³` with ζ = e^{2πi/12}, reduced by ζ⁴ = ζ² − 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct CyclotomicElement(pub [i128; 4]);

impl CyclotomicElement {
    pub const fn new(a0: i128, a1: i128, a2: i128, a3: i128) -> Self {
        Self([a0, a1, a2, a3])
    }

    pub const fn int(n: i128) -> Self {
        Self([n, 0, 0, 0])
    }

    pub const fn one() -> Self {
        Self::int(1)
    }

    pub const fn zeta() -> Self {
        Self([0, 1, 0, 0])
    }

    /// i = ζ³.
    pub const fn i() -> Self {
        Self([0, 0, 0, 1])
    }

    /// √3 = 2ζ − ζ³.
    pub const fn sqrt3() -> Self {
        Self([0, 2, 0, -1])
    }

    /// 2 + √3, the fundamental unit.
    pub const fn fundamental_unit() -> Self {
        Self([2, 2, 0, -1])
    }

    pub fn coeffs(&self) -> [i128; 4] {
        self.0
    }

    /// Product, or `None` on `i128` overflow.
    pub fn checked_mul(&self, rhs: &Self) -> Option<Self> {
        let mut d = [0i128; 7];
        for (i, &x) in self.0.iter().enumerate() {
            for (j, &y) in rhs.0.iter().enumerate() {
                d[i + j] = d[i + j].checked_add(x.checked_mul(y)?)?;
            }
        }
        // ζ^k = ζ^{k-2} − ζ^{k-4}
        for k in (4..7).rev() {
            let c = d[k];
            d[k - 2] = d[k - 2].checked_add(c)?;
            d[k - 4] = d[k - 4].checked_sub(c)?;
            d[k] = 0;
        }
        Some(Self([d[0], d[1], d[2], d[3]]))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = *self;
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            e >>= 1;
            if e > 0 {
                base = base * base;
            }
        }
        acc
    }
}

/// Exact product reduced to degree ≤ 3.
pub fn cyclo_mul(x: CyclotomicElement, y: CyclotomicElement) -> CyclotomicElement {
    x * y
}

impl Mul for CyclotomicElement {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(&rhs)
            .expect("cyclotomic product overflows i128")
    }
}

impl Add for CyclotomicElement {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|k| self.0[k] + rhs.0[k]))
    }
}

impl Sub for CyclotomicElement {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|k| self.0[k] - rhs.0[k]))
    }
}

impl Neg for CyclotomicElement {
    type Output = Self;

    fn neg(self) -> Self {
        Self(self.0.map(|c| -c))
    }
}

impl fmt::Display for CyclotomicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a0, a1, a2, a3] = self.0;
        write!(f, "{a0} + {a1}z + {a2}z^2 + {a3}z^3")
    }
}

/// Residue class `c₀ + c₁ζ` in a residue field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FieldElement(pub u64, pub u64);

impl FieldElement {
    pub fn is_zero(&self) -> bool {
        self.0 == 0 && self.1 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}z", self.0, self.1)
    }
}

/// Z[ζ₁₂]/𝔭 for 𝔭 = (a + i) with q = a² + 1 prime and inert in Q(√3).
/// From a + ζ³ ∈ 𝔭: ζ³ ≡ −a, and then ζ² ≡ 1 − aζ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ResidueField {
    pub a: u64,
    pub q: u64,
}

impl ResidueField {
    pub fn size(&self) -> u64 {
        self.q * self.q
    }

    pub fn group_order(&self) -> u64 {
        self.q * self.q - 1
    }

    /// `(c₀, c₁)` with ζ² ≡ c₀ + c₁ζ.
    pub fn reduction_rule(&self) -> (u64, u64) {
        (1 % self.q, (self.q - self.a % self.q) % self.q)
    }

    /// Residue of ζ³.
    pub fn zeta_cubed(&self) -> u64 {
        (self.q - self.a % self.q) % self.q
    }

    pub fn elem(&self, c0: i128, c1: i128) -> FieldElement {
        let q = self.q as i128;
        FieldElement(c0.rem_euclid(q) as u64, c1.rem_euclid(q) as u64)
    }

    pub fn one(&self) -> FieldElement {
        self.elem(1, 0)
    }

    pub fn minus_one(&self) -> FieldElement {
        self.elem(-1, 0)
    }

    pub fn reduce(&self, x: &CyclotomicElement) -> FieldElement {
        let q = self.q as i128;
        let a = self.a as i128;
        let [a0, a1, a2, a3] = x.0.map(|c| c.rem_euclid(q));
        self.elem(a0 + a2 - a * a3, a1 - a * a2)
    }

    pub fn mul(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        let q = self.q as u128;
        let (x0, x1, y0, y1) = (x.0 as u128, x.1 as u128, y.0 as u128, y.1 as u128);
        let a = self.a as u128 % q;
        let t = x1 * y1 % q;
        let c0 = (x0 * y0 + t) % q;
        let c1 = (x0 * y1 + x1 * y0 + (q - a) * t) % q;
        FieldElement(c0 as u64, c1 as u64)
    }

    pub fn pow(&self, x: FieldElement, mut e: u64) -> FieldElement {
        let mut base = x;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Elements in lexicographic order of `(c₀, c₁)`.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).flat_map(move |c0| (0..self.q).map(move |c1| FieldElement(c0, c1)))
    }
}

/// Builds the residue field of `a + b·i`; only `b = 1` is supported.
pub fn residue_field(a: u64, b: u64, q: u64) -> Result<ResidueField> {
    if b != 1 {
        return Err(Error::Precondition(format!("only primes a + i are supported, got b = {b}")));
    }
    if a.checked_mul(a).and_then(|x| x.checked_add(1)) != Some(q) {
        return Err(Error::Precondition(format!("norm mismatch: {a}^2 + 1 != {q}")));
    }
    if !is_prime(q) {
        return Err(Error::Precondition(format!("{q} is not prime")));
    }
    // 3 must be a non-residue mod q for the prime to stay inert in Q(ζ₁₂)/Q(i)
    if q == 2 || mod_pow(3 % q, (q - 1) / 2, q) != q - 1 {
        return Err(Error::Precondition(format!("3 is a square mod {q}; {a} + i splits")));
    }
    Ok(ResidueField { a, q })
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    acc
}

/// Multiplicative order of a nonzero element.
pub fn element_order(field: &ResidueField, x: FieldElement) -> Result<u64> {
    if x.is_zero() {
        return Err(Error::Precondition("zero has no multiplicative order".into()));
    }
    let n = field.group_order();
    let mut best = n;
    for d in 1..=n {
        if n % d == 0 && d < best && field.pow(x, d) == field.one() {
            best = d;
            break;
        }
    }
    Ok(best)
}

/// `k ∈ [0, q² − 1)` with `base^k = target`, by exhaustive search.
pub fn discrete_log(field: &ResidueField, base: FieldElement, target: FieldElement) -> Result<u64> {
    if target.is_zero() {
        return Err(Error::Precondition("discrete log of zero".into()));
    }
    if element_order(field, base)? != field.group_order() {
        return Err(Error::Precondition(format!("{base} does not generate the unit group")));
    }
    let mut acc = field.one();
    for k in 0..field.group_order() {
        if acc == target {
            return Ok(k);
        }
        acc = field.mul(acc, base);
    }
    unreachable!("a generator reaches every nonzero element")
}

/// First generator in lexicographic `(c₀, c₁)` order.
pub fn find_generator(field: &ResidueField) -> FieldElement {
    field
        .elements()
        .find(|&x| !x.is_zero() && element_order(field, x).ok() == Some(field.group_order()))
        .expect("finite field unit groups are cyclic")
}

/// `r mod 1` in `[0, 1)`.
pub fn frac(r: &BigRational) -> BigRational {
    r - r.floor()
}

/// Local character on (Z[ζ₁₂]/𝔭)^× fixed by `χ(generator) = e^{2πi·image}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalCharacter {
    pub field: ResidueField,
    pub generator: FieldElement,
    pub image: BigRational,
}

impl LocalCharacter {
    /// χ(generator) = ζ_n, a primitive n-th root of unity.
    pub fn primitive(field: ResidueField, generator: FieldElement, n: u64) -> Self {
        Self {
            field,
            generator,
            image: BigRational::new(BigInt::one(), BigInt::from(n)),
        }
    }

    /// Exponent `r ∈ [0, 1)` with `χ(x) = e^{2πi r}`.
    pub fn eval(&self, x: FieldElement) -> Result<BigRational> {
        let k = discrete_log(&self.field, self.generator, x)?;
        Ok(frac(&(&self.image * BigInt::from(k))))
    }

    pub fn eval_cyclotomic(&self, x: &CyclotomicElement) -> Result<BigRational> {
        self.eval(self.field.reduce(x))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlaceData {
    pub q: u64,
    pub a: u64,
    pub generator: FieldElement,
    /// Exponent r of χ(generator) = e^{2πi r}, as "num/den".
    pub image: String,
    pub dlog_zeta: u64,
    pub dlog_unit: u64,
    pub dlog_minus_one: u64,
    pub zeta_image: String,
    pub unit_image: String,
}

/// Archimedean data making χ trivial on the units: `k₁ ≡ residue (mod 12)`
/// and `t₁(n) = scale·(n + offset)` with `scale = 2π/log(2+√3)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeckeSolution {
    pub k1_residue: u64,
    pub k1_modulus: u64,
    pub t_offset: BigRational,
    pub t_scale: f64,
    /// Σ of the finite-place exponents at ζ₁₂ and at 2+√3.
    pub zeta_phase: BigRational,
    pub unit_phase: BigRational,
    pub places: Vec<PlaceData>,
}

/// log(2 + √3) = acosh 2.
pub fn log_fundamental_unit() -> f64 {
    2f64.acosh()
}

/// 2π/log(2 + √3).
pub fn beta() -> f64 {
    2.0 * std::f64::consts::PI / log_fundamental_unit()
}

impl HeckeSolution {
    /// t₁(n) = 2π(n + offset)/log(2 + √3).
    pub fn t(&self, n: i64) -> f64 {
        let r = BigRational::from_integer(n.into()) + &self.t_offset;
        r.to_f64().unwrap() * self.t_scale
    }

    /// Phase of the global character at 2+√3, reduced to (−π, π]:
    /// t₁(n)·log(2+√3) + 2π·unit_phase.
    pub fn unit_residual_phase(&self, n: i64) -> f64 {
        let two_pi = 2.0 * std::f64::consts::PI;
        let finite = frac(&self.unit_phase).to_f64().unwrap();
        let total = self.t(n) * log_fundamental_unit() + two_pi * finite;
        let r = total.rem_euclid(two_pi);
        if r > std::f64::consts::PI {
            r - two_pi
        } else {
            r
        }
    }

    /// Checks χ_{p1}(ζ)χ_{p2}(ζ)·ζ^{k₁} = 1 exactly for `k1`.
    pub fn zeta_condition_holds(&self, k1: i64) -> bool {
        let r = &self.zeta_phase + BigRational::new(k1.into(), 12.into());
        frac(&r).is_zero()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::json!({
            "k1_congruence": {"residue": self.k1_residue, "modulus": self.k1_modulus},
            "t_offset": format_rational(&self.t_offset),
            "t_scale": self.t_scale,
            "t_scale_symbolic": BETA_TAG,
            "zeta_phase": format_rational(&self.zeta_phase),
            "unit_phase": format_rational(&self.unit_phase),
            "places": self.places,
        })
    }
}

/// Solves the unit conditions for two local characters.
pub fn solve_hecke(char1: &LocalCharacter, char2: &LocalCharacter) -> Result<HeckeSolution> {
    let zeta = CyclotomicElement::zeta();
    let unit = CyclotomicElement::fundamental_unit();
    let half = BigRational::new(1.into(), 2.into());
    let mut zeta_phase = BigRational::zero();
    let mut unit_phase = BigRational::zero();
    let mut places = Vec::new();
    for ch in [char1, char2] {
        let field = &ch.field;
        let minus_one = field.minus_one();
        let at_minus_one = ch.eval(minus_one)?;
        if at_minus_one != half {
            return Err(Error::Precondition(format!(
                "character at q = {} sends -1 to e^(2 pi i {}), not -1",
                field.q,
                format_rational(&at_minus_one)
            )));
        }
        let z = ch.eval_cyclotomic(&zeta)?;
        let u = ch.eval_cyclotomic(&unit)?;
        places.push(PlaceData {
            q: field.q,
            a: field.a,
            generator: ch.generator,
            image: format_rational(&ch.image),
            dlog_zeta: discrete_log(field, ch.generator, field.reduce(&zeta))?,
            dlog_unit: discrete_log(field, ch.generator, field.reduce(&unit))?,
            dlog_minus_one: discrete_log(field, ch.generator, minus_one)?,
            zeta_image: format_rational(&z),
            unit_image: format_rational(&u),
        });
        zeta_phase += z;
        unit_phase += u;
    }

    // χ_f(ζ)·ζ^{k₁} = 1  ⇔  k₁ ≡ −12·zeta_phase (mod 12)
    let twelve = BigRational::from_integer(12.into());
    let k1 = -(&zeta_phase * &twelve);
    if !k1.is_integer() {
        return Err(Error::Precondition(format!(
            "no k1 solves the condition at zeta: phase {} is not a multiple of 1/12",
            format_rational(&zeta_phase)
        )));
    }
    let k1_residue = k1.to_integer().mod_floor(&BigInt::from(12)).to_u64().unwrap();

    // χ_f(u)·|u|^{i t} = 1  ⇔  t·log u ≡ −2π·unit_phase (mod 2π)
    let t_offset = frac(&(-&unit_phase));
    Ok(HeckeSolution {
        k1_residue,
        k1_modulus: 12,
        t_offset,
        t_scale: beta(),
        zeta_phase,
        unit_phase,
        places,
    })
}

/// The two fields and characters of the worked construction:
/// χ₁(ζ+3) = ζ₂₄ at 2+i and χ₂(7+ζ) = ζ₂₈₈ at 4+i.
pub fn standard_characters() -> Result<(LocalCharacter, LocalCharacter)> {
    let f1 = residue_field(2, 1, 5)?;
    let f2 = residue_field(4, 1, 17)?;
    Ok((
        LocalCharacter::primitive(f1, f1.elem(3, 1), 24),
        LocalCharacter::primitive(f2, f2.elem(7, 1), 288),
    ))
}

/// Same construction with the lexicographically first generators.
pub fn scanned_characters() -> Result<(LocalCharacter, LocalCharacter)> {
    let f1 = residue_field(2, 1, 5)?;
    let f2 = residue_field(4, 1, 17)?;
    Ok((
        LocalCharacter::primitive(f1, find_generator(&f1), 24),
        LocalCharacter::primitive(f2, find_generator(&f2), 288),
    ))
}

/// Catalog with lines `s = (n + offset)·β`, weight `p_weight`, for `n` in
/// `n_range` (inclusive).
pub fn export_progression(
    sol: &HeckeSolution,
    n_range: std::ops::RangeInclusive<i64>,
    p_weight: i64,
    mult: u64,
) -> Result<SpectrumCatalog> {
    if p_weight.rem_euclid(sol.k1_modulus as i64) != sol.k1_residue as i64 {
        return Err(Error::Constraint(format!(
            "weight {p_weight} is not {} mod {}",
            sol.k1_residue, sol.k1_modulus
        )));
    }
    if mult < 1 {
        return Err(Error::Constraint("multiplicity must be >= 1".into()));
    }
    let mut lines = Vec::new();
    for n in n_range {
        let coeff = BigRational::from_integer(n.into()) + &sol.t_offset;
        if coeff.is_zero() {
            continue;
        }
        let exact = ExactFrequency::single(BETA_NAME, coeff)?;
        lines.push(SpectralLine {
            s: 0.0,
            exact: Some(exact),
            p: p_weight,
            mult,
        });
    }
    let basis = vec![BasisFrequency {
        name: BETA_NAME.into(),
        value: sol.t_scale,
    }];
    SpectrumCatalog::new(lines, basis, false)
}
