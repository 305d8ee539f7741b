//! Real quadratic fields k = Q(√m) and their elements.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{is_squarefree, kronecker};
use crate::error::{Error, Result};
use crate::forms::{ClassGroupData, NarrowClassGroup};

/// The element a + b√m with exact rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    pub a: BigRational,
    pub b: BigRational,
}

impl FieldElement {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        FieldElement { a, b }
    }

    pub fn from_ints(a: i64, b: i64) -> Self {
        FieldElement::new(BigRational::from_integer(a.into()), BigRational::from_integer(b.into()))
    }

    /// (a + b√m)/den
    pub fn from_frac(a: i64, b: i64, den: i64) -> Self {
        FieldElement::new(
            BigRational::new(a.into(), den.into()),
            BigRational::new(b.into(), den.into()),
        )
    }

    pub fn one() -> Self {
        FieldElement::from_ints(1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Conjugate a − b√m.
    pub fn conj(&self) -> Self {
        FieldElement::new(self.a.clone(), -self.b.clone())
    }

    /// Renders as "a+b√m" with the given radicand.
    pub fn render(&self, m: i64) -> String {
        let a = fmt_rat(&self.a);
        if self.b.is_zero() {
            return a;
        }
        let sb = if self.b.is_negative() { "-" } else { "+" };
        let babs = self.b.abs();
        let bs = if babs.is_one() { String::new() } else { fmt_rat(&babs) };
        if self.a.is_zero() {
            let sign = if self.b.is_negative() { "-" } else { "" };
            return format!("{sign}{bs}√{m}");
        }
        format!("{a}{sb}{bs}√{m}")
    }
}

fn fmt_rat(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, o: &FieldElement) -> FieldElement {
        FieldElement::new(&self.a + &o.a, &self.b + &o.b)
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, o: &FieldElement) -> FieldElement {
        FieldElement::new(&self.a - &o.a, &self.b - &o.b)
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement::new(-self.a.clone(), -self.b.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntegralBasis {
    /// {1, √m}
    Sqrt,
    /// {1, (1+√m)/2}
    HalfSqrt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FundamentalUnitData {
    pub norm_sign: i32,
    pub totally_positive: bool,
    pub coeffs: Option<FieldElement>,
    pub tp_unit_index: u32,
}

#[derive(Clone, Debug)]
pub struct RealQuadraticField {
    pub m: i64,
    pub d_k: i64,
    pub omega_mode: IntegralBasis,
    pub cf_period_parity: Parity,
    pub unit: FundamentalUnitData,
    pub class_group: ClassGroupData,
    pub t: u32,
    pub(crate) narrow: NarrowClassGroup,
    eps: FieldElement,
}

pub fn make_field(m: i64) -> Result<RealQuadraticField> {
    if m <= 1 {
        return Err(Error::MTooSmall(m));
    }
    if !is_squarefree(m as u64) {
        return Err(Error::NotSquarefree(m));
    }
    let omega_mode = if m % 4 == 1 { IntegralBasis::HalfSqrt } else { IntegralBasis::Sqrt };
    let d_k = if m % 4 == 1 { m } else { 4 * m };
    let (eps, period) = unit_by_continued_fraction(m, omega_mode);
    let norm_sign = if period % 2 == 1 { -1 } else { 1 };
    let cf_period_parity = if period % 2 == 1 { Parity::Odd } else { Parity::Even };
    let tp = norm_sign == 1;
    let unit = FundamentalUnitData {
        norm_sign,
        totally_positive: tp,
        coeffs: Some(eps.clone()),
        tp_unit_index: if tp { 2 } else { 4 },
    };
    let narrow = NarrowClassGroup::new(d_k);
    let class_group = narrow.wide_data(norm_sign);
    let t = if d_k % 8 == 1 { 2 } else { 1 };
    Ok(RealQuadraticField {
        m,
        d_k,
        omega_mode,
        cf_period_parity,
        unit,
        class_group,
        t,
        narrow,
        eps,
    })
}

/// Continued fraction of the basis generator ω. Returns the fundamental unit
/// ε > 1 and the period length.
fn unit_by_continued_fraction(m: i64, mode: IntegralBasis) -> (FieldElement, usize) {
    // ω = (P0 + √m)/Q0
    let (p0, q0) = match mode {
        IntegralBasis::HalfSqrt => (1i64, 2i64),
        IntegralBasis::Sqrt => (0, 1),
    };
    let sq = m.sqrt();
    let (mut p, mut q) = (p0, q0);
    // convergents h/k of the expansion of ω
    let (mut h0, mut h1) = (BigInt::one(), BigInt::zero());
    let (mut k0, mut k1) = (BigInt::zero(), BigInt::one());
    let half = BigRational::new(1.into(), 2.into());
    let mut steps = 0usize;
    let mut unit: Option<FieldElement> = None;
    let mut seen = std::collections::HashMap::new();
    loop {
        if let Some(&first) = seen.get(&(p, q)) {
            let period = steps - first;
            return (unit.expect("unit found within one period"), period);
        }
        seen.insert((p, q), steps);
        let a = Integer::div_floor(&(p + sq), &q);
        let h = BigInt::from(a) * &h0 + &h1;
        let k = BigInt::from(a) * &k0 + &k1;
        h1 = std::mem::replace(&mut h0, h);
        k1 = std::mem::replace(&mut k0, k);
        if unit.is_none() {
            // h − k·ω
            let x = match mode {
                IntegralBasis::HalfSqrt => FieldElement::new(
                    BigRational::from_integer(h0.clone()) - BigRational::from_integer(k0.clone()) * &half,
                    -BigRational::from_integer(k0.clone()) * &half,
                ),
                IntegralBasis::Sqrt => FieldElement::new(
                    BigRational::from_integer(h0.clone()),
                    -BigRational::from_integer(k0.clone()),
                ),
            };
            let n = &x.a * &x.a - BigRational::from_integer(m.into()) * &x.b * &x.b;
            if n.abs().is_one() {
                unit = Some(FieldElement::new(x.a.abs(), x.b.abs()));
            }
        }
        p = a * q - p;
        q = (m - p * p) / q;
        steps += 1;
    }
}

impl RealQuadraticField {
    pub fn m_rat(&self) -> BigRational {
        BigRational::from_integer(self.m.into())
    }

    /// The fundamental unit ε > 1.
    pub fn eps(&self) -> &FieldElement {
        &self.eps
    }

    pub fn h(&self) -> u64 {
        self.class_group.h
    }

    pub fn narrow_class_number(&self) -> usize {
        self.narrow.order()
    }

    pub fn mul(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        FieldElement::new(
            &x.a * &y.a + self.m_rat() * &x.b * &y.b,
            &x.a * &y.b + &x.b * &y.a,
        )
    }

    pub fn norm(&self, x: &FieldElement) -> BigRational {
        &x.a * &x.a - self.m_rat() * &x.b * &x.b
    }

    pub fn trace(&self, x: &FieldElement) -> BigRational {
        &x.a + &x.a
    }

    pub fn inv(&self, x: &FieldElement) -> FieldElement {
        let n = self.norm(x);
        assert!(!n.is_zero(), "inverse of zero");
        FieldElement::new(&x.a / &n, -(&x.b / &n))
    }

    pub fn div(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        self.mul(x, &self.inv(y))
    }

    pub fn pow(&self, x: &FieldElement, e: i64) -> FieldElement {
        let base = if e < 0 { self.inv(x) } else { x.clone() };
        let mut r = FieldElement::one();
        for _ in 0..e.unsigned_abs() {
            r = self.mul(&r, &base);
        }
        r
    }

    pub fn product<'a, I: IntoIterator<Item = &'a FieldElement>>(&self, xs: I) -> FieldElement {
        xs.into_iter().fold(FieldElement::one(), |acc, x| self.mul(&acc, x))
    }

    /// Both real embeddings, as floats.
    pub fn embeddings(&self, x: &FieldElement) -> (f64, f64) {
        let r = (self.m as f64).sqrt();
        let a = x.a.to_f64().unwrap_or(f64::NAN);
        let b = x.b.to_f64().unwrap_or(f64::NAN);
        (a + b * r, a - b * r)
    }

    /// Exact sign of each real embedding: (sign σ₁(x), sign σ₂(x)).
    pub fn signs(&self, x: &FieldElement) -> (i32, i32) {
        let n = self.norm(x);
        assert!(!n.is_zero());
        // σ₁σ₂ = N(x), σ₁+σ₂ = 2a; when N < 0 the larger embedding is σ₁ iff b > 0
        if n.is_positive() {
            let s = if x.a.is_positive() { 1 } else { -1 };
            (s, s)
        } else if x.b.is_positive() {
            (1, -1)
        } else {
            (-1, 1)
        }
    }

    pub fn is_totally_positive(&self, x: &FieldElement) -> bool {
        !x.is_zero() && self.norm(x).is_positive() && x.a.is_positive()
    }

    pub fn is_integer(&self, x: &FieldElement) -> bool {
        if x.a.is_integer() && x.b.is_integer() {
            return true;
        }
        let two = BigInt::from(2);
        self.omega_mode == IntegralBasis::HalfSqrt && x.a.denom() == &two && x.b.denom() == &two
    }

    /// The integral basis generator ω.
    pub fn omega(&self) -> FieldElement {
        match self.omega_mode {
            IntegralBasis::HalfSqrt => FieldElement::from_frac(1, 1, 2),
            IntegralBasis::Sqrt => FieldElement::from_ints(0, 1),
        }
    }

    /// (c1, c0) with ω² + c1·ω + c0 = 0.
    pub fn omega_poly(&self) -> (i64, i64) {
        match self.omega_mode {
            IntegralBasis::HalfSqrt => (-1, -(self.m - 1) / 4),
            IntegralBasis::Sqrt => (0, -self.m),
        }
    }

    /// Coordinates (u, w) with x = u + w·ω.
    pub fn omega_coords(&self, x: &FieldElement) -> (BigRational, BigRational) {
        match self.omega_mode {
            IntegralBasis::HalfSqrt => (&x.a - &x.b, &x.b + &x.b),
            IntegralBasis::Sqrt => (x.a.clone(), x.b.clone()),
        }
    }

    pub fn from_omega_coords(&self, u: &BigRational, w: &BigRational) -> FieldElement {
        match self.omega_mode {
            IntegralBasis::HalfSqrt => {
                let half = w / BigRational::from_integer(2.into());
                FieldElement::new(u + &half, half)
            }
            IntegralBasis::Sqrt => FieldElement::new(u.clone(), w.clone()),
        }
    }

    pub fn render(&self, x: &FieldElement) -> String {
        x.render(self.m)
    }

    /// Regulator log ε.
    pub fn regulator(&self) -> f64 {
        let (e1, _) = self.embeddings(&self.eps);
        if e1.is_finite() {
            e1.ln()
        } else {
            // 2a ≈ ε for large units
            let bits = self.eps.a.numer().bits() as f64 - self.eps.a.denom().bits() as f64;
            bits * std::f64::consts::LN_2 + std::f64::consts::LN_2
        }
    }
}

impl fmt::Display for RealQuadraticField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(√{})", self.m)
    }
}

/// m with d_k = d, if d is a fundamental discriminant.
pub fn m_of_discriminant(d: i64) -> Result<i64> {
    if d > 0 && crate::arith::is_fundamental(d as u64) {
        Ok(if d % 4 == 1 { d } else { d / 4 })
    } else {
        Err(Error::NotFundamental(d))
    }
}

pub fn field_of_discriminant(d: i64) -> Result<RealQuadraticField> {
    make_field(m_of_discriminant(d)?)
}

/// κ(r), the Kronecker character of k.
pub fn character_value(field: &RealQuadraticField, r: i64) -> i32 {
    kronecker(field.d_k, r.rem_euclid(field.d_k))
}

/// B₂,κ = (1/d)·Σ r²κ(r).
pub fn bernoulli_b2(field: &RealQuadraticField) -> BigRational {
    bernoulli_b2_of_discriminant(field.d_k)
}

pub fn bernoulli_b2_of_discriminant(d: i64) -> BigRational {
    let s: i128 = (1..d).map(|r| (r as i128) * (r as i128) * kronecker(d, r) as i128).sum();
    BigRational::new(BigInt::from(s), BigInt::from(d))
}

pub fn fundamental_unit_data(field: &RealQuadraticField) -> FundamentalUnitData {
    field.unit.clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn units_of_small_fields() {
        let k = make_field(5).unwrap();
        assert_eq!(k.eps(), &FieldElement::from_frac(1, 1, 2));
        assert_eq!(k.unit.norm_sign, -1);
        let k = make_field(3).unwrap();
        assert_eq!(k.eps(), &FieldElement::from_ints(2, 1));
        assert_eq!(k.unit.tp_unit_index, 2);
        let k = make_field(15).unwrap();
        assert_eq!(k.eps(), &FieldElement::from_ints(4, 1));
        let k = make_field(13).unwrap();
        assert_eq!(k.eps(), &FieldElement::from_frac(3, 1, 2));
    }

    #[test]
    fn signs_agree_with_floats() {
        let k = make_field(3).unwrap();
        for (a, b) in [(1, 1), (1, -1), (-2, 1), (7, 3), (5, -1), (-1, -2)] {
            let x = FieldElement::from_ints(a, b);
            let (e1, e2) = k.embeddings(&x);
            let (s1, s2) = k.signs(&x);
            assert_eq!(s1 as f64, e1.signum());
            assert_eq!(s2 as f64, e2.signum());
        }
    }

    #[test]
    fn render_forms() {
        assert_eq!(FieldElement::from_frac(9, 1, 2).render(5), "9/2+1/2√5");
        assert_eq!(FieldElement::from_ints(1, 2).render(3), "1+2√3");
        assert_eq!(FieldElement::from_ints(0, -1).render(3), "-√3");
    }
}
