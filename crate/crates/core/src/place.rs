//! Finite places of k, valuations, residues and local quadratic splitting.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, kronecker, mod_inv, mod_pow, vp_int};
use crate::error::{Error, Result};
use crate::field::{FieldElement, IntegralBasis, RealQuadraticField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SplitKind {
    Split,
    Inert,
    Ramified,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Conj {
    Plus,
    Minus,
    None,
}

#[derive(Clone, Debug)]
pub struct FinitePlace {
    pub p: u64,
    pub kind: SplitKind,
    pub conj: Conj,
    pub nv: u64,
    /// Root of the minimal polynomial of ω modulo p selecting this place.
    root: i64,
}

impl PartialEq for FinitePlace {
    fn eq(&self, o: &Self) -> bool {
        self.p == o.p && self.conj == o.conj
    }
}
impl Eq for FinitePlace {}

impl Hash for FinitePlace {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.p.hash(h);
        self.conj.hash(h);
    }
}

impl Ord for FinitePlace {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.p, self.conj).cmp(&(o.p, o.conj))
    }
}
impl PartialOrd for FinitePlace {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for FinitePlace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.label())
    }
}

impl FinitePlace {
    /// "p", "p+" or "p-".
    pub fn label(&self) -> String {
        match self.conj {
            Conj::Plus => format!("{}+", self.p),
            Conj::Minus => format!("{}-", self.p),
            Conj::None => format!("{}", self.p),
        }
    }

    /// e'_v = (Nv − 1)/2
    pub fn e_prime(&self) -> BigRational {
        BigRational::new(BigInt::from(self.nv - 1), BigInt::from(2))
    }

    /// σ_v = Nv + 1
    pub fn sigma(&self) -> u64 {
        self.nv + 1
    }

    pub fn is_dyadic(&self) -> bool {
        self.p == 2
    }

    pub fn root(&self) -> i64 {
        self.root
    }

    /// Image under √m ↦ −√m.
    pub fn conjugate(&self, field: &RealQuadraticField) -> FinitePlace {
        match self.conj {
            Conj::None => self.clone(),
            c => {
                let (c1, _) = field.omega_poly();
                let p = self.p as i64;
                FinitePlace {
                    conj: if c == Conj::Plus { Conj::Minus } else { Conj::Plus },
                    root: (-c1 - self.root).rem_euclid(p),
                    ..self.clone()
                }
            }
        }
    }
}

fn omega_roots(field: &RealQuadraticField, p: u64) -> Vec<i64> {
    let (c1, c0) = field.omega_poly();
    let p = p as i64;
    (0..p)
        .filter(|&x| ((x as i128 * x as i128 + c1 as i128 * x as i128 + c0 as i128).rem_euclid(p as i128)) == 0)
        .collect()
}

/// The places of k above the rational prime p.
pub fn splitting_type(field: &RealQuadraticField, p: u64) -> Result<Vec<FinitePlace>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(places_above(field, p))
}

pub(crate) fn places_above(field: &RealQuadraticField, p: u64) -> Vec<FinitePlace> {
    let pi = p as i64;
    if field.d_k % pi == 0 {
        let r = omega_roots(field, p)[0];
        return vec![FinitePlace { p, kind: SplitKind::Ramified, conj: Conj::None, nv: p, root: r }];
    }
    if kronecker(field.d_k, pi) == -1 {
        return vec![FinitePlace { p, kind: SplitKind::Inert, conj: Conj::None, nv: p * p, root: 0 }];
    }
    let roots = omega_roots(field, p);
    assert_eq!(roots.len(), 2);
    let plus = if p == 2 {
        0
    } else {
        // √m ↦ s with 0 < s ≤ (p−1)/2
        let s_of = |r: i64| match field.omega_mode {
            IntegralBasis::HalfSqrt => (2 * r - 1).rem_euclid(pi),
            IntegralBasis::Sqrt => r,
        };
        *roots.iter().find(|&&r| s_of(r) > 0 && s_of(r) <= (pi - 1) / 2).unwrap()
    };
    let minus = *roots.iter().find(|&&r| r != plus).unwrap();
    vec![
        FinitePlace { p, kind: SplitKind::Split, conj: Conj::Plus, nv: p, root: plus },
        FinitePlace { p, kind: SplitKind::Split, conj: Conj::Minus, nv: p, root: minus },
    ]
}

/// Places with label "p", "p+" or "p-" (a leading "v" is accepted).
pub fn parse_place(field: &RealQuadraticField, s: &str) -> Result<FinitePlace> {
    let t = s.trim();
    let t = t.strip_prefix('v').unwrap_or(t);
    let (num, conj) = if let Some(x) = t.strip_suffix('+') {
        (x, Conj::Plus)
    } else if let Some(x) = t.strip_suffix('-') {
        (x, Conj::Minus)
    } else {
        (t, Conj::None)
    };
    let p: u64 = num.parse().map_err(|_| Error::Parse(s.to_string()))?;
    if !is_prime(p) {
        return Err(Error::Parse(s.to_string()));
    }
    places_above(field, p)
        .into_iter()
        .find(|pl| pl.conj == conj)
        .ok_or_else(|| Error::Parse(s.to_string()))
}

pub fn parse_places(field: &RealQuadraticField, s: &str) -> Result<Vec<FinitePlace>> {
    let mut out: Vec<FinitePlace> = Vec::new();
    for part in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        out.push(parse_place(field, part)?);
    }
    out.sort();
    let n = out.len();
    out.dedup();
    if out.len() != n {
        return Err(Error::Parse(s.to_string()));
    }
    Ok(out)
}

/// x = (U + W·ω)/den with U, W, den integers and den > 0.
fn integral_coords(field: &RealQuadraticField, x: &FieldElement) -> (BigInt, BigInt, BigInt) {
    let (u, w) = field.omega_coords(x);
    let den = u.denom().lcm(w.denom());
    let uu = (&u * BigRational::from_integer(den.clone())).to_integer();
    let ww = (&w * BigRational::from_integer(den.clone())).to_integer();
    (uu, ww, den)
}

/// N(U + Wω) for integers U, W.
fn omega_norm(field: &RealQuadraticField, u: &BigInt, w: &BigInt) -> BigInt {
    let (c1, c0) = field.omega_poly();
    u * u - BigInt::from(c1) * u * w + BigInt::from(c0) * w * w
}

fn vp_signed(n: &BigInt, p: u64) -> i64 {
    vp_int(n, p) as i64
}

/// ord_v(x) for nonzero x.
pub fn ord_v(field: &RealQuadraticField, v: &FinitePlace, x: &FieldElement) -> i64 {
    assert!(!x.is_zero(), "valuation of zero");
    let (u, w, den) = integral_coords(field, x);
    let p = v.p;
    let dv = vp_signed(&den, p);
    match v.kind {
        SplitKind::Ramified => {
            let n = field.norm(x);
            vp_signed(n.numer(), p) - vp_signed(n.denom(), p)
        }
        SplitKind::Inert => {
            let c = [&u, &w].iter().filter(|z| !z.is_zero()).map(|z| vp_signed(z, p)).min().unwrap();
            c - dv
        }
        SplitKind::Split => {
            let c = [&u, &w].iter().filter(|z| !z.is_zero()).map(|z| vp_signed(z, p)).min().unwrap();
            let pc = BigInt::from(p).pow(c as u32);
            let (u1, w1) = (&u / &pc, &w / &pc);
            let n1 = omega_norm(field, &u1, &w1);
            let e = vp_signed(&n1, p);
            if e == 0 {
                return c - dv;
            }
            let at_v = (&u1 + &w1 * BigInt::from(v.root)).mod_floor(&BigInt::from(p)).is_zero();
            if at_v {
                e + c - dv
            } else {
                c - dv
            }
        }
    }
}

/// A uniformizer at v, taken from k.
pub fn uniformizer(field: &RealQuadraticField, v: &FinitePlace) -> FieldElement {
    match v.kind {
        SplitKind::Ramified => {
            if v.p == 2 && field.m % 4 == 3 {
                FieldElement::from_ints(1, 1)
            } else {
                FieldElement::from_ints(0, 1)
            }
        }
        _ => FieldElement::from_ints(v.p as i64, 0),
    }
}

/// Residue class of a v-unit in the residue field F_p or F_p[ω].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Residue {
    Fp(i64),
    Fp2(i64, i64),
}

fn rat_mod_p(x: &BigRational, p: u64) -> i64 {
    let pb = BigInt::from(p);
    let n = x.numer().mod_floor(&pb).to_i64().unwrap();
    let d = x.denom().mod_floor(&pb).to_i64().unwrap();
    let di = mod_inv(d as i128, p as i128).expect("denominator divisible by p");
    ((n as i128 * di) % p as i128) as i64
}

/// Root of the ω polynomial modulo p^e lifting the place's root.
fn hensel_root(field: &RealQuadraticField, v: &FinitePlace, e: u32) -> BigInt {
    let (c1, c0) = field.omega_poly();
    let modulus = BigInt::from(v.p).pow(e);
    let (c1, c0) = (BigInt::from(c1), BigInt::from(c0));
    let mut r = BigInt::from(v.root);
    for _ in 0..e {
        let f = &r * &r + &c1 * &r + &c0;
        let df = BigInt::from(2) * &r + &c1;
        let dfi = mod_inverse_big(&df, &modulus);
        r = (&r - f * dfi).mod_floor(&modulus);
    }
    r
}

fn mod_inverse_big(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.mod_floor(m).extended_gcd(m);
    assert!(e.gcd.is_one(), "not invertible");
    e.x.mod_floor(m)
}

pub fn residue(field: &RealQuadraticField, v: &FinitePlace, x: &FieldElement) -> Residue {
    debug_assert_eq!(ord_v(field, v, x), 0);
    let p = v.p;
    match v.kind {
        SplitKind::Inert => {
            let (u, w) = field.omega_coords(x);
            Residue::Fp2(rat_mod_p(&u, p), rat_mod_p(&w, p))
        }
        SplitKind::Ramified => {
            let (u, w) = field.omega_coords(x);
            let r = (rat_mod_p(&u, p) as i128 + rat_mod_p(&w, p) as i128 * v.root as i128).rem_euclid(p as i128);
            Residue::Fp(r as i64)
        }
        SplitKind::Split => {
            let (u, w, den) = integral_coords(field, x);
            let dl = vp_int(&den, p);
            let rho = hensel_root(field, v, dl + 1);
            let pe = BigInt::from(p).pow(dl + 1);
            let val = (&u + &w * rho).mod_floor(&pe);
            let pdl = BigInt::from(p).pow(dl);
            debug_assert!((&val % &pdl).is_zero());
            let val = (val / &pdl).to_i64().unwrap();
            let den2 = (&den / &pdl).mod_floor(&BigInt::from(p)).to_i64().unwrap();
            let inv = mod_inv(den2 as i128, p as i128).unwrap();
            Residue::Fp(((val as i128 * inv) % p as i128) as i64)
        }
    }
}

fn fp2_mul(field: &RealQuadraticField, x: (i128, i128), y: (i128, i128), p: i128) -> (i128, i128) {
    let (c1, c0) = field.omega_poly();
    let (a, b) = x;
    let (c, d) = y;
    let bd = b * d % p;
    ((a * c - bd * c0 as i128).rem_euclid(p), (a * d + b * c - bd * c1 as i128).rem_euclid(p))
}

/// Whether a nonzero residue is a square in the residue field.
pub fn residue_is_square(field: &RealQuadraticField, v: &FinitePlace, r: Residue) -> bool {
    let p = v.p as i128;
    if p == 2 {
        // every element of a finite field of characteristic 2 is a square
        return true;
    }
    match r {
        Residue::Fp(a) => mod_pow(a as i128, ((p - 1) / 2) as u128, p) == 1,
        Residue::Fp2(a, b) => {
            let mut e = ((p * p - 1) / 2) as u128;
            let mut base = (a as i128, b as i128);
            let mut acc = (1i128, 0i128);
            while e > 0 {
                if e & 1 == 1 {
                    acc = fp2_mul(field, acc, base, p);
                }
                base = fp2_mul(field, base, base, p);
                e >>= 1;
            }
            acc == (1, 0)
        }
    }
}

/// Behaviour of v in the quadratic extension k(√a)/k.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LocalSplitting {
    Split,
    Inert,
    Ramified,
}

impl LocalSplitting {
    pub fn is_split(self) -> bool {
        self == LocalSplitting::Split
    }
}

/// ord_v(e) for the ramification index e of v over p.
pub fn ramification_index(v: &FinitePlace) -> i64 {
    if v.kind == SplitKind::Ramified {
        2
    } else {
        1
    }
}

/// a · z^(−ord_v a) for even ord_v(a).
fn unitize(field: &RealQuadraticField, v: &FinitePlace, a: &FieldElement, e: i64) -> FieldElement {
    let z = uniformizer(field, v);
    let u = field.mul(a, &field.pow(&z, -e));
    debug_assert_eq!(ord_v(field, v, &u), 0);
    u
}

/// Whether some x in o_k has ord_v(x² − u) ≥ n, searching x modulo 2^j with
/// j·e ≥ n − e.
pub fn dyadic_square_to_precision(field: &RealQuadraticField, v: &FinitePlace, u: &FieldElement, n: i64) -> bool {
    assert_eq!(v.p, 2);
    let e = ramification_index(v);
    let j = ((n - e).max(1) + e - 1) / e;
    let modulus = 1i64 << j;
    let om = field.omega();
    for s in 0..modulus {
        for t in 0..modulus {
            let x = &FieldElement::from_ints(s, 0) + &field.mul(&FieldElement::from_ints(t, 0), &om);
            let diff = &field.mul(&x, &x) - u;
            if diff.is_zero() || ord_v(field, v, &diff) >= n {
                return true;
            }
        }
    }
    false
}

/// Splitting of v in k(√a).
pub fn local_square_kind(field: &RealQuadraticField, v: &FinitePlace, a: &FieldElement) -> LocalSplitting {
    let e = ord_v(field, v, a);
    if e.rem_euclid(2) == 1 {
        return LocalSplitting::Ramified;
    }
    let u = unitize(field, v, a, e);
    if v.p != 2 {
        let r = residue(field, v, &u);
        return if residue_is_square(field, v, r) { LocalSplitting::Split } else { LocalSplitting::Inert };
    }
    let e2 = ramification_index(v);
    if dyadic_square_to_precision(field, v, &u, 2 * e2 + 1) {
        LocalSplitting::Split
    } else if dyadic_square_to_precision(field, v, &u, 2 * e2) {
        LocalSplitting::Inert
    } else {
        LocalSplitting::Ramified
    }
}

/// Splitting of v in k(√−a).
pub fn splits_in_sqrt_minus_a(field: &RealQuadraticField, v: &FinitePlace, a: &FieldElement) -> LocalSplitting {
    local_square_kind(field, v, &(-a))
}

/// All places above primes up to `bound`, sorted.
pub fn places_up_to(field: &RealQuadraticField, bound: u64) -> Vec<FinitePlace> {
    crate::arith::primes_up_to(bound).into_iter().flat_map(|p| places_above(field, p)).collect()
}

/// Places dividing a nonzero element (numerator or denominator).
pub fn support(field: &RealQuadraticField, x: &FieldElement) -> Vec<FinitePlace> {
    let n = field.norm(x);
    let mut primes: Vec<u64> = Vec::new();
    for z in [n.numer().abs(), n.denom().abs()] {
        let z = z.to_u64().expect("norm fits in 64 bits");
        primes.extend(crate::arith::factor(z).into_iter().map(|(p, _)| p));
    }
    let (_, _, den) = integral_coords(field, x);
    if let Some(dz) = den.to_u64() {
        primes.extend(crate::arith::factor(dz).into_iter().map(|(p, _)| p));
    }
    primes.sort();
    primes.dedup();
    primes
        .into_iter()
        .flat_map(|p| places_above(field, p))
        .filter(|v| ord_v(field, v, x) != 0)
        .collect()
}
