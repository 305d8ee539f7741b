//! Ideal classes of places, principal generators and totally positive S-units.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::isqrt_u128;
use crate::error::{Error, Result};
use crate::field::{FieldElement, IntegralBasis, RealQuadraticField};
use crate::place::{ord_v, FinitePlace, SplitKind};

/// A product of prime places with nonnegative exponents.
pub type IdealSpec = Vec<(FinitePlace, u32)>;

/// Narrow class of the prime ideal of v.
pub fn place_class(field: &RealQuadraticField, v: &FinitePlace) -> usize {
    let g = &field.narrow;
    let d = field.d_k;
    let p = v.p as i64;
    if v.kind == SplitKind::Inert {
        return g.identity;
    }
    let r = v.root();
    let b = if p == 2 {
        if v.kind == SplitKind::Ramified {
            if field.m % 4 == 3 {
                2
            } else {
                0
            }
        } else if r == 0 {
            3
        } else {
            1
        }
    } else {
        let target = match field.omega_mode {
            IntegralBasis::HalfSqrt => (2 * r - 1).rem_euclid(p),
            IntegralBasis::Sqrt => (2 * r).rem_euclid(p),
        };
        (0..2 * p).find(|&b| b % p == target && (b - d).rem_euclid(2) == 0).unwrap()
    };
    debug_assert_eq!((b * b - d).rem_euclid(4 * p), 0);
    g.index_of((p, b, (b * b - d) / (4 * p)))
}

pub fn ideal_class(field: &RealQuadraticField, ideal: &[(FinitePlace, u32)]) -> usize {
    let g = &field.narrow;
    ideal.iter().fold(g.identity, |acc, (v, e)| g.mul(acc, g.pow(place_class(field, v), *e as i64)))
}

pub fn is_principal(field: &RealQuadraticField, ideal: &[(FinitePlace, u32)]) -> bool {
    field.narrow.is_wide_principal(ideal_class(field, ideal))
}

fn ideal_norm(ideal: &[(FinitePlace, u32)]) -> u128 {
    ideal.iter().map(|(v, e)| (v.nv as u128).pow(*e)).product()
}

/// Integral elements of norm ±n, up to the sign and conjugation symmetry of
/// the search, with |y| ≤ ybound in the representation (x + y√m)/2 or x + y√m.
fn norm_solutions(field: &RealQuadraticField, n: u128, ybound: u128, mut visit: impl FnMut(FieldElement) -> bool) -> bool {
    let m = field.m as u128;
    let half = field.omega_mode == IntegralBasis::HalfSqrt;
    let target = if half { 4 * n } else { n };
    for y in 0..=ybound {
        let my2 = m * y * y;
        for plus in [true, false] {
            let t = if plus {
                my2 + target
            } else if my2 >= target {
                my2 - target
            } else {
                continue;
            };
            let x = isqrt_u128(t);
            if x * x != t || (half && (x + y) % 2 != 0) {
                continue;
            }
            let (xi, yi) = (x as i64, y as i64);
            for (sx, sy) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                let el = if half {
                    FieldElement::from_frac(sx * xi, sy * yi, 2)
                } else {
                    FieldElement::from_ints(sx * xi, sy * yi)
                };
                if visit(el) {
                    return true;
                }
            }
        }
    }
    false
}

/// A generator of the ideal, or None when it is not principal.
pub fn principal_generator(field: &RealQuadraticField, ideal: &[(FinitePlace, u32)]) -> Result<Option<FieldElement>> {
    if !is_principal(field, ideal) {
        return Ok(None);
    }
    let n = ideal_norm(ideal);
    if n == 1 {
        return Ok(Some(FieldElement::one()));
    }
    let eps = field.embeddings(field.eps()).0;
    let base = ((4.0 * n as f64 * eps / field.m as f64).sqrt()).ceil() as u128 + 1;
    let mut bound = base;
    for _ in 0..=3 {
        let mut found = None;
        norm_solutions(field, n, bound, |x| {
            if ideal.iter().all(|(v, e)| ord_v(field, v, &x) == *e as i64) {
                found = Some(x);
                true
            } else {
                false
            }
        });
        if found.is_some() {
            return Ok(found);
        }
        bound *= 2;
    }
    Err(Error::SearchBoundExceeded { norm: n.to_string() })
}

/// Moves x into k₊ by a unit when possible.
pub fn tp_normalize(field: &RealQuadraticField, x: &FieldElement) -> Option<FieldElement> {
    let mut x = x.clone();
    if field.norm(&x).is_negative() {
        if field.unit.norm_sign == -1 {
            x = field.mul(&x, field.eps());
        } else {
            return None;
        }
    }
    if x.a.is_negative() {
        x = -&x;
    }
    Some(balance(field, &x))
}

/// Multiplies by an even power of ε so that the two embeddings have
/// comparable size; the square class is unchanged.
pub fn balance(field: &RealQuadraticField, x: &FieldElement) -> FieldElement {
    let eps2 = field.mul(field.eps(), field.eps());
    let eps2_inv = field.inv(&eps2);
    let spread = |y: &FieldElement| {
        let (a, b) = field.embeddings(y);
        (a.abs().ln() - b.abs().ln()).abs()
    };
    let mut cur = x.clone();
    loop {
        let up = field.mul(&cur, &eps2);
        let down = field.mul(&cur, &eps2_inv);
        let (s0, s1, s2) = (spread(&cur), spread(&up), spread(&down));
        if s1 + 1e-9 < s0 && s1 <= s2 {
            cur = up;
        } else if s2 + 1e-9 < s0 {
            cur = down;
        } else {
            return cur;
        }
    }
}

/// A totally positive generator of the ideal, when one exists.
pub fn tp_principal_generator(field: &RealQuadraticField, ideal: &[(FinitePlace, u32)]) -> Result<Option<FieldElement>> {
    Ok(principal_generator(field, ideal)?.and_then(|g| tp_normalize(field, &g)))
}

fn sign_bits(field: &RealQuadraticField, x: &FieldElement) -> [u8; 2] {
    let (s1, s2) = field.signs(x);
    [(s1 < 0) as u8, (s2 < 0) as u8]
}

/// [o*_{R_f,+} : o*²_{R_f}] from the sign vectors of −1, ε and generators of
/// the primes of R_f.
pub fn s_unit_tp_index(field: &RealQuadraticField, rf: &[FinitePlace]) -> Result<u64> {
    let mut gens = vec![FieldElement::from_ints(-1, 0), field.eps().clone()];
    for v in rf {
        match principal_generator(field, &[(v.clone(), 1)])? {
            Some(g) => gens.push(g),
            None => return Err(Error::NonPrincipalGenerator(v.label())),
        }
    }
    let vecs: Vec<Vec<u8>> = gens.iter().map(|g| sign_bits(field, g).to_vec()).collect();
    let rank = crate::linalg::rank(&vecs);
    Ok((1u64 << gens.len()) >> rank)
}

/// A representative of the square class of x with small coordinates:
/// rational square factors are removed and the embeddings balanced.
pub fn reduce_square_class(field: &RealQuadraticField, x: &FieldElement) -> FieldElement {
    let (u, w) = field.omega_coords(x);
    let den = num_integer::Integer::lcm(u.denom(), w.denom());
    let uu = (&u * BigRational::from_integer(den.clone())).to_integer();
    let ww = (&w * BigRational::from_integer(den.clone())).to_integer();
    let content = num_integer::Integer::gcd(&uu, &ww);
    // x = (content/den)·y with y integral and primitive
    let y = field.from_omega_coords(
        &BigRational::from_integer(&uu / &content),
        &BigRational::from_integer(&ww / &content),
    );
    let r = BigRational::new(content, den);
    let c = squarefree_kernel(&(r.numer() * r.denom()));
    let z = field.mul(&y, &FieldElement::new(BigRational::from_integer(c), BigRational::zero()));
    balance(field, &z)
}

/// Squarefree part of |n|, removing squares of primes below 10⁵.
fn squarefree_kernel(n: &BigInt) -> BigInt {
    let mut n = n.abs();
    let mut out = BigInt::from(1);
    let mut p = 2u64;
    while p < 100_000 {
        let pb = BigInt::from(p);
        if (&pb * &pb) > n {
            break;
        }
        let mut e = 0;
        while (&n % &pb).is_zero() {
            n /= &pb;
            e += 1;
        }
        if e % 2 == 1 {
            out *= &pb;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    out * n
}

/// Ordering key preferring small norm, then balanced small embeddings.
pub fn size_key(field: &RealQuadraticField, x: &FieldElement) -> (BigInt, u64) {
    let n = field.norm(x).abs();
    let nn = n.numer() * n.denom();
    let (a, b) = field.embeddings(x);
    let h = a.abs().max(b.abs());
    (nn, (h * 1e6).to_u64().unwrap_or(u64::MAX))
}
