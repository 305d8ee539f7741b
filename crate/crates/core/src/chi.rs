//! Exact Euler characteristics of Γ¹_O, NΓ⁺_O and Γ⁺_{S,O}.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::{bernoulli_b2, FieldElement, RealQuadraticField};
use crate::place::{ord_v, FinitePlace};
use crate::squares::h_group;
use crate::units::{ideal_class, size_key, tp_principal_generator};

pub type ExactChi = BigRational;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn pow2(e: i64) -> BigRational {
    let two = BigRational::from_integer(BigInt::from(2));
    if e >= 0 {
        num_traits::pow(two, e as usize)
    } else {
        BigRational::one() / num_traits::pow(two, (-e) as usize)
    }
}

/// χ rendered as "num/den".
pub fn render_chi(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn check_ramification(rf: &[FinitePlace], s: &[FinitePlace]) -> Result<()> {
    if rf.is_empty() || rf.len() % 2 != 0 {
        return Err(Error::InvalidRamification(format!("|R_f| = {} must be even and positive", rf.len())));
    }
    let mut all: Vec<&FinitePlace> = rf.iter().chain(s).collect();
    all.sort();
    if all.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidRamification("repeated place or R_f ∩ S ≠ ∅".into()));
    }
    Ok(())
}

/// [k_B : k] = |Cl⁺ / Cl⁺² ⟨R_f⟩|.
pub fn kb_degree(field: &RealQuadraticField, rf: &[FinitePlace]) -> u64 {
    let g = &field.narrow;
    let mut gens = g.squares();
    gens.extend(rf.iter().map(|v| ideal_class(field, &[(v.clone(), 1)])));
    g.quotient_order(&gens) as u64
}

/// [k'_B : k] = |Cl / Cl² ⟨R_f⟩| in the wide class group.
pub fn kprime_degree(field: &RealQuadraticField, rf: &[FinitePlace]) -> u64 {
    let g = &field.narrow;
    let mut gens = g.squares();
    gens.push(g.delta);
    gens.extend(rf.iter().map(|v| ideal_class(field, &[(v.clone(), 1)])));
    g.quotient_order(&gens) as u64
}

fn log2(x: u64) -> u32 {
    debug_assert!(x.is_power_of_two());
    x.trailing_zeros()
}

/// Everything needed to evaluate the volume formula for one (R_f, S).
#[derive(Clone, Debug)]
pub struct LatticeSpec {
    pub d_k: i64,
    pub rf: Vec<FinitePlace>,
    pub s: Vec<FinitePlace>,
    pub alpha: u32,
    pub beta: u32,
    pub t_prime: u32,
    pub m_exponent: u32,
}

impl LatticeSpec {
    pub fn new(field: &RealQuadraticField, rf: &[FinitePlace], s: &[FinitePlace]) -> Result<Self> {
        check_ramification(rf, s)?;
        let mut rf = rf.to_vec();
        let mut s = s.to_vec();
        rf.sort();
        s.sort();
        let m_exponent = match s.len() {
            0 => 0,
            1 => maximality_certificate(field, &rf, &s[0])?.is_some() as u32,
            n => {
                return Err(Error::AmbiguousM {
                    size: n,
                    candidates: (0..=n as i64)
                        .map(|m| {
                            let c = chi_normalizer(field, &rf).map(|c| c * sigma_product(&s) / pow2(m));
                            c.map(|c| render_chi(&c)).unwrap_or_default()
                        })
                        .collect(),
                })
            }
        };
        Ok(LatticeSpec {
            d_k: field.d_k,
            alpha: log2(kb_degree(field, &rf)),
            beta: log2(kprime_degree(field, &rf)),
            t_prime: rf.iter().filter(|v| v.p == 2).count() as u32,
            m_exponent,
            rf,
            s,
        })
    }
}

/// E'_B = Π (Nv − 1)/2 over v ∈ R_f with Nv ≠ 2.
pub fn eprime_product(rf: &[FinitePlace]) -> BigRational {
    rf.iter().filter(|v| v.nv != 2).map(|v| v.e_prime()).fold(BigRational::one(), |a, b| a * b)
}

/// E_S = Π (Nv + 1) over v ∈ S.
pub fn sigma_product(s: &[FinitePlace]) -> BigRational {
    s.iter().map(|v| BigRational::from_integer(BigInt::from(v.sigma()))).fold(BigRational::one(), |a, b| a * b)
}

/// χ(Γ¹_O) = B₂,κ/48 · Π (Nv − 1).
pub fn chi_norm_one(field: &RealQuadraticField, rf: &[FinitePlace]) -> Result<ExactChi> {
    check_ramification(rf, &[])?;
    let mut c = bernoulli_b2(field) / BigRational::from_integer(48.into());
    for v in rf {
        c *= BigRational::from_integer(BigInt::from(v.nv - 1));
    }
    Ok(c)
}

/// [NΓ⁺_O : Γ¹_O] = 2^{r_f} [k_B : k].
pub fn index_norm_one_in_normalizer(field: &RealQuadraticField, rf: &[FinitePlace]) -> Result<u64> {
    check_ramification(rf, &[])?;
    Ok((1u64 << rf.len()) * kb_degree(field, rf))
}

/// g(k,B) = B₂,κ / (6 · 2^{3+t} · [k_B:k]).
pub fn g_kb(field: &RealQuadraticField, rf: &[FinitePlace]) -> BigRational {
    bernoulli_b2(field) / BigRational::from_integer(BigInt::from(6u64 << (3 + field.t)) * BigInt::from(kb_degree(field, rf)))
}

pub fn chi_normalizer(field: &RealQuadraticField, rf: &[FinitePlace]) -> Result<ExactChi> {
    let idx = index_norm_one_in_normalizer(field, rf)?;
    Ok(chi_norm_one(field, rf)? / BigRational::from_integer(idx.into()))
}

/// χ(Γ⁺_{S,O}) = χ(NΓ⁺_O) · E_S / 2^m.
pub fn chi_maximal(field: &RealQuadraticField, rf: &[FinitePlace], s: &[FinitePlace]) -> Result<ExactChi> {
    let spec = LatticeSpec::new(field, rf, s)?;
    Ok(chi_normalizer(field, rf)? * sigma_product(s) / pow2(spec.m_exponent as i64))
}

/// A totally positive c with ord_v(c) odd and ord_w(c) even for w ∉ R_f ∪ {v}.
pub fn maximality_certificate(field: &RealQuadraticField, rf: &[FinitePlace], v: &FinitePlace) -> Result<Option<FieldElement>> {
    if rf.contains(v) {
        return Err(Error::InvalidRamification(format!("{} lies in R_f", v.label())));
    }
    let h = h_group(field, rf, std::slice::from_ref(v))?;
    let mut cands: Vec<FieldElement> = h.elements.iter().filter(|x| ord_v(field, v, x) % 2 != 0).cloned().collect();
    if cands.is_empty() {
        return Ok(None);
    }
    // generators of v · Π w^{e_w}, e_w ∈ {0,1}
    for mask in 0u64..(1u64 << rf.len()) {
        let mut ideal = vec![(v.clone(), 1u32)];
        ideal.extend(rf.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, w)| (w.clone(), 1u32)));
        if let Some(g) = tp_principal_generator(field, &ideal)? {
            if field.unit.norm_sign == 1 {
                cands.push(field.mul(&g, field.eps()));
            }
            cands.push(g);
        }
    }
    cands.retain(|x| field.is_totally_positive(x));
    Ok(cands.into_iter().min_by_key(|x| size_key(field, x)))
}

/// Index of the principal congruence subgroup at a ramified place.
pub fn riehm_index(rf: &[FinitePlace], v: &FinitePlace) -> Result<u64> {
    if !rf.contains(v) {
        return Err(Error::NotRamifiedInB(v.label()));
    }
    let q = v.nv;
    Ok(if v.p == 2 { q + 1 } else { (q + 1) / 2 })
}

/// Index of Γ¹_O(Π_{v₁}⋯Π_{v_r}), the product of the local indices.
pub fn riehm_index_product(rf: &[FinitePlace], places: &[FinitePlace]) -> Result<u64> {
    places.iter().map(|v| riehm_index(rf, v)).product()
}

pub fn is_reciprocal_integer(x: &BigRational) -> bool {
    !x.is_zero() && x.numer() == &BigInt::one()
}
