//! Finite-order elements of the maximal lattices Γ⁺_{S,O}.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldElement, RealQuadraticField};
use crate::place::{local_square_kind, ord_v, splits_in_sqrt_minus_a, support, FinitePlace, LocalSplitting};
use crate::squares::{h_group, SquareClassGroup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CyclotomicSplitting {
    Split,
    NonSplit,
}

/// Orders of torsion allowed by ζ_m + ζ_m⁻¹ ∈ k.
pub fn possible_orders(field: &RealQuadraticField) -> BTreeSet<u32> {
    let mut out: BTreeSet<u32> = [2, 3, 4, 6].into_iter().collect();
    match field.d_k {
        5 => out.extend([5, 10]),
        8 => {
            out.insert(8);
        }
        12 => {
            out.insert(12);
        }
        _ => {}
    }
    out
}

/// λ = ζ_m + ζ_m⁻¹ as an element of k.
pub fn lambda(field: &RealQuadraticField, m: u32) -> Result<FieldElement> {
    if !possible_orders(field).contains(&m) || m == 2 {
        return Err(Error::ImpossibleOrder(m));
    }
    Ok(match m {
        3 => FieldElement::from_ints(-1, 0),
        4 => FieldElement::from_ints(0, 0),
        6 => FieldElement::from_ints(1, 0),
        5 => FieldElement::from_frac(-1, 1, 2),
        10 => FieldElement::from_frac(1, 1, 2),
        // √2 for d = 8, √3 for d = 12
        _ => FieldElement::from_ints(0, 1),
    })
}

/// λ² − 4, so that k(ζ_m) = k(√(λ² − 4)).
fn cyclotomic_radicand(field: &RealQuadraticField, m: u32) -> Result<FieldElement> {
    let l = lambda(field, m)?;
    Ok(&field.mul(&l, &l) - &FieldElement::from_ints(4, 0))
}

pub fn splits_in_cyclotomic(field: &RealQuadraticField, v: &FinitePlace, m: u32) -> Result<CyclotomicSplitting> {
    let r = cyclotomic_radicand(field, m)?;
    Ok(if local_square_kind(field, v, &r).is_split() {
        CyclotomicSplitting::Split
    } else {
        CyclotomicSplitting::NonSplit
    })
}

/// Which alternative of condition d) holds at a place of S.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SClause {
    Splits,
    OddValuation,
    InPrime,
    /// β) via v | 2
    Dyadic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TorsionWitness {
    /// A square class [a] satisfying α) and β).
    SquareClass { a: String },
    /// Conditions a)–d) for m > 2: λ, the element 2 + λ and the clause used at each place of S.
    Conditions { lambda: String, ideal_generator: String, s_clauses: BTreeMap<String, SClause> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionReport {
    #[serde(rename = "orders")]
    pub orders_present: BTreeSet<u32>,
    pub witnesses: BTreeMap<u32, TorsionWitness>,
    /// Orders occurring already in the norm-one part.
    #[serde(rename = "norm_one_orders")]
    pub norm_one_orders: BTreeSet<u32>,
}

fn t_set(rf: &[FinitePlace], s: &[FinitePlace]) -> Vec<FinitePlace> {
    let mut t: Vec<FinitePlace> = rf.iter().chain(s).cloned().collect();
    t.sort();
    t.dedup();
    t
}

/// Conditions a)–d) for m > 2; returns the certificate when all hold.
fn torsion_conditions(field: &RealQuadraticField, rf: &[FinitePlace], s: &[FinitePlace], m: u32) -> Result<Option<TorsionWitness>> {
    let l = lambda(field, m)?;
    let radicand = cyclotomic_radicand(field, m)?;
    // b)
    if rf.iter().any(|v| local_square_kind(field, v, &radicand).is_split()) {
        return Ok(None);
    }
    // c): (2+λ) o_k ∈ I(S)I(R_f)I² iff every valuation outside T is even
    let c = &FieldElement::from_ints(2, 0) + &l;
    let t = t_set(rf, s);
    if support(field, &c).iter().any(|w| !t.contains(w) && ord_v(field, w, &c) % 2 != 0) {
        return Ok(None);
    }
    // d)
    let c_minus = &FieldElement::from_ints(2, 0) - &l;
    let mut clauses = BTreeMap::new();
    for v in s {
        let clause = if local_square_kind(field, v, &radicand).is_split() {
            SClause::Splits
        } else if ord_v(field, v, &c) % 2 != 0 {
            SClause::OddValuation
        } else if ord_v(field, v, &c_minus) >= 1 {
            SClause::InPrime
        } else {
            return Ok(None);
        };
        clauses.insert(v.label(), clause);
    }
    Ok(Some(TorsionWitness::Conditions {
        lambda: field.render(&l),
        ideal_generator: field.render(&c),
        s_clauses: clauses,
    }))
}

/// Whether [a] satisfies α) and β).
pub fn is_order_two_class(field: &RealQuadraticField, rf: &[FinitePlace], s: &[FinitePlace], a: &FieldElement) -> bool {
    if rf.iter().any(|v| splits_in_sqrt_minus_a(field, v, a).is_split()) {
        return false;
    }
    s.iter().all(|v| {
        ord_v(field, v, a) % 2 != 0 || v.p == 2 || splits_in_sqrt_minus_a(field, v, a) == LocalSplitting::Split
    })
}

/// Indices into `h.elements` of the classes giving elements of order two.
pub fn order_two_classes(field: &RealQuadraticField, rf: &[FinitePlace], s: &[FinitePlace], h: &SquareClassGroup) -> Vec<usize> {
    (0..h.order).filter(|&i| is_order_two_class(field, rf, s, &h.elements[i])).collect()
}

pub fn has_torsion(field: &RealQuadraticField, rf: &[FinitePlace], s: &[FinitePlace], m: u32) -> Result<Option<TorsionWitness>> {
    if !possible_orders(field).contains(&m) {
        return Err(Error::ImpossibleOrder(m));
    }
    if m > 2 {
        return torsion_conditions(field, rf, s, m);
    }
    let h = h_group(field, rf, s)?;
    Ok(order_two_classes(field, rf, s, &h)
        .first()
        .map(|&i| TorsionWitness::SquareClass { a: field.render(&h.elements[i]) }))
}

/// Torsion spectrum together with H(S,B) and its order-two classes.
#[derive(Clone, Debug)]
pub struct TorsionAnalysis {
    pub report: TorsionReport,
    pub h: SquareClassGroup,
    pub order_two: Vec<usize>,
}

pub fn analyze(field: &RealQuadraticField, rf: &[FinitePlace], s: &[FinitePlace]) -> Result<TorsionAnalysis> {
    let possible = possible_orders(field);
    let mut report = TorsionReport {
        orders_present: BTreeSet::new(),
        witnesses: BTreeMap::new(),
        norm_one_orders: BTreeSet::new(),
    };
    for &m in possible.iter().filter(|&&m| m > 2) {
        if let Some(w) = torsion_conditions(field, rf, s, m)? {
            report.orders_present.insert(m);
            report.witnesses.insert(m, w);
        }
    }
    // an odd order m occurs iff 2m does
    for (a, b) in [(3u32, 6u32), (5, 10)] {
        if possible.contains(&b) && (report.orders_present.contains(&a) || report.orders_present.contains(&b)) {
            report.orders_present.insert(a);
            report.orders_present.insert(b);
        }
    }
    report.norm_one_orders = report.orders_present.clone();
    let h = h_group(field, rf, s)?;
    let order_two = order_two_classes(field, rf, s, &h);
    if let Some(&i) = order_two.first() {
        report.orders_present.insert(2);
        report.witnesses.insert(2, TorsionWitness::SquareClass { a: field.render(&h.elements[i]) });
        if i == 0 {
            report.norm_one_orders.insert(2);
        }
    }
    Ok(TorsionAnalysis { report, h, order_two })
}

pub fn torsion_spectrum(field: &RealQuadraticField, rf: &[FinitePlace], s: &[FinitePlace]) -> Result<TorsionReport> {
    Ok(analyze(field, rf, s)?.report)
}

/// Every finite subgroup order must divide the index of a torsion-free subgroup.
pub fn index_admissible(report: &TorsionReport, index: u64) -> bool {
    report.orders_present.iter().all(|&m| index % m as u64 == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;
    use crate::place::{parse_place, parse_places};

    #[test]
    fn possible_orders_by_field() {
        let set = |d: i64| possible_orders(&crate::field::field_of_discriminant(d).unwrap()).into_iter().collect::<Vec<_>>();
        assert_eq!(set(5), vec![2, 3, 4, 5, 6, 10]);
        assert_eq!(set(8), vec![2, 3, 4, 6, 8]);
        assert_eq!(set(13), vec![2, 3, 4, 6]);
    }

    #[test]
    fn cyclotomic_splitting_examples() {
        let k = make_field(5).unwrap();
        let v2 = parse_place(&k, "2").unwrap();
        let v41 = parse_place(&k, "41+").unwrap();
        assert_eq!(splits_in_cyclotomic(&k, &v2, 3).unwrap(), CyclotomicSplitting::Split);
        assert_eq!(splits_in_cyclotomic(&k, &v41, 4).unwrap(), CyclotomicSplitting::Split);
        assert_eq!(splits_in_cyclotomic(&k, &v41, 5).unwrap(), CyclotomicSplitting::Split);
    }

    #[test]
    fn order_five_for_v2_v5() {
        let k = make_field(5).unwrap();
        let rf = parse_places(&k, "2,5").unwrap();
        assert!(has_torsion(&k, &rf, &[], 5).unwrap().is_some());
        let rep = torsion_spectrum(&k, &rf, &[]).unwrap();
        assert!(rep.orders_present.contains(&5) && rep.orders_present.contains(&10));
        assert!(!index_admissible(&rep, 4));
        assert!(index_admissible(&rep, 20));
    }

    #[test]
    fn no_order_three_for_v2_v41() {
        let k = make_field(5).unwrap();
        let rf = parse_places(&k, "2,41+").unwrap();
        assert!(has_torsion(&k, &rf, &[], 3).unwrap().is_none());
    }

    #[test]
    fn report_serializes_with_orders_key() {
        let k = make_field(2).unwrap();
        let rf = parse_places(&k, "2,17+").unwrap();
        let rep = torsion_spectrum(&k, &rf, &[]).unwrap();
        let js = serde_json::to_value(&rep).unwrap();
        assert!(js["orders"].as_array().unwrap().contains(&serde_json::json!(3)));
        assert!(js["witnesses"].get("3").is_some());
    }
}
