use std::collections::BTreeSet;

use fqlat_core::chi::{chi_maximal, index_norm_one_in_normalizer, kprime_degree, maximality_certificate, riehm_index};
use fqlat_core::classify::{candidate_classes, integrality_screen, table1_row};
use fqlat_core::field::{bernoulli_b2, character_value, field_of_discriminant, make_field, FieldElement};
use fqlat_core::place::{ord_v, parse_place, parse_places, splits_in_sqrt_minus_a, splitting_type, support};
use fqlat_core::squares::h_group;
use fqlat_core::torsion::{has_torsion, index_admissible, possible_orders, splits_in_cyclotomic, torsion_spectrum, CyclotomicSplitting};
use fqlat_core::units::{principal_generator, s_unit_tp_index, tp_principal_generator};
use fqlat_core::{chi::rat, FinitePlace, LocalSplitting, RealQuadraticField, SplitKind, Status, TorsionReport};

fn k(d: i64) -> RealQuadraticField {
    field_of_discriminant(d).unwrap()
}

fn pl(k: &RealQuadraticField, s: &str) -> Vec<FinitePlace> {
    parse_places(k, s).unwrap()
}

fn half(a: i64, b: i64) -> FieldElement {
    FieldElement::from_frac(a, b, 2)
}

#[test]
fn make_field_rows() {
    for (m, d, t, h) in [(5, 5, 1, 1), (2, 8, 1, 1), (17, 17, 2, 1)] {
        let f = make_field(m).unwrap();
        assert_eq!((f.d_k, f.t, f.h()), (d, t, h));
    }
    assert!(make_field(12).is_err());
    assert!(make_field(1).is_err());
}

#[test]
fn characters_and_bernoulli() {
    assert_eq!(character_value(&k(5), 2), -1);
    assert_eq!(character_value(&k(5), 4), 1);
    assert_eq!(character_value(&k(12), 11), 1);
    assert_eq!(bernoulli_b2(&k(5)), rat(4, 5));
    assert_eq!(bernoulli_b2(&k(13)), rat(4, 1));
    assert_eq!(bernoulli_b2(&k(17)), rat(8, 1));
}

#[test]
fn splitting_examples() {
    let v = splitting_type(&k(5), 2).unwrap();
    assert_eq!((v.len(), v[0].kind, v[0].nv), (1, SplitKind::Inert, 4));
    let v = splitting_type(&k(5), 41).unwrap();
    assert_eq!(v.len(), 2);
    assert!(v.iter().all(|x| x.nv == 41));
    let v = splitting_type(&k(12), 3).unwrap();
    assert_eq!((v[0].kind, v[0].nv), (SplitKind::Ramified, 3));
}

#[test]
fn unit_and_class_group_examples() {
    assert_eq!(k(5).unit.tp_unit_index, 4);
    assert!(!k(5).unit.totally_positive);
    for d in [12, 60] {
        assert_eq!(k(d).unit.tp_unit_index, 2);
        assert!(k(d).unit.totally_positive);
    }
    assert_eq!((k(5).h(), k(60).h(), k(145).h()), (1, 2, 4));
}

#[test]
fn generator_examples() {
    let f = k(5);
    let v2 = parse_place(&f, "2").unwrap();
    assert_eq!(tp_principal_generator(&f, &[(v2, 1)]).unwrap(), Some(FieldElement::from_ints(2, 0)));
    let f = k(12);
    let v11 = parse_place(&f, "11+").unwrap();
    assert_eq!(tp_principal_generator(&f, &[(v11.clone(), 1)]).unwrap(), None);
    let g = principal_generator(&f, &[(v11, 1)]).unwrap().unwrap();
    assert_eq!(f.norm(&g).numer().magnitude().to_string(), "11");
    let f = k(60);
    let v3 = parse_place(&f, "3").unwrap();
    assert_eq!(tp_principal_generator(&f, &[(v3.clone(), 1)]).unwrap(), None);
    assert_eq!(principal_generator(&f, &[(v3, 1)]).unwrap(), None);
}

#[test]
fn s_unit_index_examples() {
    let f = k(12);
    assert_eq!(s_unit_tp_index(&f, &pl(&f, "2,97+")).unwrap(), 4);
    let f = k(5);
    assert_eq!(s_unit_tp_index(&f, &pl(&f, "2,41+")).unwrap(), 4);
    assert_eq!(s_unit_tp_index(&f, &[]).unwrap(), 1);
}

#[test]
fn index_and_degree_examples() {
    let f = k(5);
    for rf in ["2,41+", "2,5", "3,31-"] {
        assert_eq!(kprime_degree(&f, &pl(&f, rf)), 1);
    }
    for (d, rf) in [(8, "2,3"), (12, "2,3"), (5, "2,5")] {
        let f = k(d);
        assert_eq!(index_norm_one_in_normalizer(&f, &pl(&f, rf)).unwrap(), 4);
    }
    let f = k(8);
    let rf = pl(&f, "2,3");
    assert_eq!(riehm_index(&rf, &rf[0]).unwrap(), 3);
}

/// c ≻ 0 with ord_v(c) odd and even valuations away from R_f ∪ {v}.
fn certifies(f: &RealQuadraticField, rf: &[FinitePlace], v: &FinitePlace, c: &FieldElement) -> bool {
    f.is_totally_positive(c)
        && ord_v(f, v, c) % 2 != 0
        && support(f, c).iter().all(|w| w == v || rf.contains(w) || ord_v(f, w, c) % 2 == 0)
}

#[test]
fn maximality_certificates() {
    let f = k(5);
    let rf = pl(&f, "2,5");
    let v3 = parse_place(&f, "3").unwrap();
    assert_eq!(maximality_certificate(&f, &rf, &v3).unwrap(), Some(FieldElement::from_ints(3, 0)));
    // (9+√5)/2 has norm 19 and lies in the place labelled 19-
    let v19 = parse_place(&f, "19-").unwrap();
    assert_eq!(maximality_certificate(&f, &rf, &v19).unwrap(), Some(half(9, 1)));
    assert!(certifies(&f, &rf, &v19, &half(9, 1)));

    let f = k(12);
    let rf = pl(&f, "2,3");
    let v11 = parse_place(&f, "11+").unwrap();
    let ours = maximality_certificate(&f, &rf, &v11).unwrap().unwrap();
    let quoted = f.mul(&FieldElement::from_ints(1, 2), &FieldElement::from_ints(1, 1));
    assert!(certifies(&f, &rf, &v11, &ours));
    assert!(certifies(&f, &rf, &v11, &quoted));
}

#[test]
fn chi_maximal_examples() {
    let f = k(5);
    let rf = pl(&f, "2,5");
    assert_eq!(chi_maximal(&f, &rf, &pl(&f, "3")).unwrap(), rat(1, 4));
    assert_eq!(chi_maximal(&f, &rf, &pl(&f, "19+")).unwrap(), rat(1, 2));
}

#[test]
fn torsion_examples() {
    let orders = |d| possible_orders(&k(d)).into_iter().collect::<Vec<_>>();
    assert_eq!(orders(5), [2, 3, 4, 5, 6, 10]);
    assert_eq!(orders(8), [2, 3, 4, 6, 8]);
    assert_eq!(orders(13), [2, 3, 4, 6]);

    let f = k(5);
    let v2 = parse_place(&f, "2").unwrap();
    let v41 = parse_place(&f, "41+").unwrap();
    assert_eq!(splits_in_cyclotomic(&f, &v2, 3).unwrap(), CyclotomicSplitting::Split);
    assert_eq!(splits_in_cyclotomic(&f, &v41, 4).unwrap(), CyclotomicSplitting::Split);
    assert_eq!(splits_in_cyclotomic(&f, &v41, 5).unwrap(), CyclotomicSplitting::Split);
    assert_eq!(splits_in_sqrt_minus_a(&f, &v41, &FieldElement::from_ints(2, 0)), LocalSplitting::Split);
    let f8 = k(8);
    let w2 = parse_place(&f8, "2").unwrap();
    assert_eq!(splits_in_sqrt_minus_a(&f8, &w2, &FieldElement::from_ints(5, 2)), LocalSplitting::Split);
    let f60 = k(60);
    let u2 = parse_place(&f60, "2").unwrap();
    // Q(√−3) ⊂ k(√−3) and 2 is inert in Q(√−3), so v2 cannot split
    assert_eq!(splits_in_sqrt_minus_a(&f60, &u2, &FieldElement::from_ints(3, 0)), LocalSplitting::Inert);

    assert!(has_torsion(&f, &pl(&f, "2,3,5,11+"), &[], 2).unwrap().is_some());
    assert!(has_torsion(&f, &pl(&f, "2,41+"), &[], 3).unwrap().is_none());
    assert!(has_torsion(&f, &pl(&f, "2,5"), &[], 5).unwrap().is_some());

    let r = torsion_spectrum(&f, &pl(&f, "2,5"), &[]).unwrap();
    assert!(r.orders_present.contains(&5) && r.orders_present.contains(&10));
    let r = torsion_spectrum(&f8, &pl(&f8, "2,17+"), &[]).unwrap();
    assert!(r.norm_one_orders.contains(&3) && !r.norm_one_orders.contains(&2));
    let f13 = k(13);
    let r = torsion_spectrum(&f13, &pl(&f13, "3+,13"), &[]).unwrap();
    assert!(index_admissible(&r, 2));

    let rep = |o: &[u32]| TorsionReport { orders_present: o.iter().copied().collect(), witnesses: Default::default(), norm_one_orders: BTreeSet::new() };
    assert!(!index_admissible(&rep(&[3]), 10));
    assert!(index_admissible(&rep(&[5, 10]), 20));
    assert!(index_admissible(&rep(&[2]), 2));
}

#[test]
fn square_class_examples() {
    let f = k(5);
    let h = h_group(&f, &pl(&f, "2,41+"), &[]).unwrap();
    assert_eq!(h.order, 4);
    let two = FieldElement::from_ints(2, 0);
    // √5 ≡ 13 at v41+, so its generator is (13−√5)/2
    let pi41 = half(13, -1);
    let prod = f.mul(&two, &pi41);
    let idx: BTreeSet<_> = [FieldElement::one(), two, pi41, prod].iter().map(|x| h.class_index(&f, x).unwrap()).collect();
    assert_eq!(idx.len(), 4);

    let f = k(12);
    let h = h_group(&f, &pl(&f, "2,3"), &pl(&f, "11+")).unwrap();
    assert_eq!(h.order, 8);
    let h = h_group(&f, &pl(&f, "2,13+"), &pl(&f, "3")).unwrap();
    // [π13] and [π2π3] as quoted, together with [ε] = [2]
    assert_eq!(h.order, 8);
}

#[test]
fn screening_examples() {
    assert_eq!(integrality_screen(12), [5, 8, 12]);
    assert!(!integrality_screen(60).contains(&40));
    assert_eq!(table1_row(&k(28)).value, rat(1, 6));
    assert_eq!(table1_row(&k(712)).value, rat(64, 3));
}

#[test]
fn classification_examples() {
    let c = candidate_classes().unwrap();
    let find = |key: &str| c.iter().find(|x| x.key() == key).unwrap_or_else(|| panic!("{} missing", key));
    assert!(find("[5, 2 5, {}, 20]").status.counts());
    assert!(find("[8, 2 3, {}, 12]").status.counts());
    assert_eq!(find("[13, 3+ 3-, {}, 12]").status, Status::Candidate);
    assert_eq!(find("[17, 2+ 2-, {}, 24]").status, Status::Candidate);
    assert!(matches!(find("[5, 2 5, {19+}, 2]").status, Status::Excluded(_)));
    for x in &c {
        assert_eq!(&x.chi * num_rational::BigRational::from_integer(x.index.into()), rat(1, 1), "{}", x.key());
        if let Status::Confirmed(w) = &x.status {
            assert!(!w.is_empty(), "{}", x.key());
        }
    }
}
