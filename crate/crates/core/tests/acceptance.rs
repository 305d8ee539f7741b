//! Acceptance run over criteria 1 to 10. Every criterion prints one line; the
//! test fails only when a criterion outside `KNOWN_FAILING` fails.

use std::collections::BTreeSet;
use std::time::Instant;

use fqlat_core::arith::{kronecker, primes_up_to};
use fqlat_core::bounds::{degree_bound_report, psi_interval, root_disc_interval, Interval, OdlyzkoTable, BANDS};
use fqlat_core::chi::{chi_maximal, chi_norm_one, chi_normalizer, rat, riehm_index, riehm_index_product};
use fqlat_core::classify::{
    candidate_classes, classify_field, discriminant_bound, enumerate_ramification, enumerate_s, integrality_screen, table1,
};
use fqlat_core::field::{character_value, field_of_discriminant, FieldElement};
use fqlat_core::place::{local_square_kind, parse_place, parse_places, splitting_type};
use fqlat_core::reconcile::{published_classes, reconcile, render_markdown};
use fqlat_core::torsion::{has_torsion, possible_orders, torsion_spectrum};
use fqlat_core::{FinitePlace, RealQuadraticField, SplitKind, Status, WitnessTable};
use rand::{Rng, SeedableRng};

const SCREENED: [i64; 23] = [5, 8, 12, 13, 17, 21, 24, 28, 29, 33, 41, 60, 65, 69, 77, 137, 145, 161, 221, 285, 353, 429, 712];

/// Criteria that fail against the published values, with the reason.
const KNOWN_FAILING: [(u32, &str); 4] = [
    (4, "d=5 also admits v3v11 (χ = 1/3); d=60 refined drops v3v5 since |H(B)/k*²| = 4 gives χ = 2"),
    (5, "Q(√3), v2v3 also admits S = {v47}; Q(√2) admits nonempty S, e.g. v2v3 with {v7}, {v23}"),
    (7, "P(34,1) = 28.43204..., above the quoted 28.43 (the cap n ≤ 33 still follows)"),
    (9, "48 non-excluded classes against 39; see reconciliation.md"),
];

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn labels(v: &[FinitePlace]) -> String {
    v.iter().map(|p| p.label()).collect::<Vec<_>>().join(" ")
}

/// Rational primes under a set of places; conjugate places collapse.
fn primes(v: &[FinitePlace]) -> Vec<u64> {
    let mut p: Vec<u64> = v.iter().map(|x| x.p).collect();
    p.sort();
    p
}

fn prime_sets<'a, I: IntoIterator<Item = &'a Vec<FinitePlace>>>(it: I) -> BTreeSet<Vec<u64>> {
    it.into_iter().map(|v| primes(v)).collect()
}

fn set(xs: &[&[u64]]) -> BTreeSet<Vec<u64>> {
    xs.iter().map(|x| x.to_vec()).collect()
}

fn criterion1() -> Outcome {
    let expected = [
        (5, 1, 1, (1, 120)),
        (8, 1, 1, (1, 48)),
        (12, 1, 1, (1, 24)),
        (13, 1, 1, (1, 24)),
        (17, 1, 2, (1, 24)),
        (21, 1, 1, (1, 12)),
        (24, 1, 1, (1, 8)),
        (28, 1, 1, (1, 6)),
        (29, 1, 1, (1, 8)),
        (33, 1, 2, (1, 8)),
        (41, 1, 2, (1, 6)),
        (60, 2, 1, (1, 2)),
        (65, 2, 2, (1, 3)),
        (69, 1, 1, (1, 2)),
        (77, 1, 1, (1, 2)),
        (137, 1, 2, (1, 1)),
        (145, 4, 2, (4, 3)),
        (161, 1, 2, (4, 3)),
        (221, 2, 1, (8, 3)),
        (285, 2, 1, (4, 1)),
        (353, 1, 2, (4, 1)),
        (429, 2, 1, (8, 1)),
        (712, 2, 1, (64, 3)),
    ];
    let t = Instant::now();
    let rows = table1(1285).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let got: Vec<_> = rows.iter().map(|r| (r.d, r.h, r.t, r.value.clone())).collect();
    let want: Vec<_> = expected.iter().map(|&(d, h, t, (n, m))| (d, h, t, rat(n, m))).collect();
    check(got == want && secs < 10.0, format!("{} rows, {:.2} s", rows.len(), secs))
}

fn criterion2() -> Outcome {
    let t = Instant::now();
    let s = integrality_screen(1285);
    let secs = t.elapsed().as_secs_f64();
    check(s == SCREENED && secs < 30.0, format!("{} discriminants, {:.2} s", s.len(), secs))
}

fn criterion3() -> Outcome {
    let b = discriminant_bound();
    check((b.coarse, b.refined) == (3325, 1285), format!("({}, {})", b.coarse, b.refined))
}

fn criterion4() -> Outcome {
    let field = |d| field_of_discriminant(d).unwrap();
    let mut notes = Vec::new();
    let mut ok = true;
    let mut cmp = |name: &str, got: BTreeSet<Vec<u64>>, want: BTreeSet<Vec<u64>>| {
        if got != want {
            ok = false;
            let extra: Vec<_> = got.difference(&want).collect();
            let missing: Vec<_> = want.difference(&got).collect();
            notes.push(format!("{}: extra {:?} missing {:?}", name, extra, missing));
        }
    };
    let e5 = enumerate_ramification(&field(5)).unwrap();
    cmp(
        "d5",
        prime_sets(&e5.raw),
        set(&[&[2, 41], &[2, 11], &[2, 5], &[2, 3], &[2, 3, 5, 11], &[3, 31], &[5, 11], &[5, 31], &[5, 61]]),
    );
    let e8 = enumerate_ramification(&field(8)).unwrap();
    cmp("d8", prime_sets(&e8.raw), set(&[&[2, 3], &[2, 5], &[2, 7], &[2, 17], &[2, 97], &[3, 7], &[7, 17]]));
    let e12 = enumerate_ramification(&field(12)).unwrap();
    cmp(
        "d12",
        prime_sets(e12.refined.iter().map(|(r, _)| r)),
        set(&[&[2, 3], &[2, 5], &[2, 7], &[2, 13], &[3, 5], &[3, 13]]),
    );
    let e60 = enumerate_ramification(&field(60)).unwrap();
    cmp("d60", prime_sets(e60.refined.iter().map(|(r, _)| r)), set(&[&[2, 3], &[2, 5], &[3, 5]]));
    let k65 = field(65);
    let e65 = enumerate_ramification(&k65).unwrap();
    let r65: Vec<String> = e65.refined.iter().map(|(r, _)| labels(r)).collect();
    if r65 != ["2+ 2-"] {
        ok = false;
        notes.push(format!("d65: {:?}", r65));
    }
    let e145 = enumerate_ramification(&field(145)).unwrap();
    if !e145.refined.is_empty() {
        ok = false;
        notes.push(format!("d145: {} sets", e145.refined.len()));
    }
    check(ok, if notes.is_empty() { "all lemma sets reproduced".into() } else { notes.join("; ") })
}

fn s_sets(k: &RealQuadraticField, rf: &str) -> (BTreeSet<Vec<u64>>, Vec<String>) {
    let rf = parse_places(k, rf).unwrap();
    let c = enumerate_s(k, &rf).unwrap();
    let certs = c.iter().filter_map(|c| c.certificate.as_ref().map(|x| k.render(x))).collect();
    (prime_sets(c.iter().map(|c| &c.s)), certs)
}

fn criterion5() -> Outcome {
    let mut notes = Vec::new();
    let k5 = field_of_discriminant(5).unwrap();
    let (s, certs) = s_sets(&k5, "2,5");
    let c_19 = k5.render(&FieldElement::from_frac(9, 1, 2));
    let ok5 = s == set(&[&[], &[3], &[19]]) && certs.contains(&"3".to_string()) && certs.contains(&c_19);
    if !ok5 {
        notes.push(format!("Q(√5) v2v5: {:?} {:?}", s, certs));
    }
    let k12 = field_of_discriminant(12).unwrap();
    let (s, _) = s_sets(&k12, "2,3");
    let ok12 = s == set(&[&[], &[11], &[23]]);
    if !ok12 {
        notes.push(format!("Q(√3) v2v3: {:?}", s));
    }
    let k8 = field_of_discriminant(8).unwrap();
    let e8 = enumerate_ramification(&k8).unwrap();
    let mut nonempty = Vec::new();
    for (rf, _) in &e8.refined {
        for c in enumerate_s(&k8, rf).unwrap() {
            if !c.s.is_empty() {
                nonempty.push(format!("{} {{{}}}", labels(rf), labels(&c.s)));
            }
        }
    }
    if !nonempty.is_empty() {
        notes.push(format!("Q(√2): {} nonempty S, first {}", nonempty.len(), nonempty[0]));
    }
    let pass = ok5 && ok12 && nonempty.is_empty();
    check(pass, if notes.is_empty() { "all S lists reproduced".into() } else { notes.join("; ") })
}

fn criterion6() -> Outcome {
    let setup = |d: i64, rf: &str| {
        let k = field_of_discriminant(d).unwrap();
        let rf = parse_places(&k, rf).unwrap();
        (k, rf)
    };
    let pair = |d, rf| {
        let (k, rf) = setup(d, rf);
        (chi_norm_one(&k, &rf).unwrap(), chi_normalizer(&k, &rf).unwrap())
    };
    let s_chi = |d, rf, s: &str| {
        let (k, rf) = setup(d, rf);
        let s = parse_places(&k, s).unwrap();
        chi_maximal(&k, &rf, &s).unwrap()
    };
    let mut ok = pair(5, "2,41+") == (rat(2, 1), rat(1, 2));
    ok &= pair(5, "2,11+") == (rat(1, 2), rat(1, 8));
    ok &= pair(5, "2,5") == (rat(1, 5), rat(1, 20));
    ok &= s_chi(5, "2,5", "3") == rat(1, 4);
    ok &= s_chi(5, "2,5", "19+") == rat(1, 2);
    ok &= s_chi(5, "2,5", "19-") == rat(1, 2);
    ok &= s_chi(12, "2,3", "11+") == rat(1, 4);
    let (k, rf) = setup(5, "2,11+");
    let v2 = parse_place(&k, "2").unwrap();
    let v11 = parse_place(&k, "11+").unwrap();
    ok &= riehm_index(&rf, &v2).unwrap() == 5 && riehm_index(&rf, &v11).unwrap() == 6;
    let (k, rf) = setup(12, "2,3");
    let v2 = parse_place(&k, "2").unwrap();
    ok &= riehm_index(&rf, &v2).unwrap() == 3 && riehm_index_product(&rf, &rf).unwrap() == 6;
    check(ok, "χ pairs, χ(Γ⁺_S) and Riehm indices")
}

fn criterion7() -> Outcome {
    let one = Interval::point(1.0);
    let mut notes = Vec::new();
    let mut ok = true;
    let mut cond = |name: String, c: bool| {
        if !c {
            ok = false;
        }
        notes.push(format!("{} {}", name, if c { "ok" } else { "FAILS" }));
    };
    let p54 = psi_interval(54, 1);
    cond(format!("Ψ_f(54,1) ∈ [{:.4}, {:.4}] > 1.44", p54.lo, p54.hi), p54.gt(Interval::around(1.44)));
    let p32 = psi_interval(32, 2);
    cond(format!("Ψ_f(32,2) ∈ [{:.4}, {:.4}] > 1.5", p32.lo, p32.hi), p32.gt(Interval::around(1.5)));
    let p34 = root_disc_interval(34, 1);
    cond(format!("P(34,1) ∈ [{:.5}, {:.5}] < 28.43", p34.lo, p34.hi), p34.lt(Interval::around(28.43)));
    let table = OdlyzkoTable::shipped();
    // the table stores strict lower bounds, so m_r(34) > 28.82 is the row itself
    cond("m_r(34) > 28.82".into(), table.get(34).is_some_and(|b| b >= 28.82));
    let r = degree_bound_report(&table).unwrap();
    cond(format!("degree cap {}", r.degree_cap), r.degree_cap == 33);
    let bands: Vec<_> = r.bands.iter().map(|b| (b.lo, b.hi, b.q_max)).collect();
    cond("q-band table".into(), bands == BANDS.to_vec());
    cond("Ψ_f(2,1) < 1".into(), psi_interval(2, 1).lt(one));
    check(ok, notes.join("; "))
}

fn criterion8(classes: &[fqlat_core::CandidateClass]) -> Outcome {
    let excluded = [29, 69, 77, 161, 221, 285, 353, 429, 712, 145];
    let bad: Vec<String> = classes.iter().filter(|c| excluded.contains(&c.d_k) && c.status.counts()).map(|c| c.key()).collect();
    check(bad.is_empty(), if bad.is_empty() { "no surviving classes".into() } else { bad.join(", ") })
}

fn criterion9(classes: &[fqlat_core::CandidateClass]) -> Outcome {
    let rec = reconcile(classes, &published_classes());
    let md = render_markdown(&rec);
    let mut notes = vec![format!("published {}, computed {}", rec.published_total, rec.computed_total)];
    for t in &rec.theorems {
        notes.push(format!("{} {}/{} ({} unflagged)", t.theorem, t.computed, t.published, t.unflagged()));
    }
    let open = ["[13, 3+ 3-, {}, 12]", "[17, 2+ 2-, {}, 24]"];
    let open_ok = open.iter().all(|k| classes.iter().any(|c| c.key() == *k && c.status == Status::Candidate));
    let flagged_ok = ["- [5, 2 3, {}, 10]: ", "- [5, 5 11+, {}, 6]: ", "- [5, v2v31, ∅, 2] (flagged", "- [5, v5v31, ∅, 2] (flagged"].iter().all(|k| md.contains(k));
    notes.push(format!("open classes Candidate: {}", open_ok));
    notes.push(format!("flagged entries documented: {}", flagged_ok));
    check(rec.passes() && open_ok && flagged_ok, notes.join("; "))
}

fn omega_root_count(k: &RealQuadraticField, p: u64) -> usize {
    let (c1, c0) = k.omega_poly();
    let p = p as i64;
    (0..p).filter(|&x| (x * x + c1 * x + c0).rem_euclid(p) == 0).count()
}

fn criterion10(classes_by_field: &[(RealQuadraticField, Vec<fqlat_core::CandidateClass>)]) -> Outcome {
    let mut notes = Vec::new();
    let fields: Vec<&RealQuadraticField> = classes_by_field.iter().map(|(k, _)| k).collect();

    let kappa = fields.iter().all(|k| {
        let d = k.d_k;
        (1..2 * d).all(|a| (1..60).all(|b| character_value(k, a * b) == character_value(k, a) * character_value(k, b)))
    });
    notes.push(format!("κ multiplicative: {}", kappa));

    let splitting = fields.iter().all(|k| {
        primes_up_to(1000).into_iter().all(|p| {
            let pl = splitting_type(k, p).unwrap();
            let ef: u64 = pl.iter().map(|v| if v.kind == SplitKind::Ramified { 2 } else { 1 } * if v.nv == p { 1 } else { 2 }).sum();
            let norm: u64 = pl.iter().map(|v| if v.kind == SplitKind::Ramified { v.nv * v.nv } else { v.nv }).product();
            let kind = match omega_root_count(k, p) {
                2 => SplitKind::Split,
                1 => SplitKind::Ramified,
                _ => SplitKind::Inert,
            };
            ef == 2 && norm == p * p && pl.iter().all(|v| v.kind == kind)
        })
    });
    notes.push(format!("norm products: {}", splitting));

    let mut h_bad = Vec::new();
    for d in (5..=1285i64).filter(|&d| fqlat_core::arith::is_fundamental(d as u64)) {
        let k = field_of_discriminant(d).unwrap();
        let s: f64 = (1..d).map(|r| kronecker(d, r) as f64 * (std::f64::consts::PI * r as f64 / d as f64).sin().ln()).sum();
        let h = -s / (2.0 * k.regulator());
        if (h - k.h() as f64).abs() > 1e-3 {
            h_bad.push(d);
        }
    }
    notes.push(format!("class numbers: {} mismatches", h_bad.len()));

    let mut rng = rand::rngs::StdRng::seed_from_u64(20);
    let small = primes_up_to(200);
    let mut qr_bad = 0;
    let mut trials = 0;
    while trials < 200 {
        let k = fields[rng.random_range(0..fields.len())];
        let p = small[rng.random_range(1..small.len())];
        let places = splitting_type(k, p).unwrap();
        let v = &places[rng.random_range(0..places.len())];
        let (s, t) = (rng.random_range(-60i64..60), rng.random_range(-60i64..60));
        let pi = p as i64;
        let (c1, c0) = k.omega_poly();
        let brute = if v.kind == SplitKind::Inert {
            if s.rem_euclid(pi) == 0 && t.rem_euclid(pi) == 0 {
                continue;
            }
            (0..pi).any(|x| {
                (0..pi).any(|y| (x * x - c0 * y * y - s).rem_euclid(pi) == 0 && (2 * x * y - c1 * y * y - t).rem_euclid(pi) == 0)
            })
        } else {
            let r = (s + t * v.root()).rem_euclid(pi);
            if r == 0 {
                continue;
            }
            (0..pi).any(|x| (x * x - r).rem_euclid(pi) == 0)
        };
        let a = &FieldElement::from_ints(s, 0) + &k.mul(&FieldElement::from_ints(t, 0), &k.omega());
        if local_square_kind(k, v, &a).is_split() != brute {
            qr_bad += 1;
        }
        trials += 1;
    }
    notes.push(format!("residue squares: {} mismatches in {}", qr_bad, trials));

    let mut link_bad = 0;
    for (k, classes) in classes_by_field {
        for c in classes {
            let rf = parse_places(k, &c.d_b.join(",")).unwrap();
            let s = parse_places(k, &c.s.join(",")).unwrap();
            let rep = torsion_spectrum(k, &rf, &s).unwrap();
            for (a, b) in [(3u32, 6u32), (5, 10)] {
                if possible_orders(k).contains(&b) && rep.orders_present.contains(&a) != rep.orders_present.contains(&b) {
                    link_bad += 1;
                }
            }
            if rep.orders_present.contains(&3) != has_torsion(k, &rf, &s, 3).unwrap().is_some() && !rep.orders_present.contains(&6) {
                link_bad += 1;
            }
        }
    }
    notes.push(format!("odd/even torsion linkage: {} mismatches", link_bad));

    let mut conj_bad = 0;
    for (k, classes) in classes_by_field {
        let key = |c: &fqlat_core::CandidateClass, flip: bool| {
            let map = |xs: &[String]| {
                let mut v: Vec<String> = xs
                    .iter()
                    .map(|l| {
                        let p = parse_place(k, l).unwrap();
                        if flip { p.conjugate(k) } else { p }.label()
                    })
                    .collect();
                v.sort();
                v
            };
            (map(&c.d_b), map(&c.s), c.index, c.chi.clone(), c.status.name(), c.torsion.orders_present.clone())
        };
        let a: BTreeSet<_> = classes.iter().map(|c| key(c, false)).collect();
        let b: BTreeSet<_> = classes.iter().map(|c| key(c, true)).collect();
        if a != b {
            conj_bad += 1;
        }
    }
    notes.push(format!("conjugation equivariance: {} fields differ", conj_bad));

    let pass = kappa && splitting && h_bad.is_empty() && qr_bad == 0 && link_bad == 0 && conj_bad == 0;
    check(pass, notes.join("; "))
}

#[test]
fn acceptance() {
    let start = Instant::now();
    let classes = candidate_classes().unwrap();
    let witnesses = WitnessTable::shipped();
    let by_field: Vec<_> = SCREENED
        .iter()
        .map(|&d| {
            let k = field_of_discriminant(d).unwrap();
            let c = classify_field(&k, &witnesses).unwrap();
            (k, c)
        })
        .collect();
    let results = [
        criterion1(),
        criterion2(),
        criterion3(),
        criterion4(),
        criterion5(),
        criterion6(),
        criterion7(),
        criterion8(&classes),
        criterion9(&classes),
        criterion10(&by_field),
    ];
    let mut unexpected = Vec::new();
    for (i, r) in results.iter().enumerate() {
        let n = i as u32 + 1;
        println!("criterion {:2}: {} ({})", n, if r.pass { "PASS" } else { "FAIL" }, r.detail);
        if !r.pass {
            match KNOWN_FAILING.iter().find(|(k, _)| *k == n) {
                Some((_, why)) => println!("              known: {}", why),
                None => unexpected.push(n),
            }
        }
    }
    println!("total {:.1} s", start.elapsed().as_secs_f64());
    assert!(unexpected.is_empty(), "criteria failed unexpectedly: {:?}", unexpected);
}
