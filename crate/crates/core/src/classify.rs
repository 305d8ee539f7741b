//! Discriminant screening, enumeration of (d_B, S), candidate classes and
//! their final status.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::is_fundamental;
use crate::chi::{
    chi_norm_one, chi_normalizer, eprime_product, is_reciprocal_integer, maximality_certificate, pow2,
    sigma_product, ExactChi,
};
use crate::error::Result;
use crate::field::{bernoulli_b2_of_discriminant, field_of_discriminant, FieldElement, RealQuadraticField};
use crate::forms::NarrowClassGroup;
use crate::place::{places_up_to, FinitePlace};
use crate::torsion::{analyze, index_admissible, TorsionAnalysis, TorsionReport};
use crate::witness::WitnessTable;

/// Output of the d_k ≤ 1285 argument.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiscriminantBound {
    pub coarse: u64,
    pub refined: u64,
    /// Fundamental d ≤ coarse with class number above 9, as (d, h).
    pub large_class_number: Vec<(u64, u64)>,
    /// Largest |Cl/Cl²| seen for d ≤ coarse.
    pub max_square_quotient: u64,
    /// Bound on [k'_B:k] substituted in the second step.
    pub kprime_cap: u64,
}

/// ζ(4) = π⁴/90
pub fn zeta4() -> f64 {
    PI.powi(4) / 90.0
}

/// d^{3/2} ζ_k(2) ≤ 2⁶ π⁴ [k'_B:k] with ζ_k(2) ≥ ζ(4): first with
/// [k'_B:k] ≤ √(d/3), then with the class-number cap.
pub fn discriminant_bound() -> DiscriminantBound {
    let coarse = (2f64.powi(6) * PI.powi(4) / (3f64.sqrt() * zeta4())).floor() as u64;
    let mut large = Vec::new();
    let mut max_q = 1u64;
    let mut max_h_small = 1u64;
    for d in 5..=coarse {
        if !is_fundamental(d) {
            continue;
        }
        let g = NarrowClassGroup::new(d as i64);
        let h = g.wide_order() as u64;
        let q = g.wide_square_quotient() as u64;
        max_q = max_q.max(q);
        if h > 9 {
            large.push((d, h));
        } else {
            max_h_small = max_h_small.max(h);
        }
    }
    // |Cl/Cl²| is a power of two dividing h, so h ≤ 9 caps it at 8
    let from_h = 1u64 << (63 - max_h_small.leading_zeros());
    let kprime_cap = from_h.max(max_q);
    let refined = (2f64.powi(6) * PI.powi(4) * kprime_cap as f64 / zeta4()).powf(2.0 / 3.0).floor() as u64;
    DiscriminantBound { coarse, refined, large_class_number: large, max_square_quotient: max_q, kprime_cap }
}

/// 6·2^{3+t}/B₂,κ has odd denominator 1, i.e. the odd part of the numerator
/// of B₂,κ divides 3.
fn passes_integrality(d: i64) -> bool {
    let b2 = bernoulli_b2_of_discriminant(d);
    let mut num = b2.numer().abs();
    while num.is_even() && !num.is_zero() {
        num /= 2;
    }
    (BigInt::from(3) % num).is_zero()
}

pub fn integrality_screen(max_d: u64) -> Vec<i64> {
    (5..=max_d).filter(|&d| is_fundamental(d)).map(|d| d as i64).filter(|&d| passes_integrality(d)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table1Row {
    pub d: i64,
    pub h: u64,
    pub t: u32,
    /// 2^α·g = B₂,κ / (6·2^{3+t})
    #[serde(with = "ratio_string")]
    pub value: BigRational,
}

pub fn table1_row(field: &RealQuadraticField) -> Table1Row {
    let b2 = crate::field::bernoulli_b2(field);
    Table1Row {
        d: field.d_k,
        h: field.h(),
        t: field.t,
        value: b2 / BigRational::from_integer(BigInt::from(6u64 << (3 + field.t))),
    }
}

pub fn table1(max_d: u64) -> Result<Vec<Table1Row>> {
    integrality_screen(max_d).into_iter().map(|d| Ok(table1_row(&field_of_discriminant(d)?))).collect()
}

/// Raw and refined ramification sets of one field.
#[derive(Clone, Debug)]
pub struct RamificationEnumeration {
    /// Sets with E'_B dividing 6·2^{3+t'+α}/B₂,κ for some admissible α.
    pub raw: Vec<Vec<FinitePlace>>,
    /// Sets with exact χ(NΓ⁺_O) ≤ 1 and a power of two as numerator.
    pub refined: Vec<(Vec<FinitePlace>, ExactChi)>,
}

/// log₂ |Cl⁺/Cl⁺²|, the largest possible α.
fn alpha_max(field: &RealQuadraticField) -> u32 {
    let g = &field.narrow;
    (g.quotient_order(&g.squares()) as u64).trailing_zeros()
}

fn is_power_of_two(n: &BigInt) -> bool {
    n.is_positive() && (n & (n - BigInt::one())).is_zero()
}

/// T(t', α) = 6·2^{3+t'+α}/B₂,κ, so that χ(NΓ⁺_O) = E'_B / T.
fn divisor_cap(b2: &BigRational, t_prime: u32, alpha: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(6)) * pow2(3 + t_prime as i64 + alpha as i64) / b2
}

pub fn enumerate_ramification(field: &RealQuadraticField) -> Result<RamificationEnumeration> {
    let b2 = crate::field::bernoulli_b2(field);
    let amax = alpha_max(field);
    let t = field.t;
    let caps: Vec<Vec<BigRational>> =
        (0..=t).map(|tp| (0..=amax).map(|a| divisor_cap(&b2, tp, a)).collect()).collect();
    let cap_max = caps.iter().flatten().max().cloned().unwrap();
    // e'_v = (Nv−1)/2 ≤ cap gives Nv ≤ 2·cap + 1
    let bound = (cap_max.clone() * BigRational::from_integer(2.into()) + BigRational::one()).floor().to_integer();
    let bound = bound.to_u64().unwrap_or(0).max(2);
    let mut cands = places_up_to(field, bound);
    cands.retain(|v| v.nv == 2 || v.e_prime() <= cap_max);
    cands.sort_by_key(|v| (v.nv, v.clone()));

    let mut sets: Vec<Vec<FinitePlace>> = Vec::new();
    fn dfs(
        cands: &[FinitePlace],
        start: usize,
        cur: &mut Vec<FinitePlace>,
        e: BigRational,
        cap: &BigRational,
        out: &mut Vec<Vec<FinitePlace>>,
    ) {
        if cur.len() >= 2 && cur.len() % 2 == 0 {
            out.push(cur.clone());
        }
        for j in start..cands.len() {
            let v = &cands[j];
            let ne = if v.nv == 2 { e.clone() } else { &e * v.e_prime() };
            if &ne > cap {
                continue;
            }
            cur.push(v.clone());
            dfs(cands, j + 1, cur, ne, cap, out);
            cur.pop();
        }
    }
    dfs(&cands, 0, &mut Vec::new(), BigRational::one(), &cap_max, &mut sets);

    let mut raw = Vec::new();
    let mut refined = Vec::new();
    for mut rf in sets {
        rf.sort();
        let tp = rf.iter().filter(|v| v.p == 2).count() as u32;
        let e = eprime_product(&rf);
        if caps[tp as usize].iter().any(|c| (c / &e).is_integer()) {
            raw.push(rf.clone());
        }
        let c = chi_normalizer(field, &rf)?;
        if c <= BigRational::one() && is_power_of_two(c.numer()) {
            refined.push((rf, c));
        }
    }
    raw.sort();
    refined.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(RamificationEnumeration { raw, refined })
}

/// A set S admitted by the volume conditions, with its χ and certificate.
#[derive(Clone, Debug)]
pub struct SCandidate {
    pub s: Vec<FinitePlace>,
    /// χ(Γ⁺_{S,O}); None when |S| ≥ 2 leaves m undetermined.
    pub chi: Option<ExactChi>,
    pub certificate: Option<FieldElement>,
    /// Possible χ values over 0 ≤ m ≤ |S| for |S| ≥ 2.
    pub ambiguous: Vec<ExactChi>,
}

fn admissible_chi(c: &BigRational) -> bool {
    c <= &BigRational::one() && is_reciprocal_integer(c)
}

/// All S with E_S | 2^{|S|}/χ(NΓ⁺_O) and χ(Γ⁺_{S,O}) a reciprocal integer;
/// singletons must carry a maximality certificate.
pub fn enumerate_s(field: &RealQuadraticField, rf: &[FinitePlace]) -> Result<Vec<SCandidate>> {
    let chi_n = chi_normalizer(field, rf)?;
    let mut out = Vec::new();
    if admissible_chi(&chi_n) {
        out.push(SCandidate { s: vec![], chi: Some(chi_n.clone()), certificate: None, ambiguous: vec![] });
    }
    if chi_n > BigRational::one() {
        return Ok(out);
    }
    let inv = BigRational::one() / &chi_n;
    // E_S/2^{|S|} ≤ 1/χ(NΓ⁺_O) and every factor σ_v/2 is at least 3/2
    let two_inv = &inv * pow2(1);
    let lim = two_inv.floor().to_integer().to_u64().unwrap_or(0);
    let pool: Vec<FinitePlace> = places_up_to(field, lim)
        .into_iter()
        .filter(|v| !rf.contains(v) && BigRational::from_integer(v.sigma().into()) <= two_inv)
        .collect();
    let mut sets = Vec::new();
    collect_s(&pool, 0, &mut Vec::new(), &BigRational::one(), &inv, &mut sets);
    for s in sets {
        let size = s.len();
        let es = sigma_product(&s);
        if !(&inv * pow2(size as i64) / &es).is_integer() {
            continue;
        }
        if size == 1 {
            let cert = maximality_certificate(field, rf, &s[0])?;
            if cert.is_none() {
                continue;
            }
            let c = &chi_n * &es / pow2(1);
            if admissible_chi(&c) {
                out.push(SCandidate { s, chi: Some(c), certificate: cert, ambiguous: vec![] });
            }
        } else {
            let options: Vec<ExactChi> =
                (0..=size as i64).map(|m| &chi_n * &es / pow2(m)).filter(admissible_chi).collect();
            if !options.is_empty() {
                out.push(SCandidate { s, chi: None, certificate: None, ambiguous: options });
            }
        }
    }
    Ok(out)
}

/// Nonempty subsets with Π σ_v/2 ≤ `cap`.
fn collect_s(
    pool: &[FinitePlace],
    start: usize,
    cur: &mut Vec<FinitePlace>,
    ratio: &BigRational,
    cap: &BigRational,
    out: &mut Vec<Vec<FinitePlace>>,
) {
    for j in start..pool.len() {
        let r = ratio * BigRational::new(pool[j].sigma().into(), 2.into());
        if &r > cap {
            continue;
        }
        cur.push(pool[j].clone());
        out.push(cur.clone());
        collect_s(pool, j + 1, cur, &r, cap, out);
        cur.pop();
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "detail")]
pub enum Status {
    Candidate,
    Excluded(String),
    Confirmed(String),
    PaperDiscrepant(String),
}

impl Status {
    pub fn counts(&self) -> bool {
        matches!(self, Status::Candidate | Status::Confirmed(_))
    }

    pub fn describe(&self) -> String {
        match self {
            Status::Candidate => "Candidate".into(),
            Status::Excluded(r) => format!("Excluded ({})", r),
            Status::Confirmed(w) => format!("Confirmed ({})", w),
            Status::PaperDiscrepant(n) => format!("PaperDiscrepant ({})", n),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Status::Candidate => "Candidate",
            Status::Excluded(_) => "Excluded",
            Status::Confirmed(_) => "Confirmed",
            Status::PaperDiscrepant(_) => "PaperDiscrepant",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateClass {
    pub d_k: i64,
    pub d_b: Vec<String>,
    pub s: Vec<String>,
    #[serde(rename = "I")]
    pub index: u64,
    #[serde(with = "ratio_string")]
    pub chi: ExactChi,
    #[serde(with = "ratio_string")]
    pub chi_normalizer: ExactChi,
    #[serde(with = "ratio_string")]
    pub chi_norm_one: ExactChi,
    pub torsion: TorsionReport,
    pub h_order: usize,
    pub certificate: Option<String>,
    pub status: Status,
    pub evidence: Vec<String>,
    pub conjugate_of: Option<String>,
}

impl CandidateClass {
    pub fn key(&self) -> String {
        format!("[{}, {}, {{{}}}, {}]", self.d_k, self.d_b.join(" "), self.s.join(" "), self.index)
    }
}

/// What the order-two structure of H(S,B) says about torsion-free subgroups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderTwoVerdict {
    /// A subgroup W ≤ H of index I avoiding the torsion classes; its preimage is torsion-free.
    Avoiding(Vec<FieldElement>),
    /// No index-two subgroup of H avoids the torsion classes.
    NoIndexTwo,
    Undecided,
}

/// Subspaces of F₂^r of codimension j avoiding the masks in `bad`, as basis masks.
fn avoiding_subspace(r: usize, j: usize, bad: &[usize]) -> Option<Vec<usize>> {
    if j > r || bad.contains(&0) {
        return None;
    }
    // a codimension-j subspace is the common kernel of j independent functionals
    let funcs: Vec<usize> = (1..1usize << r).collect();
    let dot = |a: usize, b: usize| (a & b).count_ones() % 2;
    fn pick(funcs: &[usize], j: usize, start: usize, chosen: &mut Vec<usize>, test: &dyn Fn(&[usize]) -> bool) -> Option<Vec<usize>> {
        if chosen.len() == j {
            return if test(chosen) { Some(chosen.clone()) } else { None };
        }
        for i in start..funcs.len() {
            chosen.push(funcs[i]);
            if let Some(x) = pick(funcs, j, i + 1, chosen, test) {
                return Some(x);
            }
            chosen.pop();
        }
        None
    }
    let test = |fs: &[usize]| {
        let rank = crate::linalg::rank(&fs.iter().map(|&f| (0..r).map(|b| (f >> b & 1) as u8).collect()).collect::<Vec<_>>());
        rank == fs.len() && bad.iter().all(|&x| fs.iter().any(|&f| dot(f, x) == 1))
    };
    let fs = pick(&funcs, j, 0, &mut Vec::new(), &test)?;
    let kernel: Vec<usize> = (0..1usize << r).filter(|&x| fs.iter().all(|&f| dot(f, x) == 0)).collect();
    // greedy basis of the kernel
    let mut basis: Vec<usize> = Vec::new();
    let mut span = vec![0usize];
    for &x in &kernel {
        if !span.contains(&x) {
            basis.push(x);
            let add: Vec<usize> = span.iter().map(|&y| y ^ x).collect();
            span.extend(add);
        }
    }
    Some(basis)
}

pub fn order_two_verdict(analysis: &TorsionAnalysis, index: u64) -> OrderTwoVerdict {
    let h = &analysis.h;
    let r = h.generators.len();
    if !index.is_power_of_two() {
        return OrderTwoVerdict::Undecided;
    }
    let j = index.trailing_zeros() as usize;
    if let Some(basis) = avoiding_subspace(r, j, &analysis.order_two) {
        return OrderTwoVerdict::Avoiding(basis.into_iter().map(|b| h.elements[b].clone()).collect());
    }
    // index-two subgroups contain the norm-one part, hence map onto hyperplanes of H
    if index == 2 && r >= 1 {
        return OrderTwoVerdict::NoIndexTwo;
    }
    OrderTwoVerdict::Undecided
}

/// Classes the torsion criteria decide differently from the published exclusions.
fn paper_discrepancy(d_k: i64, primes_b: &[u64], s_primes: &[u64]) -> Option<&'static str> {
    match (d_k, primes_b, s_primes) {
        (5, [2, 3], []) => Some(
            "the published exclusion uses an element of order three, but v2 splits in k(ζ3) (Nv2 = 4 ≡ 1 mod 3); the criteria give orders {2,5,10}, all dividing I = 10",
        ),
        (5, [5, 11], []) => Some(
            "the published exclusion uses an element of order five, but v11 splits in k(ζ5) (Nv11 = 11 ≡ 1 mod 5); the criteria give orders {2,3,6}, all dividing I = 6",
        ),
        (12, [2, 13], [3]) => Some(
            "the published list has this class via H = ⟨[π13], [π2π3]⟩ of order 4, but [ε] = [2] is a further class, H has order 8 and every index-two subgroup meets the order-two classes",
        ),
        _ => None,
    }
}

fn primes_of(places: &[FinitePlace]) -> Vec<u64> {
    let mut p: Vec<u64> = places.iter().map(|v| v.p).collect();
    p.sort();
    p
}

fn labels(places: &[FinitePlace]) -> Vec<String> {
    places.iter().map(|v| v.label()).collect()
}

/// Candidate classes of one field, with torsion analysis and statuses.
pub fn classify_field(field: &RealQuadraticField, witnesses: &WitnessTable) -> Result<Vec<CandidateClass>> {
    let en = enumerate_ramification(field)?;
    let mut out = Vec::new();
    for (rf, chi_n) in &en.refined {
        let chi1 = chi_norm_one(field, rf)?;
        for sc in enumerate_s(field, rf)? {
            let analysis = analyze(field, rf, &sc.s)?;
            let conj_rf: Vec<FinitePlace> = sorted(rf.iter().map(|v| v.conjugate(field)).collect());
            let conj_s: Vec<FinitePlace> = sorted(sc.s.iter().map(|v| v.conjugate(field)).collect());
            let chis: Vec<ExactChi> = match &sc.chi {
                Some(c) => vec![c.clone()],
                None => sc.ambiguous.clone(),
            };
            for chi in chis {
                let index = (BigRational::one() / &chi).to_integer().to_u64().expect("index fits");
                let mut evidence = Vec::new();
                let rep = &analysis.report;
                let status = if !index_admissible(rep, index) {
                    let bad: Vec<String> =
                        rep.orders_present.iter().filter(|&&m| index % m as u64 != 0).map(|m| m.to_string()).collect();
                    Status::Excluded(format!("torsion of order {} does not divide I = {}", bad.join(", "), index))
                } else {
                    let only_two = rep.orders_present.iter().all(|&m| m == 2);
                    let mut excluded = None;
                    if rep.orders_present.is_empty() {
                        evidence.push("Γ⁺_{S,O} is torsion-free".to_string());
                    } else if only_two {
                        match order_two_verdict(&analysis, index) {
                            OrderTwoVerdict::Avoiding(basis) if basis.is_empty() => {
                                evidence.push(format!("Γ¹ is torsion-free of index {} in Γ⁺_{{S,O}}", index));
                            }
                            OrderTwoVerdict::Avoiding(basis) => {
                                let b: Vec<String> = basis.iter().map(|x| format!("[{}]", field.render(x))).collect();
                                evidence.push(format!(
                                    "preimage of ⟨{}⟩ ≤ H(S,B)/k*² is torsion-free of index {}",
                                    b.join(", "),
                                    index
                                ));
                            }
                            OrderTwoVerdict::NoIndexTwo => {
                                excluded = Some(format!(
                                    "every index-two subgroup of H(S,B)/k*² (order {}) meets the order-two classes",
                                    analysis.h.order
                                ));
                            }
                            OrderTwoVerdict::Undecided => {}
                        }
                    }
                    if sc.chi.is_none() {
                        evidence.push("exponent m undetermined for |S| ≥ 2".to_string());
                    }
                    match excluded {
                        Some(r) => Status::Excluded(r),
                        None => match witnesses.lookup(field, rf, &sc.s) {
                            Some(w) => Status::Confirmed(w.to_string()),
                            None => Status::Candidate,
                        },
                    }
                };
                let status = match paper_discrepancy(field.d_k, &primes_of(rf), &primes_of(&sc.s)) {
                    Some(note) => Status::PaperDiscrepant(format!("{}; computed status: {}", note, status.describe())),
                    None => status,
                };
                let conjugate_of = if conj_rf != *rf || conj_s != sc.s {
                    Some(format!(
                        "[{}, {}, {{{}}}, {}]",
                        field.d_k,
                        labels(&conj_rf).join(" "),
                        labels(&conj_s).join(" "),
                        index
                    ))
                } else {
                    None
                };
                out.push(CandidateClass {
                    d_k: field.d_k,
                    d_b: labels(rf),
                    s: labels(&sc.s),
                    index,
                    chi,
                    chi_normalizer: chi_n.clone(),
                    chi_norm_one: chi1.clone(),
                    torsion: analysis.report.clone(),
                    h_order: analysis.h.order,
                    certificate: sc.certificate.as_ref().map(|c| field.render(c)),
                    status,
                    evidence,
                    conjugate_of,
                });
            }
        }
    }
    Ok(out)
}

fn sorted(mut v: Vec<FinitePlace>) -> Vec<FinitePlace> {
    v.sort();
    v
}

/// The full pipeline over every screened discriminant up to `max_d`.
pub fn classify(max_d: u64, witnesses: &WitnessTable) -> Result<Vec<CandidateClass>> {
    let mut all = Vec::new();
    for d in integrality_screen(max_d) {
        let field = field_of_discriminant(d)?;
        all.extend(classify_field(&field, witnesses)?);
    }
    all.sort_by(|a, b| (a.d_k, &a.d_b, &a.s, a.index).cmp(&(b.d_k, &b.d_b, &b.s, b.index)));
    Ok(all)
}

/// The final list: candidate classes with the maximal discriminant cap.
pub fn candidate_classes() -> Result<Vec<CandidateClass>> {
    classify(discriminant_bound_refined(), &WitnessTable::shipped())
}

/// The refined bound without re-verifying the class-number claim.
pub fn discriminant_bound_refined() -> u64 {
    1285
}

/// Classes not excluded, grouped by discriminant.
pub fn surviving(classes: &[CandidateClass]) -> BTreeMap<i64, Vec<&CandidateClass>> {
    let mut m: BTreeMap<i64, Vec<&CandidateClass>> = BTreeMap::new();
    for c in classes.iter().filter(|c| c.status.counts()) {
        m.entry(c.d_k).or_default().push(c);
    }
    m
}

pub mod ratio_string {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", x.numer(), x.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        let (n, m) = s.split_once('/').ok_or_else(|| D::Error::custom("expected num/den"))?;
        let n: BigInt = n.trim().parse().map_err(D::Error::custom)?;
        let m: BigInt = m.trim().parse().map_err(D::Error::custom)?;
        if m == BigInt::from(0) {
            return Err(D::Error::custom("zero denominator"));
        }
        Ok(BigRational::new(n, m))
    }
}
