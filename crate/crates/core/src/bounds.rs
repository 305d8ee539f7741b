//! Analytic bounds on the degree and root discriminant of the field of definition.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// Closed interval [lo, hi] with outward rounding after every operation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

// libm exp/ln are within one ulp; widen by a few to stay enclosing
const SLOP: u32 = 4;

fn down(mut x: f64, k: u32) -> f64 {
    for _ in 0..k {
        x = x.next_down();
    }
    x
}

fn up(mut x: f64, k: u32) -> f64 {
    for _ in 0..k {
        x = x.next_up();
    }
    x
}

impl Interval {
    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    /// A decimal constant that may not be representable.
    pub fn around(x: f64) -> Self {
        Interval { lo: down(x, 1), hi: up(x, 1) }
    }

    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "empty interval");
        Interval { lo, hi }
    }

    pub fn pi() -> Self {
        Self::around(PI)
    }

    pub fn add(self, o: Self) -> Self {
        Interval { lo: down(self.lo + o.lo, 1), hi: up(self.hi + o.hi, 1) }
    }

    pub fn sub(self, o: Self) -> Self {
        Interval { lo: down(self.lo - o.hi, 1), hi: up(self.hi - o.lo, 1) }
    }

    pub fn mul(self, o: Self) -> Self {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = c.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Interval { lo: down(lo, 1), hi: up(hi, 1) }
    }

    pub fn div(self, o: Self) -> Self {
        assert!(o.lo > 0.0 || o.hi < 0.0, "division by an interval containing 0");
        self.mul(Interval { lo: down(1.0 / o.hi, 1), hi: up(1.0 / o.lo, 1) })
    }

    pub fn exp(self) -> Self {
        Interval { lo: down(self.lo.exp(), SLOP).max(0.0), hi: up(self.hi.exp(), SLOP) }
    }

    pub fn ln(self) -> Self {
        assert!(self.lo > 0.0);
        Interval { lo: down(self.lo.ln(), SLOP), hi: up(self.hi.ln(), SLOP) }
    }

    /// x^e for x > 0 and real e.
    pub fn powf(self, e: f64) -> Self {
        self.ln().mul(Interval::around(e)).exp()
    }

    pub fn powi(self, e: u32) -> Self {
        (0..e).fold(Interval::point(1.0), |acc, _| acc.mul(self))
    }

    pub fn lt(self, o: Self) -> bool {
        self.hi < o.lo
    }

    pub fn gt(self, o: Self) -> bool {
        self.lo > o.hi
    }

    pub fn mid(self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegulatorBound {
    Friedman,
    Slavutskii,
}

/// ρ_f(n) = 0.0062·e^{0.738n} or ρ_s(n) = 0.003·e^{0.75n}.
pub fn regulator_lower(n: u32, variant: RegulatorBound) -> f64 {
    let n = n as f64;
    match variant {
        RegulatorBound::Friedman => 0.0062 * (0.738 * n).exp(),
        RegulatorBound::Slavutskii => 0.003 * (0.75 * n).exp(),
    }
}

fn check_s(s: f64) -> Result<()> {
    if !(s > 1.0 && s < 3.0) {
        return Err(Error::DomainError(format!("s = {} outside (1, 3)", s)));
    }
    Ok(())
}

/// Upper bound for h_k R_k: 2^{1−n} s(s−1) Γ(s/2)^n (d/πⁿ)^{s/2} ζ_k(s).
pub fn brauer_siegel_upper(n: u32, s: f64, d: f64, zeta_k_s: f64) -> Result<f64> {
    check_s(s)?;
    let n_f = n as f64;
    Ok(2f64.powf(1.0 - n_f) * s * (s - 1.0) * gamma(s / 2.0).powf(n_f) * (d / PI.powf(n_f)).powf(s / 2.0) * zeta_k_s)
}

/// Lower bound for g(k,B) from Brauer–Siegel and ρ_f.
pub fn g_lower_chfr(n: u32, s: f64, d: f64, t: u32, zeta_k_2: f64, zeta_k_s: f64) -> Result<f64> {
    check_s(s)?;
    let n_f = n as f64;
    let num = regulator_lower(n, RegulatorBound::Friedman) * zeta_k_2 * PI.powf(n_f * (s - 4.0) / 2.0) * d.powf((3.0 - s) / 2.0);
    let den = s * (s - 1.0) * zeta_k_s * gamma(s / 2.0).powf(n_f) * 2f64.powf(2.0 * n_f + t as f64 - 1.0);
    Ok(num / den)
}

/// T(1.4, 0.1) > −0.0464 − 19.0744/(n·q), evaluated by Chinburg and Friedman.
pub const CHFR_T_OFFSET: f64 = -0.0464;
pub const CHFR_T_SLOPE: f64 = 19.0744;

fn psi_parts() -> (Interval, Interval) {
    (Interval::around(0.0221), Interval::around(0.4307))
}

/// Ψ_f(n, q) = 0.0221·exp(0.4307n − 19.0744/q), enclosed.
pub fn psi_interval(n: u32, q: u64) -> Interval {
    let (c, a) = psi_parts();
    let e = a.mul(Interval::point(n as f64)).sub(Interval::around(CHFR_T_SLOPE).div(Interval::point(q as f64)));
    c.mul(e.exp())
}

pub fn psi_lower(n: u32, q: u64) -> f64 {
    0.0221 * (0.4307 * n as f64 - CHFR_T_SLOPE / q as f64).exp()
}

/// ζ(2n) = Σ k^{−2n}, with the tail bounded by K^{1−2n}/(2n−1).
pub fn zeta_even_interval(n: u32) -> Interval {
    let s = 2 * n;
    let k_max = 64u32;
    let mut sum = Interval::point(0.0);
    for k in (1..=k_max).rev() {
        sum = sum.add(Interval::point(k as f64).powf(-(s as f64)));
    }
    let tail = (k_max as f64).powf(1.0 - s as f64) / (s as f64 - 1.0);
    Interval { lo: sum.lo, hi: up(sum.hi + tail, 2) }
}

/// P(n, q) = (2^{4n−2} π^{2n} q / ζ(2n))^{2/(3n)}, enclosed.
pub fn root_disc_interval(n: u32, q: u64) -> Interval {
    // exponent distributed to keep magnitudes small
    let e = 2.0 / (3.0 * n as f64);
    let base = Interval::point(2.0)
        .powf((4 * n - 2) as f64 * e)
        .mul(Interval::pi().powf(2.0 * n as f64 * e))
        .mul(Interval::point(q as f64).powf(e));
    base.div(zeta_even_interval(n).powf(e))
}

pub fn root_disc_upper(n: u32, q: u64) -> f64 {
    root_disc_interval(n, q).mid()
}

/// Strict lower bounds for m_r(n), the minimal root discriminant of totally real fields of degree n.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OdlyzkoTable {
    pub rows: BTreeMap<u32, (f64, String)>,
}

pub const SHIPPED_ODLYZKO: &str = include_str!("../data/odlyzko_totally_real.tsv");

impl OdlyzkoTable {
    pub fn parse_tsv(s: &str) -> Result<Self> {
        let mut rows = BTreeMap::new();
        for (i, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("n\t") {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(Error::Parse(format!("line {}: expected n, bound, source", i + 1)));
            }
            let n: u32 = cols[0].parse().map_err(|_| Error::Parse(format!("line {}: bad degree", i + 1)))?;
            let b: f64 = cols[1].parse().map_err(|_| Error::Parse(format!("line {}: bad bound", i + 1)))?;
            rows.insert(n, (b, cols[2].to_string()));
        }
        let t = OdlyzkoTable { rows };
        if !t.is_monotone() {
            return Err(Error::Parse("bounds must be nondecreasing in n".into()));
        }
        Ok(t)
    }

    pub fn shipped() -> Self {
        Self::parse_tsv(SHIPPED_ODLYZKO).expect("shipped table parses")
    }

    pub fn get(&self, n: u32) -> Option<f64> {
        self.rows.get(&n).map(|r| r.0)
    }

    pub fn is_monotone(&self) -> bool {
        self.rows.values().zip(self.rows.values().skip(1)).all(|(a, b)| a.0 <= b.0)
    }

    pub fn with_offset(&self, n: u32, delta: f64) -> Self {
        let mut t = self.clone();
        if let Some(r) = t.rows.get_mut(&n) {
            r.0 += delta;
        }
        t
    }
}

/// Largest power of two q with Ψ_f(n, q) < 1; None when every q passes.
pub fn q_cap(n: u32) -> Option<u64> {
    let lim = psi_interval(n, u64::MAX);
    if lim.hi < 1.0 {
        return None;
    }
    if !psi_interval(n, 1).lt(Interval::point(1.0)) {
        return Some(0);
    }
    let mut q = 1u64;
    while psi_interval(n, q * 2).lt(Interval::point(1.0)) {
        q *= 2;
    }
    Some(q)
}

/// Degree bands and the q bound stated for each.
pub const BANDS: [(u32, u32, u64); 6] = [(21, 33, 2), (15, 20, 4), (12, 14, 8), (11, 11, 16), (10, 10, 32), (9, 9, 256)];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandRow {
    pub lo: u32,
    pub hi: u32,
    /// Largest admissible [k'_B:k] over the band.
    pub q_max: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub n: u32,
    pub p_upper: f64,
    pub m_r: f64,
    pub source: String,
    pub excluded: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    /// Largest n with Ψ_f(n, 1) < 1.
    pub psi_degree_cap: u32,
    /// Smallest n from which q = 1 is forced.
    pub q_one_from: u32,
    pub per_degree_q: Vec<(u32, Option<u64>)>,
    pub bands: Vec<BandRow>,
    pub comparisons: Vec<Comparison>,
    pub degree_cap: u32,
}

pub fn degree_bound_report(table: &OdlyzkoTable) -> Result<BoundsReport> {
    let mut psi_cap = 2;
    while psi_interval(psi_cap + 1, 1).lt(Interval::point(1.0)) {
        psi_cap += 1;
    }
    let per_degree: Vec<(u32, Option<u64>)> = (2..=psi_cap).map(|n| (n, q_cap(n))).collect();
    let q_one_from = per_degree.iter().find(|(_, q)| *q == Some(1)).map(|(n, _)| *n).unwrap_or(psi_cap + 1);
    let bands = BANDS
        .iter()
        .map(|&(lo, hi, _)| BandRow {
            lo,
            hi,
            q_max: per_degree.iter().filter(|(n, _)| (lo..=hi).contains(n)).filter_map(|(_, q)| *q).max().unwrap_or(0),
        })
        .collect();
    let first = *table.rows.keys().next().ok_or(Error::TableGap(psi_cap))?;
    let mut comparisons = Vec::new();
    let mut cap = psi_cap;
    for n in (first.max(q_one_from)..=psi_cap).rev() {
        let (m, src) = table.rows.get(&n).cloned().ok_or(Error::TableGap(n))?;
        let p = root_disc_interval(n, 1);
        let excluded = p.lt(Interval::around(m));
        comparisons.push(Comparison { n, p_upper: p.hi, m_r: m, source: src, excluded });
        if excluded && cap == n {
            cap = n - 1;
        }
    }
    comparisons.reverse();
    Ok(BoundsReport { psi_degree_cap: psi_cap, q_one_from, per_degree_q: per_degree, bands, comparisons, degree_cap: cap })
}

pub fn render_markdown(r: &BoundsReport) -> String {
    let mut out = String::new();
    writeln!(out, "# Degree bounds").unwrap();
    writeln!(out).unwrap();
    writeln!(out, "- Ψ_f(n, 1) < 1 only for n ≤ {}", r.psi_degree_cap).unwrap();
    writeln!(out, "- [k'_B:k] = 1 for {} ≤ n ≤ {}", r.q_one_from, r.psi_degree_cap).unwrap();
    writeln!(out, "- degree cap after the root discriminant comparison: n ≤ {}", r.degree_cap).unwrap();
    writeln!(out).unwrap();
    writeln!(out, "| n | [k'_B:k] ≤ |").unwrap();
    writeln!(out, "|---|---|").unwrap();
    for b in &r.bands {
        let n = if b.lo == b.hi { format!("{}", b.lo) } else { format!("{} < n ≤ {}", b.lo - 1, b.hi) };
        writeln!(out, "| {} | {} |", n, b.q_max).unwrap();
    }
    writeln!(out).unwrap();
    writeln!(out, "| n | P(n,1) | m_r(n) | source |").unwrap();
    writeln!(out, "|---|---|---|---|").unwrap();
    for c in &r.comparisons {
        writeln!(out, "| {} | {:.4} | {:.2} | {} |", c.n, c.p_upper, c.m_r, c.source).unwrap();
    }
    out
}
