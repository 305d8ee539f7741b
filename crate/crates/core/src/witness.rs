//! Curated constructions of torsion-free subgroups.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::RealQuadraticField;
use crate::place::{parse_place, FinitePlace};

const SHIPPED: &str = include_str!("../data/witnesses.json");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessEntry {
    pub d_k: i64,
    pub d_b: Vec<String>,
    pub s: Vec<String>,
    pub construction: String,
    pub source: String,
}

impl std::fmt::Display for WitnessEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} ({})", self.construction, self.source)
    }
}

#[derive(Clone, Debug, Default)]
pub struct WitnessTable {
    pub entries: Vec<WitnessEntry>,
}

impl WitnessTable {
    pub fn from_json(s: &str) -> Result<Self> {
        let entries = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(WitnessTable { entries })
    }

    pub fn shipped() -> Self {
        Self::from_json(SHIPPED).expect("shipped witness table parses")
    }

    /// Entry for (R_f, S), or for its image under √m ↦ −√m.
    pub fn lookup(&self, field: &RealQuadraticField, rf: &[FinitePlace], s: &[FinitePlace]) -> Option<&WitnessEntry> {
        let conj = |v: &[FinitePlace]| {
            let mut c: Vec<FinitePlace> = v.iter().map(|x| x.conjugate(field)).collect();
            c.sort();
            c
        };
        let targets = [(sorted(rf), sorted(s)), (conj(rf), conj(s))];
        self.entries.iter().filter(|e| e.d_k == field.d_k).find(|e| {
            let (Some(eb), Some(es)) = (parse_all(field, &e.d_b), parse_all(field, &e.s)) else {
                return false;
            };
            targets.iter().any(|(b, t)| *b == eb && *t == es)
        })
    }
}

fn sorted(v: &[FinitePlace]) -> Vec<FinitePlace> {
    let mut v = v.to_vec();
    v.sort();
    v
}

fn parse_all(field: &RealQuadraticField, labels: &[String]) -> Option<Vec<FinitePlace>> {
    let mut out: Vec<FinitePlace> = labels.iter().map(|l| parse_place(field, l)).collect::<Result<_>>().ok()?;
    out.sort();
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::field_of_discriminant;
    use crate::place::parse_places;

    #[test]
    fn shipped_entries_parse() {
        let t = WitnessTable::shipped();
        for e in &t.entries {
            let k = field_of_discriminant(e.d_k).unwrap();
            assert!(parse_all(&k, &e.d_b).is_some(), "{:?}", e);
            assert!(parse_all(&k, &e.s).is_some(), "{:?}", e);
        }
    }

    #[test]
    fn lookup_is_conjugation_invariant() {
        let t = WitnessTable::shipped();
        let k = field_of_discriminant(5).unwrap();
        let a = parse_places(&k, "2,41+").unwrap();
        let b = parse_places(&k, "2,41-").unwrap();
        assert_eq!(t.lookup(&k, &a, &[]), t.lookup(&k, &b, &[]));
        assert!(t.lookup(&k, &a, &[]).is_some());
        let c = parse_places(&k, "5,61+").unwrap();
        assert!(t.lookup(&k, &c, &[]).is_none());
    }
}
