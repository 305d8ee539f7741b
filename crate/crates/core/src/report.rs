//! Markdown and JSON reports over the classification output.

use std::fmt::Write;

use num_rational::BigRational;
use serde::Serialize;

use crate::classify::{CandidateClass, Table1Row};
use crate::reconcile::{reconcile, render_markdown as render_reconciliation, theorem_of, PublishedClass, THEOREMS};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Markdown,
}

impl std::str::FromStr for Format {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "markdown" | "md" => Ok(Format::Markdown),
            _ => Err(crate::Error::Parse(s.to_string())),
        }
    }
}

pub const TITLE: &str = "# Arithmetic lattices of fake quadrics over real quadratic fields";

pub fn ratio(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn table1_markdown(rows: &[Table1Row]) -> String {
    let mut out = String::new();
    writeln!(out, "| d_k | h_k | t | 2^α·g(k,B) |").unwrap();
    writeln!(out, "|---|---|---|---|").unwrap();
    for r in rows {
        writeln!(out, "| {} | {} | {} | {} |", r.d, r.h, r.t, ratio(&r.value)).unwrap();
    }
    out
}

fn theorem_section(out: &mut String, name: &str, classes: &[&CandidateClass]) {
    writeln!(out).unwrap();
    writeln!(out, "## {} ({} classes)", name, classes.len()).unwrap();
    writeln!(out).unwrap();
    writeln!(out, "| d_k | d_B | S | I | χ | status |").unwrap();
    writeln!(out, "|---|---|---|---|---|---|").unwrap();
    for c in classes {
        let s = if c.s.is_empty() { "∅".to_string() } else { c.s.join(" ") };
        writeln!(out, "| {} | {} | {} | {} | {} | {} |", c.d_k, c.d_b.join(" "), s, c.index, ratio(&c.chi), c.status.name()).unwrap();
    }
}

#[derive(Serialize)]
struct JsonReport<'a> {
    table1: &'a [Table1Row],
    classes: &'a [CandidateClass],
    reconciliation: Option<crate::reconcile::Reconciliation>,
}

/// Table 1, the per-theorem class lists and the reconciliation against `published`.
pub fn emit_report(rows: &[Table1Row], classes: &[CandidateClass], published: &[PublishedClass], format: Format) -> String {
    let rec = (!classes.is_empty()).then(|| reconcile(classes, published));
    if format == Format::Json {
        let r = JsonReport { table1: rows, classes, reconciliation: rec };
        return serde_json::to_string_pretty(&r).expect("report serializes") + "\n";
    }
    let mut out = String::new();
    writeln!(out, "{}", TITLE).unwrap();
    if !rows.is_empty() {
        writeln!(out).unwrap();
        writeln!(out, "## Table 1").unwrap();
        writeln!(out).unwrap();
        out.push_str(&table1_markdown(rows));
    }
    if let Some(rec) = rec {
        for th in THEOREMS {
            let list: Vec<&CandidateClass> = classes.iter().filter(|c| c.status.counts() && theorem_of(c.d_k) == th).collect();
            theorem_section(&mut out, th, &list);
        }
        writeln!(out).unwrap();
        // demote the reconciliation headings one level
        for line in render_reconciliation(&rec).lines() {
            if line.starts_with('#') {
                writeln!(out, "#{}", line).unwrap();
            } else {
                writeln!(out, "{}", line).unwrap();
            }
        }
    }
    out
}
