mod cache;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use fqlat_core::bounds::{degree_bound_report, psi_interval, q_cap, root_disc_interval, OdlyzkoTable};
use fqlat_core::chi::{chi_maximal, chi_norm_one, chi_normalizer, kb_degree, kprime_degree, render_chi};
use fqlat_core::classify::{enumerate_ramification, enumerate_s, integrality_screen, table1};
use fqlat_core::field::{bernoulli_b2, field_of_discriminant};
use fqlat_core::place::parse_places;
use fqlat_core::reconcile::{published_classes, reconcile, render_markdown};
use fqlat_core::report::{emit_report, table1_markdown, Format};
use fqlat_core::torsion::torsion_spectrum;
use fqlat_core::{Error, FinitePlace, RealQuadraticField};

use cache::{Cache, CacheError};

#[derive(Parser)]
#[command(name = "fqlat", version, about = "Arithmetic lattices of fake quadrics over real quadratic fields")]
struct Cli {
    /// Cache directory for classification results.
    #[arg(long, env = "FQLAT_CACHE_DIR", global = true)]
    cache_dir: Option<PathBuf>,
    /// Discard and recompute cached results.
    #[arg(long, global = true)]
    rebuild_cache: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Invariants of Q(√m) for a fundamental discriminant.
    Field {
        #[arg(long)]
        d: i64,
    },
    /// Discriminants passing the integrality screen.
    Screen {
        #[arg(long, default_value_t = 1285)]
        max_d: u64,
    },
    /// Rows of Table 1.
    Table1 {
        #[arg(long, default_value = "markdown")]
        format: String,
        #[arg(long, default_value_t = 1285)]
        max_d: u64,
    },
    /// Euler characteristics for one quaternion algebra.
    Chi {
        #[arg(long)]
        d: i64,
        /// Comma separated places, e.g. 2,41+
        #[arg(long)]
        ramified: String,
        #[arg(long)]
        s: Option<String>,
    },
    /// Admissible ramification sets and sets S for one field.
    Enumerate {
        #[arg(long)]
        d: i64,
    },
    /// Orders of torsion elements in Γ⁺_{S,O}.
    Torsion {
        #[arg(long)]
        d: i64,
        #[arg(long)]
        ramified: String,
        #[arg(long)]
        s: Option<String>,
    },
    /// Run the full classification.
    Classify {
        #[arg(long, default_value = "classes.json")]
        out: PathBuf,
    },
    /// Analytic degree bounds.
    Bounds {
        #[arg(long)]
        degree: u32,
        #[arg(long, default_value_t = 1)]
        q: u64,
        /// Alternative Odlyzko table (TSV: n, bound, source).
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Table 1, theorem lists and reconciliation.
    Report {
        #[arg(long, default_value = "markdown")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Domain(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::AmbiguousM { size, candidates } => {
                Failure::Domain(format!("exponent m is not determined for |S| = {}; possible χ: {}", size, candidates.join(", ")))
            }
            e => Failure::Domain(e.to_string()),
        }
    }
}

impl From<CacheError> for Failure {
    fn from(e: CacheError) -> Self {
        match e {
            CacheError::Io(e) => Failure::Io(e),
            CacheError::Corrupt(p) => Failure::Io(format!("cache file {} is corrupt; rerun with --rebuild-cache", p.display())),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type Outcome = std::result::Result<String, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{}", out);
            ExitCode::SUCCESS
        }
        Err(Failure::Domain(m)) => {
            eprintln!("error: {}", m);
            ExitCode::from(2)
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {}", m);
            ExitCode::from(3)
        }
    }
}

fn labels(v: &[FinitePlace]) -> Vec<String> {
    v.iter().map(|p| p.label()).collect()
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json") + "\n"
}

fn places(k: &RealQuadraticField, s: &Option<String>) -> Result<Vec<FinitePlace>, Error> {
    s.as_deref().map(|s| parse_places(k, s)).transpose().map(Option::unwrap_or_default)
}

fn format(s: &str) -> Result<Format, Failure> {
    s.parse::<Format>().map_err(|_| Failure::Domain(format!("unknown format {:?}", s)))
}

fn run(cli: Cli) -> Outcome {
    let cache = Cache::new(cli.cache_dir.clone(), cli.rebuild_cache);
    match cli.command {
        Command::Field { d } => {
            let k = field_of_discriminant(d)?;
            Ok(pretty(&json!({
                "d_k": k.d_k,
                "m": k.m,
                "h": k.h(),
                "h_plus": k.narrow_class_number(),
                "t": k.t,
                "fundamental_unit": k.render(k.eps()),
                "unit_norm": k.unit.norm_sign,
                "tp_unit_index": k.unit.tp_unit_index,
                "regulator": k.regulator(),
                "B2": render_chi(&bernoulli_b2(&k)),
            })))
        }
        Command::Screen { max_d } => Ok(pretty(&json!(integrality_screen(max_d)))),
        Command::Table1 { format: f, max_d } => {
            let rows = table1(max_d)?;
            Ok(match format(&f)? {
                Format::Markdown => table1_markdown(&rows),
                Format::Json => pretty(&serde_json::to_value(&rows).expect("json")),
            })
        }
        Command::Chi { d, ramified, s } => {
            let k = field_of_discriminant(d)?;
            let rf = parse_places(&k, &ramified)?;
            let s = places(&k, &s)?;
            let mut out = json!({
                "chi1": render_chi(&chi_norm_one(&k, &rf)?),
                "chiN": render_chi(&chi_normalizer(&k, &rf)?),
            });
            if !s.is_empty() {
                out["chiS"] = json!(render_chi(&chi_maximal(&k, &rf, &s)?));
            }
            Ok(serde_json::to_string(&out).expect("json") + "\n")
        }
        Command::Enumerate { d } => {
            let k = field_of_discriminant(d)?;
            let e = enumerate_ramification(&k)?;
            let mut refined = Vec::new();
            for (rf, chi) in &e.refined {
                let s: Vec<Value> = enumerate_s(&k, rf)?
                    .iter()
                    .map(|c| {
                        json!({
                            "s": labels(&c.s),
                            "chi": c.chi.as_ref().map(render_chi),
                            "certificate": c.certificate.as_ref().map(|x| k.render(x)),
                            "possible_chi": c.ambiguous.iter().map(render_chi).collect::<Vec<_>>(),
                        })
                    })
                    .collect();
                refined.push(json!({
                    "d_b": labels(rf),
                    "chiN": render_chi(chi),
                    "kb_degree": kb_degree(&k, rf),
                    "kprime_degree": kprime_degree(&k, rf),
                    "s": s,
                }));
            }
            Ok(pretty(&json!({
                "d_k": d,
                "raw": e.raw.iter().map(|r| labels(r)).collect::<Vec<_>>(),
                "refined": refined,
            })))
        }
        Command::Torsion { d, ramified, s } => {
            let k = field_of_discriminant(d)?;
            let rf = parse_places(&k, &ramified)?;
            let s = places(&k, &s)?;
            let r = torsion_spectrum(&k, &rf, &s)?;
            Ok(pretty(&serde_json::to_value(&r).expect("json")))
        }
        Command::Classify { out } => {
            let classes = cache.classes()?;
            let rec = reconcile(&classes, &published_classes());
            cache::write_atomic(&out, &(serde_json::to_string_pretty(&classes).expect("json") + "\n"))?;
            let md = out.with_file_name("reconciliation.md");
            cache::write_atomic(&md, &render_markdown(&rec))?;
            let counted = classes.iter().filter(|c| c.status.counts()).count();
            Ok(format!("{} classes ({} not excluded) written to {}; reconciliation in {}\n", classes.len(), counted, out.display(), md.display()))
        }
        Command::Bounds { degree, q, table, format: f } => {
            if degree < 2 || !q.is_power_of_two() {
                return Err(Failure::Domain("need degree ≥ 2 and q a power of two".into()));
            }
            let table = match table {
                Some(p) => OdlyzkoTable::parse_tsv(&std::fs::read_to_string(p)?)?,
                None => OdlyzkoTable::shipped(),
            };
            let report = degree_bound_report(&table)?;
            if format(&f)? == Format::Markdown {
                return Ok(fqlat_core::bounds::render_markdown(&report));
            }
            let psi = psi_interval(degree, q);
            let p = root_disc_interval(degree, q);
            Ok(pretty(&json!({
                "n": degree,
                "q": q,
                "psi_f": [psi.lo, psi.hi],
                "psi_below_one": psi.hi < 1.0,
                "q_cap": q_cap(degree),
                "root_disc_upper": [p.lo, p.hi],
                "m_r": table.get(degree),
                "degree_cap": report.degree_cap,
            })))
        }
        Command::Report { format: f, out } => {
            let f = format(&f)?;
            let rows = table1(1285)?;
            let classes = cache.classes()?;
            let doc = emit_report(&rows, &classes, &published_classes(), f);
            match out {
                Some(p) => {
                    cache::write_atomic(&p, &doc)?;
                    Ok(String::new())
                }
                None => Ok(doc),
            }
        }
    }
}
