//! `innerflip`: command-line front end to the K-theory calculator.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 constraint violation
//! (including K-theory outside the catalog), 3 unsupported computation.

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use innerflip::classify::{classify_stable, is_flip_admissible};
use innerflip::fgoracle::{eta_hom, structure, tensor_fg, tor_fg, FgPresentation, IntMatrix};
use innerflip::kunneth::{flip_action, kk_identity_flip};
use innerflip::semigroup::hasse;
use innerflip::{expr, selfcheck, AbGroup, CatalogEntry, Error, GradedKTheory};
use serde_json::json;

#[derive(Parser)]
#[command(name = "innerflip", version, about = "K-theory calculator for approximately inner flip")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum YesNo {
    Yes,
    No,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleOp {
    Tor,
    Tensor,
    Eta,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a tensor expression over catalog entries, e.g. "M(2^inf) @ O2".
    Compute {
        expr: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Find the catalog entries with a given graded K-theory.
    Classify {
        #[arg(long)]
        k0: String,
        #[arg(long)]
        k1: String,
        #[arg(long, value_enum)]
        finite: YesNo,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Decide admissibility of K-theory for approximately inner flip.
    /// Accepts a group ("Q[6^inf]+Pr[2]") or a K-spec ("K0=..;K1=..;finite=yes").
    Flip {
        #[arg(long)]
        k: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Hasse diagram of the absorption order on the given entries.
    Hasse {
        #[arg(required = true)]
        entries: Vec<String>,
        #[arg(long, value_enum, default_value = "dot")]
        format: Format,
    },
    /// Exact computations on finitely generated groups. A group is a list of
    /// invariant factors ("2,4", with 0 for Z) or a JSON relation matrix
    /// with one row per generator ("[[2,4],[6,8]]").
    Oracle {
        #[arg(value_enum)]
        op: OracleOp,
        a: String,
        b: String,
        /// Randomize the lifts in the eta chase.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run the cross-validation suite.
    Selfcheck {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

enum Failure {
    Lib(Error),
    Usage(String),
    ChecksFailed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = std::result::Result<String, Failure>;

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n"
}

fn only(format: Format, allowed: &[Format]) -> std::result::Result<(), Failure> {
    if allowed.contains(&format) {
        Ok(())
    } else {
        Err(Failure::Usage("this subcommand does not support that --format".into()))
    }
}

fn compute(input: &str, format: Format) -> Outcome {
    only(format, &[Format::Text, Format::Structured])?;
    let report = expr::eval(input)?;
    Ok(match format {
        Format::Structured => pretty(&serde_json::to_value(&report).expect("report serializes")),
        _ => report.to_text(),
    })
}

fn classify(k0: &str, k1: &str, finite: YesNo, format: Format) -> Outcome {
    only(format, &[Format::Text, Format::Structured])?;
    let k = GradedKTheory::new(k0.parse()?, k1.parse()?, matches!(finite, YesNo::Yes));
    let entries = classify_stable(&k)?;
    Ok(match format {
        Format::Structured => pretty(&json!({ "input": k.to_string(), "entries": entries })),
        _ => entries.iter().map(|e| format!("{e}\n")).collect(),
    })
}

fn flip(spec: &str, format: Format) -> Outcome {
    only(format, &[Format::Text, Format::Structured])?;
    let graded = spec.trim_start().starts_with("K0");
    let k = if graded {
        spec.parse::<GradedKTheory>()?
    } else {
        GradedKTheory::new(spec.parse::<AbGroup>()?, AbGroup::zero(), false)
    };
    let g = k.ungraded();
    let verdict = is_flip_admissible(&g);
    let diagnostics = match &verdict {
        Ok(_) => Vec::new(),
        Err(r) => r.diagnostics.clone(),
    };
    if format == Format::Structured {
        let mut v = json!({
            "input": spec,
            "group": g,
            "admissible": verdict.as_ref().ok(),
            "diagnostics": diagnostics,
        });
        if graded {
            v["flip_action"] = serde_json::to_value(flip_action(&k)).expect("verdict serializes");
            v["kk_identity_flip"] = json!(kk_identity_flip(&k));
        }
        return Ok(pretty(&v));
    }
    let mut out = format!("group: {g}\n");
    match &verdict {
        Ok(shape) => out.push_str(&format!("admissible: {shape}\n")),
        Err(_) => out.push_str("admissible: no\n"),
    }
    for d in &diagnostics {
        out.push_str(&format!("  - {d}\n"));
    }
    if graded {
        let action = match flip_action(&k) {
            innerflip::FlipVerdict::IdentityOnKTheory => "identity".to_string(),
            innerflip::FlipVerdict::Obstructed(v) => format!("obstructed ({} reasons)", v.len()),
            innerflip::FlipVerdict::Undetermined(v) => format!("undetermined ({} reasons)", v.len()),
        };
        out.push_str(&format!("flip on K-theory of A (x) A: {action}\n"));
        let kk = if kk_identity_flip(&k) { "yes" } else { "no" };
        out.push_str(&format!("flip KK-equivalent to identity: {kk}\n"));
    }
    Ok(out)
}

fn hasse_cmd(entries: &[String], format: Format) -> Outcome {
    let entries = entries
        .iter()
        .map(|s| s.parse::<CatalogEntry>())
        .collect::<innerflip::Result<Vec<_>>>()?;
    let diagram = hasse(&entries)?;
    Ok(match format {
        Format::Dot => diagram.to_dot(),
        Format::Structured => pretty(&json!({
            "nodes": diagram.nodes,
            "edges": diagram.edge_labels(),
        })),
        Format::Text => diagram
            .edge_labels()
            .iter()
            .map(|(a, b)| format!("{a} -> {b}\n"))
            .collect(),
    })
}

fn parse_fg(spec: &str) -> std::result::Result<FgPresentation, Failure> {
    let spec = spec.trim();
    if spec.starts_with('[') {
        let rows: Vec<Vec<i64>> = serde_json::from_str(spec)
            .map_err(|e| Failure::Usage(format!("bad relation matrix {spec}: {e}")))?;
        if rows.iter().any(|r| r.len() != rows[0].len()) {
            return Err(Failure::Usage(format!("relation matrix {spec} is ragged")));
        }
        return Ok(FgPresentation::new(IntMatrix::from_rows(&rows)));
    }
    let factors = spec
        .split(',')
        .map(|x| x.trim().parse::<u64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Failure::Usage(format!("bad invariant factor list {spec}: {e}")))?;
    Ok(FgPresentation::from_invariant_factors(&factors))
}

fn oracle(op: OracleOp, a: &str, b: &str, seed: Option<u64>, format: Format) -> Outcome {
    only(format, &[Format::Text, Format::Structured])?;
    let (pa, pb) = (parse_fg(a)?, parse_fg(b)?);
    let (ga, gb) = (structure(&pa), structure(&pb));
    let structured = format == Format::Structured;
    match op {
        OracleOp::Tensor | OracleOp::Tor => {
            let (name, result) = match op {
                OracleOp::Tensor => ("tensor", structure(&tensor_fg(&pa, &pb))),
                _ => ("tor", structure(&tor_fg(&pa, &pb))),
            };
            Ok(if structured {
                pretty(&json!({ "op": name, "a": ga, "b": gb, "result": result }))
            } else {
                format!("{result}\n")
            })
        }
        OracleOp::Eta => {
            let h = eta_hom(&pa, &pb, seed)?;
            let source = structure(&tor_fg(&pa, &pb));
            let target = structure(&tor_fg(&pb, &pa));
            let identity = h.is_identity();
            Ok(if structured {
                pretty(&json!({
                    "op": "eta",
                    "a": ga,
                    "b": gb,
                    "source": source,
                    "target": target,
                    "matrix": h.matrix.to_string(),
                    "identity": identity,
                }))
            } else {
                format!(
                    "Tor(a, b) = {source}\nTor(b, a) = {target}\neta = {}\nidentity: {}\n",
                    h.matrix,
                    if identity { "yes" } else { "no" }
                )
            })
        }
    }
}

fn selfcheck_cmd(seed: u64, format: Format) -> Outcome {
    only(format, &[Format::Text, Format::Structured])?;
    let outcomes = selfcheck::run(seed);
    let ok = outcomes.iter().all(|o| o.passed());
    let out = if format == Format::Structured {
        pretty(&json!({ "seed": seed, "passed": ok, "checks": outcomes }))
    } else {
        let mut s = String::new();
        for o in &outcomes {
            let status = if o.passed() { "PASS" } else { "FAIL" };
            s.push_str(&format!("{status} {} ({} cases)\n", o.name, o.cases));
            if let Some(f) = &o.failure {
                s.push_str(&format!("     first failure: {f}\n"));
            }
        }
        s
    };
    if ok {
        Ok(out)
    } else {
        print!("{out}");
        Err(Failure::ChecksFailed)
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Compute { expr, format } => compute(&expr, format),
        Command::Classify { k0, k1, finite, format } => classify(&k0, &k1, finite, format),
        Command::Flip { k, format } => flip(&k, format),
        Command::Hasse { entries, format } => hasse_cmd(&entries, format),
        Command::Oracle { op, a, b, seed, format } => oracle(op, &a, &b, seed, format),
        Command::Selfcheck { seed, format } => selfcheck_cmd(seed, format),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::ChecksFailed) => {
            eprintln!("error: some checks failed");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Parse { .. } | Error::Internal(_) => 1,
                Error::Constraint(_) | Error::NotInCatalog(_) => 2,
                Error::Unsupported(_) => 3,
            })
        }
    }
}
