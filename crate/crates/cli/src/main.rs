//! `mukai`: command-line front end for mukai-core.

mod render;
mod verify;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mukai_core::arith::Int;
use mukai_core::lattice::{self, ClassVector, LatticeError};
use mukai_core::mukai::{self, MukaiVector};
use mukai_core::reduction::{kim_normalize, reduce_even, verify_certificate, ReductionError, SearchBudget};
use mukai_core::walls::{construct_polarization, walls_through, AmpleClass, PolarizationBudget, WallError, WallSpec};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "mukai", version, about = "Mukai lattice of an Enriques surface: reductions, walls, polarizations")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reduce a primitive even-rank Mukai vector to rank 2 or 4.
    Reduce {
        /// Mukai vector as inline JSON `{"r":..,"c1":[..],"s":..}` or a JSON file.
        #[arg(long)]
        v: String,
        #[command(flatten)]
        budget: ReduceBudget,
    },
    /// Twist a rank-2 vector to t in {0, 1}.
    Kim {
        #[arg(long)]
        v: String,
    },
    /// List the walls of a given type through a class.
    Walls {
        #[arg(long = "H")]
        h: String,
        /// Wall type as `r,Delta`.
        #[arg(long = "type", value_parser = parse_spec)]
        spec: WallSpec,
    },
    /// Build a polarization H = L0 + n F_A lying on no wall.
    Polarize {
        #[arg(long = "L1")]
        l1: String,
        #[arg(long = "FA")]
        fa: String,
        #[arg(long = "type", value_parser = parse_spec)]
        spec: WallSpec,
        #[command(flatten)]
        budget: PolarizeBudget,
    },
    /// Mukai pairing of two vectors.
    Pair {
        #[arg(long)]
        v: String,
        #[arg(long)]
        w: String,
    },
    /// Gram matrix of H ⊥ -E8 in the basis (σ, f, e1, …, e8).
    Gram,
    /// Run the invariant suite.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random instances per randomized property.
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u32).range(1..))]
        cases: u32,
    },
}

#[derive(clap::Args, Debug)]
struct ReduceBudget {
    /// Largest hyperbolic twist coefficient tried.
    #[arg(long, env = "MUKAI_BUDGET_AB", default_value_t = 64, value_parser = clap::value_parser!(u32).range(1..))]
    ab: u32,
    /// Largest -E8 twist coordinate tried.
    #[arg(long, env = "MUKAI_BUDGET_ETA", default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
    eta: u32,
}

#[derive(clap::Args, Debug)]
struct PolarizeBudget {
    /// Direct attempts n = (F_A,L1)+1, …
    #[arg(long, env = "MUKAI_BUDGET_N", default_value_t = 16, value_parser = clap::value_parser!(u32).range(1..))]
    n: u32,
    /// Largest perturbation denominator.
    #[arg(long, env = "MUKAI_BUDGET_Q", default_value_t = 4096, value_parser = clap::value_parser!(u32).range(2..))]
    q: u32,
    /// Largest weight coefficient of the perturbation numerator.
    #[arg(long, env = "MUKAI_BUDGET_NUMERATOR", default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..))]
    numerator: u32,
}

fn parse_spec(s: &str) -> Result<WallSpec, String> {
    let (r, d) = s.split_once(',').ok_or("expected r,Delta")?;
    let r: Int = r.trim().parse().map_err(|e| format!("r: {e}"))?;
    let d: Int = d.trim().parse().map_err(|e| format!("Delta: {e}"))?;
    WallSpec::new(r, d).map_err(|e| e.to_string())
}

/// Outcome of a command: exit status and the report to print.
struct Report {
    code: u8,
    body: Value,
}

const OK: u8 = 0;
const INPUT: u8 = 1;
const EXHAUSTED: u8 = 2;
const INTERNAL: u8 = 3;

fn report(code: u8, body: Value) -> Report {
    let mut body = body;
    if let Value::Object(map) = &mut body {
        map.insert("schema".into(), json!(1));
    }
    Report { code, body }
}

fn failure(code: u8, kind: &str, message: impl ToString) -> Report {
    report(code, json!({ "error": kind, "message": message.to_string() }))
}

/// Inline JSON when the argument looks like JSON, otherwise a path to a JSON file.
fn load<T: serde::de::DeserializeOwned>(arg: &str, what: &str) -> Result<T, Report> {
    let trimmed = arg.trim_start();
    let text = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        arg.to_string()
    } else {
        std::fs::read_to_string(Path::new(arg))
            .map_err(|e| failure(INPUT, "input", format!("cannot read {what} from {arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| failure(INPUT, "input", format!("invalid {what}: {e}")))
}

fn reduction_failure(e: ReductionError) -> Report {
    match e {
        ReductionError::SearchExhausted(f) => report(
            EXHAUSTED,
            json!({ "error": "search_exhausted", "message": ReductionError::SearchExhausted(f.clone()).to_string(), "failure": f }),
        ),
        e if e.is_precondition() => failure(INPUT, "precondition", e),
        e => failure(INTERNAL, "internal", e),
    }
}

fn wall_failure(e: WallError) -> Report {
    match e {
        WallError::Exhausted(f) => {
            let message = WallError::Exhausted(f.clone()).to_string();
            report(EXHAUSTED, json!({ "error": "search_exhausted", "message": message, "failure": f }))
        }
        WallError::Lattice(LatticeError::Internal(m)) => failure(INTERNAL, "internal", m),
        e => failure(INPUT, "precondition", e),
    }
}

fn run(command: Command) -> Result<Report, Report> {
    Ok(match command {
        Command::Reduce { v, budget } => {
            let v: MukaiVector = load(&v, "Mukai vector")?;
            let budget = SearchBudget { ab: budget.ab.into(), eta: budget.eta.into() };
            let cert = reduce_even(&v, &budget).map_err(reduction_failure)?;
            let check = verify_certificate(&cert);
            if !check.ok {
                return Err(report(
                    INTERNAL,
                    json!({ "error": "verification", "message": check.detail(), "certificate": cert, "verification": check }),
                ));
            }
            report(OK, json!({ "certificate": cert, "verification": check }))
        }
        Command::Kim { v } => {
            let v: MukaiVector = load(&v, "Mukai vector")?;
            let (m, w) = kim_normalize(&v).map_err(reduction_failure)?;
            report(OK, json!({ "move": m, "result": w, "t": w.t() }))
        }
        Command::Walls { h, spec } => {
            let h: ClassVector = load(&h, "class vector")?;
            let ample = AmpleClass::new(h).map_err(wall_failure)?;
            let walls = walls_through(&ample, &spec).map_err(wall_failure)?;
            let witnesses: Vec<ClassVector> = walls.iter().map(|w| w.xi).collect();
            report(OK, json!({ "count": witnesses.len(), "witnesses": witnesses }))
        }
        Command::Polarize { l1, fa, spec, budget } => {
            let l1: ClassVector = load(&l1, "class vector")?;
            let fa: ClassVector = load(&fa, "class vector")?;
            let ample = AmpleClass::new(l1).map_err(wall_failure)?;
            let budget =
                PolarizationBudget { n: budget.n.into(), q: budget.q.into(), numerator: budget.numerator.into() };
            let pol = construct_polarization(&ample, &fa, &spec, &budget).map_err(wall_failure)?;
            report(OK, serde_json::to_value(&pol).expect("polarization serializes"))
        }
        Command::Pair { v, w } => {
            let v: MukaiVector = load(&v, "Mukai vector")?;
            let w: MukaiVector = load(&w, "Mukai vector")?;
            report(
                OK,
                json!({ "pairing": mukai::mukai_pairing(&v, &w), "v_square": [mukai::v_square(&v), mukai::v_square(&w)] }),
            )
        }
        Command::Gram => {
            let g = lattice::gram_matrix();
            let rows: Vec<Vec<Int>> = g.iter().map(|r| r.to_vec()).collect();
            let det = mukai_core::arith::determinant(&rows);
            report(OK, json!({ "gram": rows, "determinant": det }))
        }
        Command::Verify { seed, cases } => {
            let suite = verify::run(seed, cases as usize);
            let ok = suite.iter().all(|p| p.failed == 0);
            report(if ok { OK } else { INTERNAL }, json!({ "seed": seed, "ok": ok, "properties": suite }))
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { INPUT } else { OK });
        }
    };
    let out = run(cli.command).unwrap_or_else(|e| e);
    if out.code != OK {
        if let Some(m) = out.body.get("message").and_then(Value::as_str) {
            eprintln!("mukai: {m}");
        }
    }
    let text = match cli.format {
        Format::Json => serde_json::to_string(&out.body).expect("report serializes") + "\n",
        Format::Text => render::text(&out.body),
    };
    // a closed pipe downstream is not an error of ours
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    ExitCode::from(out.code)
}
