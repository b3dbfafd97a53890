//! `graphstar` command line: every subcommand prints one JSON document on
//! stdout.
//!
//! Exit codes: 0 success, 1 contract violation (bad input, failed
//! precondition), 2 internal invariant failure.

use std::io::Write;
use std::panic::{self, AssertUnwindSafe};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use graphstar_core::algebra::nonlinear::nonlinear_coaction_demo;
use graphstar_core::algebra::state::state_eval;
use graphstar_core::io::parse_element;
use graphstar_core::linalg::{round12, DEFAULT_TOL};
use graphstar_core::quantum::{
    build_coactions, coincidence_verdict, emit_banica, emit_bichon, emit_wreath, kac_witness_blocks,
    state_equivariance_check, verify_equivariance, verify_magic, MagicUnitary, Presentation,
};
use graphstar_core::{classical_automorphisms, kms_profile, structural_report, Error, Exec, Graph};

/// Environment variable overriding the comparison tolerance.
pub const TOL_ENV: &str = "GRAPHSTAR_TOL";

const SIGNIFICANT_DIGITS: u32 = 12;

#[derive(Parser, Debug)]
#[command(name = "graphstar", version, about = "Graph correspondences, KMS states and quantum graph symmetries")]
struct Cli {
    /// Disable data-parallel evaluation.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Structural report, adjacency matrix and classical automorphism count.
    Analyze {
        /// Graph `{vertices, edges}` as inline JSON or a path.
        #[arg(long)]
        graph: String,
    },
    /// Perron data of the critical KMS state, optionally evaluated on an element.
    Kms {
        /// Graph `{vertices, edges}` as inline JSON or a path.
        #[arg(long)]
        graph: String,
        /// Element as inline JSON or a path to a JSON file.
        #[arg(long)]
        monomial: Option<String>,
    },
    /// Generators and relations of a quantum automorphism group.
    Presentation {
        /// Graph `{vertices, edges}` as inline JSON or a path.
        #[arg(long)]
        graph: String,
        #[arg(long, value_enum)]
        flavor: Flavor,
    },
    /// Check a magic unitary against the presentation(s) of the graph.
    VerifyMagic {
        /// Graph `{vertices, edges}` as inline JSON or a path.
        #[arg(long)]
        graph: String,
        /// Array of entries (inline JSON or path); entries are `[re, im]`
        /// scalars or square arrays of them.
        #[arg(long)]
        unitary: String,
        /// Defaults to banica and bichon on simple graphs, wreath otherwise.
        #[arg(long, value_enum)]
        flavor: Option<Flavor>,
    },
    /// Equivariance of the coactions induced by a magic unitary.
    Equivariance {
        /// Graph `{vertices, edges}` as inline JSON or a path.
        #[arg(long)]
        graph: String,
        /// Magic unitary as inline JSON or a path.
        #[arg(long)]
        unitary: String,
        /// Tensor level for check (g) and monomial length for the state check.
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// The torus coaction on O_n: unitarity, Cuntz relations, gauge
    /// equivariance, coassociativity and non-linearity.
    DemoNonlinear {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Flavor {
    Banica,
    Bichon,
    Wreath,
}

impl Flavor {
    fn name(self) -> &'static str {
        match self {
            Flavor::Banica => "banica",
            Flavor::Bichon => "bichon",
            Flavor::Wreath => "wreath",
        }
    }
}

enum Failure {
    Contract { code: String, message: String, location: Option<String> },
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Contract { code: e.code().into(), message: e.to_string(), location: e.location() }
    }
}

fn contract(code: &str, message: impl Into<String>, location: Option<String>) -> Failure {
    Failure::Contract { code: code.into(), message: message.into(), location }
}

struct Ctx {
    tol: f64,
    exec: Exec,
}

fn read_input(arg: &str, flag: &str) -> Result<String, Failure> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(arg)
        .map_err(|e| contract("io", format!("cannot read {flag} input: {e}"), Some(arg.to_string())))
}

fn load_graph(path: &str) -> Result<Graph, Failure> {
    Ok(Graph::parse(&read_input(path, "--graph")?)?)
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report serialization")
}

fn analyze(graph: &str) -> Result<Value, Failure> {
    let g = load_graph(graph)?;
    let (count, bound_exceeded) = match classical_automorphisms(&g) {
        Ok(a) => (Some(a.len()), false),
        Err(Error::SizeBoundExceeded { .. }) => (None, true),
        Err(e) => return Err(e.into()),
    };
    Ok(json!({
        "graph": g.to_value(),
        "adjacency": g.adjacency(),
        "structural_report": to_value(&structural_report(&g)),
        "automorphism_count": count,
        "automorphism_bound_exceeded": bound_exceeded,
    }))
}

fn kms(graph: &str, monomial: Option<&str>) -> Result<Value, Failure> {
    let g = load_graph(graph)?;
    let profile = kms_profile(&g);
    let mut out = to_value(&profile);
    if let Some(m) = monomial {
        let x = parse_element(&g, &read_input(m, "--monomial")?)?;
        let v = state_eval(&x, &profile)?;
        out["value"] = json!([v.re, v.im]);
    }
    Ok(out)
}

fn emit(g: &Graph, flavor: Flavor) -> Result<Presentation, Failure> {
    Ok(match flavor {
        Flavor::Banica => emit_banica(g)?,
        Flavor::Bichon => emit_bichon(g)?,
        Flavor::Wreath => emit_wreath(g)?,
    })
}

fn presentation(graph: &str, flavor: Flavor) -> Result<Value, Failure> {
    let g = load_graph(graph)?;
    let mut out = emit(&g, flavor)?.to_value();
    if flavor != Flavor::Wreath {
        out["coincidence"] = match coincidence_verdict(&g) {
            Ok(v) => to_value(&v),
            Err(e) => json!({"withheld": e.to_string()}),
        };
    }
    Ok(out)
}

fn load_unitary(arg: &str) -> Result<MagicUnitary, Failure> {
    Ok(MagicUnitary::from_json(&read_input(arg, "--unitary")?)?)
}

fn verify(ctx: &Ctx, graph: &str, unitary: &str, flavor: Option<Flavor>) -> Result<Value, Failure> {
    let g = load_graph(graph)?;
    let u = load_unitary(unitary)?;
    let flavors = match flavor {
        Some(f) => vec![f],
        None if g.max_multiplicity() <= 1 => vec![Flavor::Banica, Flavor::Bichon],
        None => vec![Flavor::Wreath],
    };
    let mut reports = Map::new();
    let mut passed = true;
    for f in flavors {
        let p = emit(&g, f)?;
        let r = verify_magic(&u, &p, ctx.tol, ctx.exec)?;
        passed &= r.passed;
        reports.insert(f.name().into(), to_value(&r));
    }
    Ok(json!({
        "reports": reports,
        "passed": passed,
        "magic_defect": u.magic_defect(),
        "kac": to_value(&kac_witness_blocks(&u)),
    }))
}

fn equivariance(ctx: &Ctx, graph: &str, unitary: &str, depth: usize) -> Result<Value, Failure> {
    let g = load_graph(graph)?;
    let u = load_unitary(unitary)?;
    let c = build_coactions(&u, &g)?;
    let report = verify_equivariance(&c, &g, depth, ctx.tol, ctx.exec)?;
    let profile = kms_profile(&g);
    let state = if !profile.exists {
        json!({"skipped": format!("no KMS state: {}", profile.reason.clone().unwrap_or_default())})
    } else if !report.passed {
        json!({"skipped": "coactions fail the correspondence checks"})
    } else {
        let s = state_equivariance_check(&c, &profile, &g, depth, ctx.tol, ctx.exec)?;
        if !s.agree {
            return Err(Failure::Internal(format!(
                "tau_equivariant={} but phi_equivariant={}",
                s.tau_equivariant, s.phi_equivariant
            )));
        }
        to_value(&s)
    };
    Ok(json!({"correspondence": to_value(&report), "state": state}))
}

fn demo(ctx: &Ctx, n: usize, depth: usize) -> Result<Value, Failure> {
    Ok(to_value(&nonlinear_coaction_demo(n, depth, ctx.exec)?))
}

/// Rounds every float to the fixed number of significant digits.
fn canonicalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round12(n.as_f64().expect("f64"));
            serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonicalize).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, canonicalize(v))).collect()),
        other => other,
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Analyze { .. } => "analyze",
        Command::Kms { .. } => "kms",
        Command::Presentation { .. } => "presentation",
        Command::VerifyMagic { .. } => "verify-magic",
        Command::Equivariance { .. } => "equivariance",
        Command::DemoNonlinear { .. } => "demo-nonlinear",
    }
}

fn dispatch(ctx: &Ctx, c: &Command) -> Result<Value, Failure> {
    match c {
        Command::Analyze { graph } => analyze(graph),
        Command::Kms { graph, monomial } => kms(graph, monomial.as_deref()),
        Command::Presentation { graph, flavor } => presentation(graph, *flavor),
        Command::VerifyMagic { graph, unitary, flavor } => verify(ctx, graph, unitary, *flavor),
        Command::Equivariance { graph, unitary, depth } => equivariance(ctx, graph, unitary, *depth),
        Command::DemoNonlinear { n, depth } => demo(ctx, *n, *depth),
    }
}

fn emit_json(out: &mut dyn Write, v: &Value) {
    let text = serde_json::to_string_pretty(v).expect("json");
    let _ = writeln!(out, "{text}");
}

fn error_doc(code: &str, message: &str, location: Option<String>) -> Value {
    json!({"code": code, "message": message, "location": location})
}

/// Parses the tolerance override; `None` means unset.
pub fn tolerance_from(value: Option<&str>) -> Result<f64, String> {
    match value {
        None => Ok(DEFAULT_TOL),
        Some(s) => match s.trim().parse::<f64>() {
            Ok(t) if t.is_finite() && t > 0.0 => Ok(t),
            _ => Err(format!("{TOL_ENV} must be a positive number, got `{s}`")),
        },
    }
}

/// Runs one command with an explicit tolerance and returns the exit code.
pub fn run_with_tol<I, T>(args: I, tol: f64, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let message = e.to_string().lines().next().unwrap_or("usage error").to_string();
            emit_json(out, &error_doc("usage", &message, None));
            return 1;
        }
    };
    let ctx = Ctx { tol, exec: if cli.sequential { Exec::Sequential } else { Exec::default() } };
    let result = panic::catch_unwind(AssertUnwindSafe(|| dispatch(&ctx, &cli.command)));
    match result {
        Ok(Ok(body)) => {
            let mut doc = match body {
                Value::Object(o) => o,
                other => {
                    let mut m = Map::new();
                    m.insert("result".into(), other);
                    m
                }
            };
            doc.insert(
                "meta".into(),
                json!({
                    "command": command_name(&cli.command),
                    "tolerance": tol,
                    "significant_digits": SIGNIFICANT_DIGITS,
                }),
            );
            emit_json(out, &canonicalize(Value::Object(doc)));
            0
        }
        Ok(Err(Failure::Contract { code, message, location })) => {
            emit_json(out, &error_doc(&code, &message, location));
            1
        }
        Ok(Err(Failure::Internal(message))) => {
            emit_json(out, &error_doc("internal", &message, None));
            2
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            emit_json(out, &error_doc("internal", &message, None));
            2
        }
    }
}

/// Runs one command, reading the tolerance from `GRAPHSTAR_TOL`.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match tolerance_from(std::env::var(TOL_ENV).ok().as_deref()) {
        Ok(tol) => run_with_tol(args, tol, out),
        Err(message) => {
            emit_json(out, &error_doc("invalid_tolerance", &message, Some(TOL_ENV.into())));
            1
        }
    }
}
