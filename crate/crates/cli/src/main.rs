//! Command line front end for the `intcond` library: parse gauges and
//! fields, dispatch to the verification routines, print deterministic
//! reports.
//!
//! Exit codes: `0` verified/consistent, `1` hypothesis failure or inequality
//! violation, `2` inconclusive, `3` usage or input error.
//!
//! Reports are deterministic byte-for-byte for a fixed invocation (including
//! `--seed`): floating-point values print with 17 significant digits and
//! object keys are sorted.

use clap::{Args, Parser, Subcommand, ValueEnum};
use intcond::bounds::{
    check_divergence, check_exponent_pairs, check_localized, verify_bound, BoundConfig,
    CheckStatus, Outcome, Site,
};
use intcond::conditions::{evaluate_conditions, ConditionsConfig};
use intcond::geometry::{SampleConfig, ScalarField};
use intcond::{MonotoneFn, VerdictKind};
use serde_json::{Map, Value};
use std::process::ExitCode;

const SCHEMA_VERSION: u64 = 1;

#[derive(Parser)]
#[command(
    name = "intcond",
    version,
    about = "Generalized inverses, divergence conditions, and mass-vs-tail bounds for convex gauges"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the generalized inverse of a gauge.
    Inverse(InverseArgs),
    /// Classify the six equivalent divergence conditions of a gauge.
    Conditions(ConditionsArgs),
    /// Verify the lower bound between the gauge mass of a field and the
    /// value-space tail integral.
    Bound(BoundArgs),
    /// Check the divergence criterion for a field and gauge, optionally for
    /// exponent pairs or at a localized site.
    Theorem(TheoremArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
struct OutputArgs {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct InverseArgs {
    /// Gauge: an expression in `t` (`"exp(t^2)"`) or compact text
    /// (`"fam: pow 2"`, `"pl: (0,0) (1,2)"`).
    #[arg(long)]
    phi: String,
    /// Query values, comma separated; `inf` is allowed. Defaults to a
    /// geometric grid.
    #[arg(long)]
    tau: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ConditionsArgs {
    /// Gauge: an expression in `t` or compact text form.
    #[arg(long)]
    phi: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct BoundArgs {
    /// Dimension of the ambient space.
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Gauge: an expression in `t` or compact text form.
    #[arg(long)]
    phi: String,
    /// Field: an expression in `x1..xn` and `abs(x)`.
    #[arg(long)]
    q: String,
    /// Power applied to the spherical means on the left side; values below 1
    /// switch to the cutoff variant `max(Q, 1)`.
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// Seed for the spherical-mean sampler.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Monte Carlo samples per shell for non-radial fields.
    #[arg(long, default_value_t = 16384)]
    samples: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct TheoremArgs {
    /// Dimension of the ambient space.
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Gauge: an expression in `t` or compact text form.
    #[arg(long)]
    phi: String,
    /// Field: an expression in `x1..xn` and `abs(x)`.
    #[arg(long)]
    q: String,
    /// Start of the value-space tail; must exceed `Φ(0)`. Defaults to the
    /// canonical cutoff `max(e·Φ(0), Φ(Δ))`.
    #[arg(long)]
    delta0: Option<f64>,
    /// Exponent α of a pair (repeat the flag for several pairs).
    #[arg(long, action = clap::ArgAction::Append, requires = "beta",
          conflicts_with_all = ["delta0", "center", "r0", "exterior", "spherical_weight"])]
    alpha: Vec<f64>,
    /// Exponent β of a pair, matched positionally with `--alpha`.
    #[arg(long, action = clap::ArgAction::Append, requires = "alpha")]
    beta: Vec<f64>,
    /// Center of an interior ball site (comma-separated coordinates).
    #[arg(long, requires = "r0", conflicts_with_all = ["exterior", "spherical_weight"])]
    center: Option<String>,
    /// Radius of the interior ball site.
    #[arg(long, requires = "center")]
    r0: Option<f64>,
    /// Run the exterior variant over `{|x| > R}` with this radius.
    #[arg(long, value_name = "R", conflicts_with = "spherical_weight")]
    exterior: Option<f64>,
    /// Run the chordal-metric variant over the whole space.
    #[arg(long)]
    spherical_weight: bool,
    /// Seed for the spherical-mean sampler.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Monte Carlo samples per shell for non-radial fields.
    #[arg(long, default_value_t = 16384)]
    samples: usize,
    #[command(flatten)]
    output: OutputArgs,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // Help and version requests print to stdout and succeed; real
            // usage errors go to stderr with the usage exit code.
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok((rendered, code)) => {
            println!("{rendered}");
            ExitCode::from(code)
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<(String, u8), String> {
    let (report, format, code) = match cli.command {
        Command::Inverse(a) => run_inverse(a)?,
        Command::Conditions(a) => run_conditions(a)?,
        Command::Bound(a) => run_bound(a)?,
        Command::Theorem(a) => run_theorem(a)?,
    };
    Ok((render(&report, format), code))
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn run_inverse(a: InverseArgs) -> Result<(Value, Format, u8), String> {
    let phi = parse_phi(&a.phi)?;
    let inverse = phi.inverse().map_err(|e| format!("--phi: {e}"))?;
    let taus = match &a.tau {
        Some(src) => parse_taus(src)?,
        None => default_taus(),
    };
    let rows: Vec<Value> = taus
        .iter()
        .map(|&tau| {
            let mut m = Map::new();
            m.insert("tau".into(), extended(tau));
            m.insert("inverse".into(), extended(inverse.eval_f64(tau)));
            Value::Object(m)
        })
        .collect();
    let mut extra = Map::new();
    extra.insert("phi".into(), Value::String(phi.to_text()));
    extra.insert("rows".into(), Value::Array(rows));
    Ok((top("inverse", extra), a.output.format, 0))
}

fn run_conditions(a: ConditionsArgs) -> Result<(Value, Format, u8), String> {
    let phi = parse_phi(&a.phi)?;
    let report =
        evaluate_conditions(&phi, &ConditionsConfig::default()).map_err(|e| e.to_string())?;
    let code = if !report.equivalence.consistent {
        1
    } else {
        let c = &report.conditions;
        let any_open = [&c.c1, &c.c2, &c.c3, &c.c4, &c.c5, &c.c6]
            .iter()
            .any(|v| v.kind == VerdictKind::Inconclusive);
        if any_open {
            2
        } else {
            0
        }
    };
    let body = as_object(&report)?;
    Ok((top("conditions", body), a.output.format, code))
}

fn run_bound(a: BoundArgs) -> Result<(Value, Format, u8), String> {
    let phi = parse_phi(&a.phi)?;
    let field = parse_field(&a.q, a.n)?;
    let cfg = BoundConfig {
        lambda: a.lambda,
        samples: SampleConfig {
            seed: a.seed,
            samples: a.samples,
        },
        ..BoundConfig::default()
    };
    let report = verify_bound(&field, &phi, &cfg).map_err(|e| e.to_string())?;
    let code = match report.outcome {
        Outcome::Holds => 0,
        Outcome::Violated => 1,
        Outcome::Indeterminate => 2,
    };
    let mut body = as_object(&report)?;
    body.insert("phi".into(), Value::String(phi.to_text()));
    body.insert("q".into(), Value::String(a.q.clone()));
    Ok((top("bound", body), a.output.format, code))
}

fn run_theorem(a: TheoremArgs) -> Result<(Value, Format, u8), String> {
    let phi = parse_phi(&a.phi)?;
    let field = parse_field(&a.q, a.n)?;
    let cfg = BoundConfig {
        samples: SampleConfig {
            seed: a.seed,
            samples: a.samples,
        },
        ..BoundConfig::default()
    };

    let (variant, status, mut body) = if !a.alpha.is_empty() {
        if a.alpha.len() != a.beta.len() {
            return Err(format!(
                "--alpha and --beta must pair up, got {} and {}",
                a.alpha.len(),
                a.beta.len()
            ));
        }
        let pairs: Vec<(f64, f64)> = a.alpha.iter().copied().zip(a.beta.iter().copied()).collect();
        let report = check_exponent_pairs(&field, &phi, &pairs, &cfg).map_err(|e| e.to_string())?;
        let status = report.status;
        ("exponent_pairs", status, as_object(&report)?)
    } else if let Some(site) = parse_site(&a)? {
        let report =
            check_localized(&field, &phi, site, a.delta0, &cfg).map_err(|e| e.to_string())?;
        let status = report.status;
        ("localized", status, as_object(&report)?)
    } else {
        let report = check_divergence(&field, &phi, a.delta0, &cfg).map_err(|e| e.to_string())?;
        let status = report.status;
        ("divergence", status, as_object(&report)?)
    };

    let code = match status {
        CheckStatus::Confirmed => 0,
        CheckStatus::HypothesisFailure | CheckStatus::ConclusionFailure => 1,
        CheckStatus::Inconclusive => 2,
    };
    body.insert("variant".into(), Value::String(variant.into()));
    body.insert("phi".into(), Value::String(phi.to_text()));
    body.insert("q".into(), Value::String(a.q.clone()));
    Ok((top("theorem", body), a.output.format, code))
}

fn parse_site(a: &TheoremArgs) -> Result<Option<Site>, String> {
    if let Some(center_src) = &a.center {
        let center = parse_center(center_src, a.n)?;
        let radius = a.r0.expect("clap enforces --r0 with --center");
        return Ok(Some(Site::Interior { center, radius }));
    }
    if let Some(radius) = a.exterior {
        return Ok(Some(Site::Exterior { radius }));
    }
    if a.spherical_weight {
        return Ok(Some(Site::Spherical));
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Input parsing
// ---------------------------------------------------------------------------

/// Compact text prefixes of [`MonotoneFn::from_text`]; anything else is
/// treated as an expression in `t`.
const TEXT_PREFIXES: [&str; 5] = ["pl:", "plmin:", "fam:", "inv(", "comp("];

fn parse_phi(src: &str) -> Result<MonotoneFn, String> {
    let trimmed = src.trim_start();
    if TEXT_PREFIXES.iter().any(|p| trimmed.starts_with(p)) {
        MonotoneFn::from_text(src).map_err(|e| format!("--phi: {e}"))
    } else {
        MonotoneFn::from_expr(src).map_err(|e| format!("--phi: {e}"))
    }
}

fn parse_field(src: &str, n: usize) -> Result<ScalarField, String> {
    ScalarField::from_expr(src, n).map_err(|e| format!("--q: {e}"))
}

fn parse_scalar(tok: &str) -> Result<f64, String> {
    let t = tok.trim();
    let v = match t {
        "inf" => f64::INFINITY,
        "-inf" => f64::NEG_INFINITY,
        _ => t
            .parse::<f64>()
            .map_err(|_| format!("bad number {t:?}"))?,
    };
    Ok(v)
}

fn parse_taus(src: &str) -> Result<Vec<f64>, String> {
    let mut taus = Vec::new();
    for tok in src.split(',') {
        let v = parse_scalar(tok).map_err(|e| format!("--tau: {e}"))?;
        if v.is_nan() || v < 0.0 {
            return Err(format!("--tau: query values live in [0, inf], got {v}"));
        }
        taus.push(v);
    }
    if taus.is_empty() {
        return Err("--tau: expected at least one value".into());
    }
    Ok(taus)
}

fn default_taus() -> Vec<f64> {
    let mut taus = vec![0.0];
    for k in -4..=8 {
        taus.push((2.0f64).powi(k));
    }
    taus.push(f64::INFINITY);
    taus
}

fn parse_center(src: &str, n: usize) -> Result<Vec<f64>, String> {
    let coords: Result<Vec<f64>, String> = src.split(',').map(parse_scalar).collect();
    let coords = coords.map_err(|e| format!("--center: {e}"))?;
    if coords.len() != n {
        return Err(format!(
            "--center: expected {n} coordinates, got {}",
            coords.len()
        ));
    }
    if coords.iter().any(|c| !c.is_finite()) {
        return Err("--center: coordinates must be finite".into());
    }
    Ok(coords)
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

fn as_object<T: serde::Serialize>(report: &T) -> Result<Map<String, Value>, String> {
    match serde_json::to_value(report).map_err(|e| e.to_string())? {
        Value::Object(m) => Ok(m),
        other => Err(format!("report serialized to non-object {other:?}")),
    }
}

fn top(command: &str, body: Map<String, Value>) -> Value {
    let mut m = Map::new();
    m.insert("schema".into(), Value::from(SCHEMA_VERSION));
    m.insert("command".into(), Value::String(command.into()));
    for (k, v) in body {
        m.insert(k, v);
    }
    Value::Object(m)
}

/// A float as a JSON value, with non-finite values as strings (matching the
/// library's serialization of extended reals).
fn extended(v: f64) -> Value {
    if v.is_nan() {
        Value::String("nan".into())
    } else if v == f64::INFINITY {
        Value::String("inf".into())
    } else if v == f64::NEG_INFINITY {
        Value::String("-inf".into())
    } else {
        Value::from(v)
    }
}

/// 17 significant digits; scientific notation keeps the width predictable.
fn fmt_float(x: f64) -> String {
    // Negative zero would print with a sign; collapse it.
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

fn fmt_number(n: &serde_json::Number) -> String {
    match n.as_f64() {
        Some(f) if n.is_f64() => fmt_float(f),
        _ => n.to_string(),
    }
}

fn render(report: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut out = String::new();
            render_json(report, 0, &mut out);
            out
        }
        Format::Csv => render_csv(report),
        Format::Text => {
            let mut rows = Vec::new();
            flatten(report, String::new(), &mut rows);
            let mut out = String::new();
            for (k, v) in rows {
                out.push_str(&k);
                out.push_str(" = ");
                out.push_str(&v);
                out.push('\n');
            }
            out.pop();
            out
        }
    }
}

fn render_json(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent + 1);
    let close = "  ".repeat(indent);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => out.push_str(&fmt_number(n)),
        Value::String(s) => {
            out.push_str(&serde_json::to_string(s).expect("string serialization is infallible"))
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                out.push_str(if i == 0 { "\n" } else { ",\n" });
                out.push_str(&pad);
                render_json(item, indent + 1, out);
            }
            out.push('\n');
            out.push_str(&close);
            out.push(']');
        }
        Value::Object(fields) => {
            if fields.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push('{');
            let mut first = true;
            for (k, item) in fields {
                out.push_str(if first { "\n" } else { ",\n" });
                first = false;
                out.push_str(&pad);
                out.push_str(&serde_json::to_string(k).expect("string serialization"));
                out.push_str(": ");
                render_json(item, indent + 1, out);
            }
            out.push('\n');
            out.push_str(&close);
            out.push('}');
        }
    }
}

fn render_csv(report: &Value) -> String {
    // An inverse table gets its natural two-column layout; everything else is
    // a flattened `field,value` listing.
    if let Some(rows) = report.get("rows").and_then(Value::as_array) {
        if report.get("command").and_then(Value::as_str) == Some("inverse") {
            let mut out = String::from("tau,inverse");
            for row in rows {
                let tau = row.get("tau").expect("row has tau");
                let inv = row.get("inverse").expect("row has inverse");
                out.push('\n');
                out.push_str(&csv_cell(tau));
                out.push(',');
                out.push_str(&csv_cell(inv));
            }
            return out;
        }
    }
    let mut rows = Vec::new();
    flatten(report, String::new(), &mut rows);
    let mut out = String::from("field,value");
    for (k, v) in rows {
        out.push('\n');
        out.push_str(&csv_escape(&k));
        out.push(',');
        out.push_str(&csv_escape(&v));
    }
    out
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Number(n) => fmt_number(n),
        Value::String(s) => csv_escape(s),
        other => csv_escape(&other.to_string()),
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') || s.contains('\r') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn flatten(v: &Value, path: String, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(fields) => {
            if fields.is_empty() {
                rows.push((path, "{}".into()));
                return;
            }
            for (k, item) in fields {
                let sub = if path.is_empty() {
                    k.clone()
                } else {
                    format!("{path}.{k}")
                };
                flatten(item, sub, rows);
            }
        }
        Value::Array(items) => {
            if items.is_empty() {
                rows.push((path, "[]".into()));
                return;
            }
            for (i, item) in items.iter().enumerate() {
                flatten(item, format!("{path}[{i}]"), rows);
            }
        }
        Value::Null => rows.push((path, String::new())),
        Value::Bool(b) => rows.push((path, b.to_string())),
        Value::Number(n) => rows.push((path, fmt_number(n))),
        Value::String(s) => rows.push((path, s.clone())),
    }
}
