//! Command-line front end. Every command prints deterministic JSON to
//! stdout (or `--out`). Exit status: 0 success, 1 verification failure,
//! 2 invalid input.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::code::{construct_gmdelta, GmdParams, PICode};
use crate::damping::AdAnalysis;
use crate::error::{Error, Result};
use crate::exact::{parse_rational, to_scientific, Radical, RadicalSum};
use crate::identities::{self, GridSpec, Lemma};
use crate::kl::{self, ConditionReport};
use crate::oracle;
use crate::par::{self, Execution};
use crate::pr::{self, Gauge, SolveConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Significant digits of the non-authoritative decimal fields.
const APPROX_DIGITS: usize = 15;

#[derive(Parser, Debug)]
#[command(name = "piqec", version, about = "Permutation-invariant quantum code toolkit")]
struct Cli {
    /// Run every data-parallel loop on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the (g, m, delta) code and write it as JSON.
    Construct(ConstructArgs),
    /// Check conditions (C1)-(C4) for t Pauli errors.
    Verify(VerifyArgs),
    /// Check conditions (C1)-(C4) for s deletions.
    DeletionCheck(DeletionArgs),
    /// Dense Knill-Laflamme Gram check (n <= 24).
    Oracle(OracleArgs),
    /// Search for solutions of the quadratic system for odd n and t.
    PrSolve(PrSolveArgs),
    /// Amplitude-damping constants and infidelity bound.
    AdBound(AdBoundArgs),
    /// Exhaustive identity sweeps with a JSON-lines ledger.
    IdentityCheck(IdentityArgs),
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[arg(long)]
    g: u32,
    #[arg(long)]
    m: u32,
    #[arg(long)]
    delta: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    code: PathBuf,
    #[arg(long)]
    t: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DeletionArgs {
    #[arg(long)]
    code: PathBuf,
    #[arg(long)]
    s: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long)]
    code: PathBuf,
    /// Pauli errors of weight at most t.
    #[arg(long, conflicts_with = "s", required_unless_present = "s")]
    t: Option<usize>,
    /// Bra-string operators for s deletions.
    #[arg(long)]
    s: Option<usize>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GaugeArg {
    /// q_0 = 1
    Q0,
    /// sum q^2 = 1
    Norm,
}

#[derive(Args, Debug)]
struct PrSolveArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    t: usize,
    #[arg(long, default_value_t = 100)]
    restarts: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = GaugeArg::Q0)]
    gauge: GaugeArg,
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AdBoundArgs {
    #[arg(long)]
    g: u32,
    #[arg(long)]
    m: u32,
    #[arg(long)]
    delta: u32,
    #[arg(long)]
    t: usize,
    /// Damping probability; decimal or a/b, read exactly.
    #[arg(long)]
    p: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GridArg {
    Default,
    Small,
}

#[derive(Args, Debug)]
struct IdentityArgs {
    /// E1, two_sums, E2, Z, telescoping, or all.
    #[arg(long, default_value = "all")]
    lemma: String,
    #[arg(long, value_enum, default_value_t = GridArg::Default)]
    grid: GridArg,
    /// Ledger path (JSON lines); the summary still goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    par::init_threads_from_env();
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    match dispatch(cli.command, exec) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

fn dispatch(command: Command, exec: Execution) -> Result<i32> {
    match command {
        Command::Construct(a) => {
            let code = construct_gmdelta(GmdParams::new(a.g, a.m, a.delta)?)?;
            emit(&code_json(&code), a.out.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::Verify(a) => {
            let code = load_code(&a.code)?;
            let reports = kl::verify_pauli_with(&code, a.t, exec)?;
            finish_reports(&code, json!({ "t": a.t }), &reports, a.out.as_deref())
        }
        Command::DeletionCheck(a) => {
            let code = load_code(&a.code)?;
            let reports = kl::verify_deletion_with(&code, a.s, exec)?;
            finish_reports(&code, json!({ "s": a.s }), &reports, a.out.as_deref())
        }
        Command::Oracle(a) => run_oracle(a, exec),
        Command::PrSolve(a) => run_pr_solve(a, exec),
        Command::AdBound(a) => run_ad_bound(a),
        Command::IdentityCheck(a) => run_identities(a, exec),
    }
}

fn emit(value: &Value, out: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn load_code(path: &Path) -> Result<PICode> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn radical_json(r: &Radical) -> Value {
    let mut v = serde_json::to_value(r).expect("radical serializes");
    if let Value::Object(map) = &mut v {
        map.insert("decimal_approx".into(), Value::String(r.to_decimal(APPROX_DIGITS)));
    }
    v
}

fn sum_approx(s: &RadicalSum) -> Value {
    Value::String(s.to_decimal(APPROX_DIGITS))
}

/// Code JSON with a non-authoritative `decimal_approx` field on each
/// radical; loaders ignore the extra field.
pub fn code_json(code: &PICode) -> Value {
    let vec = |v: &[Radical]| Value::Array(v.iter().map(radical_json).collect());
    json!({
        "n": code.n(),
        "label": code.label(),
        "alpha": vec(code.alpha()),
        "beta": vec(code.beta()),
    })
}

fn report_json(r: &ConditionReport) -> Value {
    let mut v = serde_json::to_value(r).expect("report serializes");
    if let Value::Object(map) = &mut v {
        map.insert("residual_decimal_approx".into(), sum_approx(&r.residual));
    }
    v
}

fn finish_reports(code: &PICode, param: Value, reports: &[ConditionReport], out: Option<&Path>) -> Result<i32> {
    let passed = kl::all_passed(reports);
    let mut body = Map::new();
    body.insert("code".into(), Value::String(code.label().into()));
    if let Value::Object(p) = param {
        body.extend(p);
    }
    body.insert("passed".into(), Value::Bool(passed));
    body.insert("reports".into(), Value::Array(reports.iter().map(report_json).collect()));
    emit(&Value::Object(body), out)?;
    Ok(if passed { EXIT_OK } else { EXIT_FAIL })
}

fn run_oracle(a: OracleArgs, exec: Execution) -> Result<i32> {
    if !(a.tol > 0.0) {
        return Err(Error::InvalidParams("tol must be positive".into()));
    }
    let code = load_code(&a.code)?;
    let (errors, kind) = match (a.t, a.s) {
        (Some(t), _) => (oracle::pauli_errors(code.n(), t), json!({ "t": t })),
        (None, Some(s)) => {
            if s > code.n() {
                return Err(Error::InvalidParams(format!("s = {s} exceeds n = {}", code.n())));
            }
            (oracle::deletion_errors(s), json!({ "s": s }))
        }
        (None, None) => unreachable!("clap requires --t or --s"),
    };
    let (c0, c1) = oracle::expand_code(&code)?;
    let report = oracle::kl_gram_check_states(&c0, &c1, &errors, a.tol, exec)?;
    let mut body = Map::new();
    body.insert("code".into(), Value::String(code.label().into()));
    if let Value::Object(p) = kind {
        body.extend(p);
    }
    body.insert("operators".into(), json!(errors.len()));
    body.insert("tol".into(), json!(a.tol));
    body.extend(as_object(&report));
    emit(&Value::Object(body), a.out.as_deref())?;
    Ok(if report.passed { EXIT_OK } else { EXIT_FAIL })
}

fn as_object<T: Serialize>(v: &T) -> Map<String, Value> {
    match serde_json::to_value(v) {
        Ok(Value::Object(m)) => m,
        _ => Map::new(),
    }
}

fn run_pr_solve(a: PrSolveArgs, exec: Execution) -> Result<i32> {
    let system = pr::generate_system(a.n, a.t)?;
    let cfg = SolveConfig {
        restarts: a.restarts,
        seed: a.seed,
        gauge: match a.gauge {
            GaugeArg::Q0 => Gauge::Pin(0),
            GaugeArg::Norm => Gauge::UnitNorm,
        },
        tolerance: a.tol,
        max_iterations: a.max_iter,
        execution: exec,
        ..SolveConfig::default()
    };
    cfg.validate(&system)?;
    let equations: Vec<String> = system.equations.iter().map(|e| e.to_string()).collect();
    let (solutions, code) = match pr::solve(&system, &cfg) {
        Ok(s) => (s, EXIT_OK),
        Err(Error::NoSolution { restarts, best_residual }) => {
            eprintln!("no solution found after {restarts} restarts (best residual {best_residual:e}); this is not a proof of nonexistence");
            (Vec::new(), EXIT_FAIL)
        }
        Err(e) => return Err(e),
    };
    let body = json!({
        "n": a.n,
        "t": a.t,
        "equations": equations,
        "seed": a.seed,
        "restarts": a.restarts,
        "tolerance": a.tol,
        "solutions": solutions,
    });
    emit(&body, a.out.as_deref())?;
    Ok(code)
}

fn run_ad_bound(a: AdBoundArgs) -> Result<i32> {
    let params = GmdParams::new(a.g, a.m, a.delta)?;
    let p = parse_rational(&a.p)?;
    let analysis = AdAnalysis::new(params, a.t)?;
    let bound = analysis.infidelity_bound(&p)?;
    let exact_and_approx = |q: &crate::exact::Rational| {
        json!({ "exact": q.to_string(), "decimal_approx": to_scientific(q, APPROX_DIGITS) })
    };
    let body = json!({
        "code": params.label(),
        "n": params.n(),
        "t": a.t,
        "p": exact_and_approx(&p),
        "C": { "class": analysis.c.class, "value": exact_and_approx(&analysis.c.value) },
        "D": {
            "class": analysis.d.class,
            "codeword": analysis.d.codeword,
            "value": exact_and_approx(&analysis.d.value),
        },
        "kraus_count": analysis.kraus_count.to_string(),
        "p0": {
            "radicand": analysis.p0.radicand.as_ref().map(|r| r.to_string()),
            "exponent": analysis.p0.exponent,
            "decimal_30": analysis.p0.to_decimal(30),
        },
        "bound": exact_and_approx(&bound),
    });
    emit(&body, a.out.as_deref())?;
    Ok(EXIT_OK)
}

fn run_identities(a: IdentityArgs, exec: Execution) -> Result<i32> {
    let lemmas: Vec<Lemma> = if a.lemma.eq_ignore_ascii_case("all") {
        Lemma::ALL.to_vec()
    } else {
        vec![a.lemma.parse()?]
    };
    let spec = match a.grid {
        GridArg::Default => GridSpec::default(),
        GridArg::Small => GridSpec::small(),
    };
    let mut ledger = Vec::new();
    let mut summary = Map::new();
    let mut failed_any = false;
    for lemma in lemmas {
        let entries = identities::sweep(lemma, &spec, exec)?;
        let (total, failed) = identities::tally(&entries);
        failed_any |= failed > 0;
        let name = serde_json::to_value(lemma)?.as_str().unwrap_or_default().to_string();
        summary.insert(name, json!({ "total": total, "failed": failed }));
        ledger.extend(entries);
    }
    if let Some(path) = &a.out {
        identities::write_ledger(&ledger, std::io::BufWriter::new(fs::File::create(path)?))?;
    }
    emit(&json!({ "passed": !failed_any, "lemmas": summary }), None)?;
    Ok(if failed_any { EXIT_FAIL } else { EXIT_OK })
}
