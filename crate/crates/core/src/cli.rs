//! Command-line surface of the `spindir` binary.
//!
//! Every command prints one report to standard output (a JSON envelope, or CSV
//! for `table --format csv`). Exit codes: 0 success, 1 property failure,
//! 2 usage error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use log::info;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::Error;
use crate::fidelity::{
    best_fidelity, build_matrix, decompose_product, effective_components, general_fidelity,
    minimal_projection, optimal_fidelity, parse_pattern,
};
use crate::jacobi::{largest_zero, MAX_DEGREE};
use crate::montecarlo::{simulate, simulate_parallel, worker_count};
use crate::povm::{octahedron_povm, tetrahedron_with_reference, verify_completeness, PovmSpec};
use crate::su2::HalfInt;
use crate::verify::{run_suite, Fault, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Significant digits kept in JSON reports.
pub const SIGNIFICANT_DIGITS: usize = 15;

pub const TOOL_VERSION: &str = concat!("spindir ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Parser)]
#[command(
    name = "spindir",
    version,
    about = "Optimal direction encoding in N spin-1/2 particles"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Jacobi,
    Povm,
    Orthogonality,
    Multiplicity,
    Asymptotics,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Jacobi => Suite::Jacobi,
            SuiteArg::Povm => Suite::Povm,
            SuiteArg::Orthogonality => Suite::Orthogonality,
            SuiteArg::Multiplicity => Suite::Multiplicity,
            SuiteArg::Asymptotics => Suite::Asymptotics,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PovmName {
    Tetrahedron,
    Octahedron,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Maximal fidelities F_N for N = 1..=n-max.
    Table {
        #[arg(long, default_value_t = 7)]
        n_max: u32,
        #[arg(long, value_enum, default_value_t = TableFormat::Json)]
        format: TableFormat,
    },
    /// Best fidelity, optimal state and fidelity matrix for given projections.
    Fidelity {
        #[arg(long)]
        spins: u32,
        /// Projection of the signal states: a twice-value such as `3` or a fraction `3/2`.
        #[arg(long)]
        ma: Option<HalfInt>,
        /// Projection of the reference state, same syntax as `--ma`.
        #[arg(long)]
        mb: Option<HalfInt>,
    },
    /// Runs a property suite; exits 1 if any property fails.
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long, hide = true)]
        inject_fault: Option<String>,
    },
    /// Monte Carlo estimate of the fidelity with a finite POVM.
    Simulate {
        #[arg(long)]
        spins: u32,
        #[arg(long, value_enum)]
        povm: PovmName,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Reference projection; defaults to the minimal one.
        #[arg(long)]
        mb: Option<HalfInt>,
    },
    /// Effective components and fidelity of a product state such as `uudd`.
    Decompose { pattern: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEnvelope {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub results: Value,
    pub tool_version: String,
}

impl ReportEnvelope {
    fn new(command: &str, parameters: BTreeMap<String, Value>, results: Value) -> Self {
        ReportEnvelope {
            command: command.into(),
            parameters,
            results: round_value(results),
            tool_version: TOOL_VERSION.into(),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

/// Rounds to `digits` significant digits.
pub fn round_significant(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .unwrap_or(x)
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_significant(n.as_f64().expect("f64 number"), SIGNIFICANT_DIGITS);
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => {
            Value::Object(o.into_iter().map(|(k, v)| (k, round_value(v))).collect())
        }
        other => other,
    }
}

/// Closed forms of the first four optimal fidelities.
pub fn exact_form(n_spins: u32) -> Option<&'static str> {
    match n_spins {
        1 => Some("2/3"),
        2 => Some("(3+sqrt(3))/6"),
        3 => Some("(6+sqrt(6))/10"),
        4 => Some("(5+sqrt(15))/10"),
        _ => None,
    }
}

pub fn round_decimals(x: f64, decimals: i32) -> f64 {
    let s = 10f64.powi(decimals);
    (x * s).round() / s
}

/// Failure raised while running a command.
#[derive(Debug)]
enum CommandError {
    Usage(String),
    Failure(String),
}

impl From<Error> for CommandError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Unsupported(_) | Error::Parse(_) => {
                CommandError::Usage(e.to_string())
            }
            Error::Numeric(_) | Error::Precondition(_) => CommandError::Failure(e.to_string()),
        }
    }
}

enum Output {
    Report(ReportEnvelope, i32),
    Text(String),
}

/// Parses `args` (including the program name) and runs the command, writing the
/// report to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(cli.command) {
        Ok(Output::Report(env, code)) => {
            let _ = writeln!(out, "{}", env.to_json_string());
            code
        }
        Ok(Output::Text(text)) => {
            let _ = write!(out, "{text}");
            EXIT_OK
        }
        Err(CommandError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(CommandError::Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_PROPERTY_FAILURE
        }
    }
}

fn params(pairs: &[(&str, Value)]) -> BTreeMap<String, Value> {
    pairs
        .iter()
        .map(|(k, v)| ((*k).to_string(), v.clone()))
        .collect()
}

fn execute(command: Command) -> Result<Output, CommandError> {
    match command {
        Command::Table { n_max, format } => cmd_table(n_max, format),
        Command::Fidelity { spins, ma, mb } => cmd_fidelity(spins, ma, mb),
        Command::Verify {
            suite,
            inject_fault,
        } => cmd_verify(suite.into(), inject_fault.as_deref()),
        Command::Simulate {
            spins,
            povm,
            trials,
            seed,
            mb,
        } => cmd_simulate(spins, povm, trials, seed, mb),
        Command::Decompose { pattern } => cmd_decompose(&pattern),
    }
}

/// One row of the fidelity table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub n: u32,
    pub fidelity: f64,
    pub exact: Option<String>,
    pub rounded_4: f64,
    pub effective_dimension: u64,
    pub parallel_fidelity: f64,
}

pub fn table_rows(n_max: u32) -> crate::Result<Vec<TableRow>> {
    (1..=n_max)
        .map(|n| {
            let r = optimal_fidelity(n)?;
            let fidelity = round_significant(r.fidelity, SIGNIFICANT_DIGITS);
            Ok(TableRow {
                n,
                fidelity,
                exact: exact_form(n).map(str::to_string),
                rounded_4: round_decimals(r.fidelity, 4),
                effective_dimension: r.effective_dimension,
                parallel_fidelity: round_significant(
                    f64::from(n + 1) / f64::from(n + 2),
                    SIGNIFICANT_DIGITS,
                ),
            })
        })
        .collect()
}

/// Shortest decimal form of the already-rounded value, so CSV and JSON carry the
/// same numbers.
fn csv_number(x: f64) -> String {
    format!("{x}")
}

fn cmd_table(n_max: u32, format: TableFormat) -> Result<Output, CommandError> {
    if !(1..=MAX_DEGREE).contains(&n_max) {
        return Err(CommandError::Usage(format!(
            "--n-max must be in 1..={MAX_DEGREE}, got {n_max}"
        )));
    }
    let start = Instant::now();
    let rows = table_rows(n_max)?;
    info!("table with {n_max} rows in {:?}", start.elapsed());
    match format {
        TableFormat::Json => Ok(Output::Report(
            ReportEnvelope::new(
                "table",
                params(&[("n_max", json!(n_max)), ("format", json!("json"))]),
                json!({ "rows": rows }),
            ),
            EXIT_OK,
        )),
        TableFormat::Csv => {
            let mut s =
                String::from("n,fidelity,exact,rounded_4,effective_dimension,parallel_fidelity\n");
            for r in rows {
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.n,
                    csv_number(r.fidelity),
                    r.exact.unwrap_or_default(),
                    csv_number(r.rounded_4),
                    r.effective_dimension,
                    csv_number(r.parallel_fidelity)
                ));
            }
            Ok(Output::Text(s))
        }
    }
}

fn check_spins(n: u32) -> Result<HalfInt, CommandError> {
    if n == 0 || n > 2 * (MAX_DEGREE - 1) {
        return Err(CommandError::Usage(format!(
            "--spins must be in 1..={}, got {n}",
            2 * (MAX_DEGREE - 1)
        )));
    }
    Ok(HalfInt::from_twice(n as i32))
}

fn cmd_fidelity(
    spins: u32,
    ma: Option<HalfInt>,
    mb: Option<HalfInt>,
) -> Result<Output, CommandError> {
    let j_max = check_spins(spins)?;
    let ma = ma.unwrap_or(minimal_projection(spins)).abs();
    let mb = mb.unwrap_or(minimal_projection(spins)).abs();
    let matrix = build_matrix(j_max, ma, mb)?;
    let result = best_fidelity(j_max, ma, mb)?;
    let params_j = matrix.jacobi_params();
    let zero = largest_zero(params_j)?;
    let state: Vec<Value> = result
        .optimal_state
        .amplitudes()
        .iter()
        .rev()
        .map(|(j, a)| json!({ "j": j.to_string(), "amplitude": a }))
        .collect();
    let results = json!({
        "fidelity": result.fidelity,
        "top_eigenvalue": result.top_eigenvalue,
        "effective_dimension": result.effective_dimension,
        "optimal_state": state,
        "matrix": matrix.dense(),
        "jacobi": { "l": params_j.n, "a": params_j.a, "b": params_j.b, "largest_zero": zero.largest_zero },
        "jacobi_fidelity": (1.0 + zero.largest_zero) / 2.0,
    });
    Ok(Output::Report(
        ReportEnvelope::new(
            "fidelity",
            params(&[
                ("spins", json!(spins)),
                ("ma", json!(ma.to_string())),
                ("mb", json!(mb.to_string())),
            ]),
            results,
        ),
        EXIT_OK,
    ))
}

fn cmd_verify(suite: Suite, fault: Option<&str>) -> Result<Output, CommandError> {
    let fault = fault.map(str::parse::<Fault>).transpose()?;
    let start = Instant::now();
    let report = run_suite(suite, fault);
    info!(
        "suite {suite} ran {} checks in {:?}",
        report.checks.len(),
        start.elapsed()
    );
    let passed = report.passed();
    let failures: Vec<&str> = report.failures().iter().map(|c| c.name.as_str()).collect();
    let results = json!({
        "suite": suite.name(),
        "passed": passed,
        "failures": failures,
        "checks": report.checks,
    });
    let mut p = vec![("suite", json!(suite.name()))];
    if let Some(f) = fault {
        p.push((
            "inject_fault",
            serde_json::to_value(f).expect("enum serializes"),
        ));
    }
    let code = if passed {
        EXIT_OK
    } else {
        EXIT_PROPERTY_FAILURE
    };
    Ok(Output::Report(
        ReportEnvelope::new("verify", params(&p), results),
        code,
    ))
}

fn simulation_povm(spins: u32, povm: PovmName, mb: HalfInt) -> Result<PovmSpec, CommandError> {
    match (povm, spins) {
        (PovmName::Tetrahedron, 2) => Ok(tetrahedron_with_reference(mb)?),
        (PovmName::Octahedron, 3) => Ok(octahedron_povm(mb)?),
        (PovmName::Tetrahedron, n) => Err(CommandError::Usage(format!(
            "the tetrahedron POVM needs --spins 2, got {n}"
        ))),
        (PovmName::Octahedron, n) => Err(CommandError::Usage(format!(
            "the octahedron POVM needs --spins 3, got {n}"
        ))),
    }
}

fn cmd_simulate(
    spins: u32,
    povm: PovmName,
    trials: u64,
    seed: u64,
    mb: Option<HalfInt>,
) -> Result<Output, CommandError> {
    if trials == 0 {
        return Err(CommandError::Usage("--trials must be positive".into()));
    }
    let j_max = check_spins(spins)?;
    let mb = mb.unwrap_or(minimal_projection(spins)).abs();
    let spec = simulation_povm(spins, povm, mb)?;
    let best = best_fidelity(j_max, mb, mb)?;
    let workers = worker_count();
    let start = Instant::now();
    let report = if workers == 1 {
        simulate(&best.optimal_state, &spec, trials, seed)?
    } else {
        simulate_parallel(&best.optimal_state, &spec, trials, seed, workers)?.0
    }
    .with_target(best.fidelity);
    info!(
        "{trials} trials on {workers} worker(s) in {:?}",
        start.elapsed()
    );
    let mut results = report.to_json();
    results["workers"] = json!(report.workers);
    results["completeness_residual"] = json!(verify_completeness(&spec));
    results["povm"] = spec.to_json();
    let name = match povm {
        PovmName::Tetrahedron => "tetrahedron",
        PovmName::Octahedron => "octahedron",
    };
    Ok(Output::Report(
        ReportEnvelope::new(
            "simulate",
            params(&[
                ("spins", json!(spins)),
                ("povm", json!(name)),
                ("trials", json!(trials)),
                ("seed", json!(seed)),
                ("mb", json!(mb.to_string())),
            ]),
            results,
        ),
        EXIT_OK,
    ))
}

fn cmd_decompose(pattern: &str) -> Result<Output, CommandError> {
    let spins = parse_pattern(pattern)?;
    let state = decompose_product(&spins)?;
    let eff = effective_components(&state);
    let n = spins.len() as u32;
    // the best reference projection for this state
    let mut best: Option<(HalfInt, f64)> = None;
    for mb in HalfInt::range_inclusive(minimal_projection(n), eff.j_max()) {
        let f = general_fidelity(&eff, mb)?;
        if best.is_none_or(|(_, g)| f > g) {
            best = Some((mb, f));
        }
    }
    let (mb, fidelity) = best.expect("at least one admissible m_B");
    let optimal = optimal_fidelity(n)?.fidelity;
    let blocks: Vec<Value> = state
        .spins()
        .rev()
        .map(|j| json!({ "j": j.to_string(), "amplitudes": state.block(j) }))
        .collect();
    let effective: Vec<Value> = eff
        .amplitudes()
        .iter()
        .rev()
        .map(|(j, a)| json!({ "j": j.to_string(), "value": a }))
        .collect();
    let results = json!({
        "n_spins": n,
        "ma": state.m_a().to_string(),
        "blocks": blocks,
        "effective_components": effective,
        "mb": mb.to_string(),
        "fidelity": fidelity,
        "optimal_fidelity": optimal,
        "gap": optimal - fidelity,
    });
    Ok(Output::Report(
        ReportEnvelope::new("decompose", params(&[("pattern", json!(pattern))]), results),
        EXIT_OK,
    ))
}
