//! Argument handling, table emitters and subcommand drivers for `icbox`.
//!
//! Exit codes: 0 success, 1 usage, 2 numeric or resource failure,
//! 3 verification failure.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use icbox_core::infotheory::{threshold_e, violation_witness};
use icbox_core::montecarlo::{compare, estimate};
use icbox_core::verify::{self, VerifyConfig};
use icbox_core::{BoxSource, Correlators, Error, SweepRecord, TrialPlan, TSIRELSON_E};

pub const DEFAULT_SEED: u64 = 0x5eed_1cb0;

/// Largest `n` accepted by `sweep` and `threshold`.
pub const MAX_SWEEP_LEVELS: usize = 64;

#[derive(Debug, Parser)]
#[command(
    name = "icbox",
    version,
    about = "No-signaling box pyramids, information causality sweeps and checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact I lower bound and chain bound over a grid of (E, n).
    Sweep(SweepArgs),
    /// Isotropic E*(n) at which the depth-n pyramid reaches I = 1.
    Threshold(ThresholdArgs),
    /// Monte Carlo estimate of P_K and I, checked against the analytic values.
    Simulate(SimulateArgs),
    /// Quantum property sweeps and exact cross-checks.
    Verify(VerifyArgs),
    /// CHSH value and guess probabilities of one box.
    Chsh(ChshArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BoxArgs {
    /// Isotropic correlation strength.
    #[arg(long, conflicts_with_all = ["ei", "eii"])]
    pub e: Option<f64>,
    #[arg(long, requires = "eii")]
    pub ei: Option<f64>,
    #[arg(long, requires = "ei")]
    pub eii: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub point: BoxArgs,
    #[arg(long, conflicts_with_all = ["e", "ei", "eii"])]
    pub e_min: Option<f64>,
    #[arg(long, conflicts_with_all = ["e", "ei", "eii"])]
    pub e_max: Option<f64>,
    #[arg(long, conflicts_with_all = ["e", "ei", "eii"])]
    pub e_step: Option<f64>,
    /// Pyramid depth, or the first depth when `--n-max` is given.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ThresholdArgs {
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoxKind {
    Singlet,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub point: BoxArgs,
    /// Use a named box instead of `--e` / `--ei --eii`.
    #[arg(long = "box", value_enum, conflicts_with_all = ["e", "ei", "eii"])]
    pub box_kind: Option<BoxKind>,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Trials per index.
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, env = "ICBOX_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Restrict to these indices (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub index: Option<Vec<usize>>,
    /// Compare against isotropic E instead of the simulated box.
    #[arg(long, conflicts_with_all = ["reference_ei", "reference_eii"])]
    pub reference_e: Option<f64>,
    #[arg(long, requires = "reference_eii")]
    pub reference_ei: Option<f64>,
    #[arg(long, requires = "reference_ei")]
    pub reference_eii: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, env = "ICBOX_SEED", default_value_t = VerifyConfig::default().seed)]
    pub seed: u64,
    #[arg(long, default_value_t = VerifyConfig::default().states)]
    pub states: usize,
    #[arg(long, default_value_t = VerifyConfig::default().channels)]
    pub channels: usize,
    #[arg(long, default_value_t = VerifyConfig::default().gap_step)]
    pub gap_step: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ChshArgs {
    #[command(flatten)]
    pub point: BoxArgs,
    #[arg(long = "box", value_enum, conflicts_with_all = ["e", "ei", "eii", "c"])]
    pub box_kind: Option<BoxKind>,
    /// Four correlators c00,c01,c10,c11.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with_all = ["e", "ei", "eii"])]
    pub c: Option<Vec<f64>>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numeric(String),
    Verification(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Numeric(_) => 2,
            Failure::Verification(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numeric(m) | Failure::Verification(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::OutOfRange { .. }
            | Error::InvalidArgument(_)
            | Error::InvalidPlan(_)
            | Error::IndexOutOfRange { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Numeric(format!("i/o: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Numeric(format!("csv: {e}"))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Numeric(format!("json: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn unit(name: &str, v: f64) -> CliResult<f64> {
    if v.is_finite() && (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(usage(format!("{name} = {v} must lie in [0, 1]")))
    }
}

fn level_range(n: usize, n_max: Option<usize>, cap: usize) -> CliResult<Vec<usize>> {
    let hi = n_max.unwrap_or(n);
    if n == 0 || hi < n {
        return Err(usage(format!("empty depth range {n}..={hi}")));
    }
    if hi > cap {
        return Err(usage(format!("depth {hi} exceeds the limit {cap}")));
    }
    Ok((n..=hi).collect())
}

/// Grid `e_min, e_min + step, …, ≤ e_max`, rounded to 12 decimals so that
/// printed values stay short.
pub fn e_grid(e_min: f64, e_max: f64, step: f64) -> CliResult<Vec<f64>> {
    let e_min = unit("--e-min", e_min)?;
    let e_max = unit("--e-max", e_max)?;
    if !(step.is_finite() && step > 0.0) {
        return Err(usage(format!("--e-step = {step} must be positive")));
    }
    if e_max < e_min {
        return Err(usage(format!("empty range [{e_min}, {e_max}]")));
    }
    let count = ((e_max - e_min) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(usage(format!("grid of {count} points is too large")));
    }
    Ok((0..count)
        .map(|i| ((e_min + i as f64 * step) * 1e12).round() / 1e12)
        .map(|e| e.min(e_max))
        .collect())
}

impl BoxArgs {
    fn pair(&self) -> CliResult<Option<(f64, f64)>> {
        match (self.e, self.ei, self.eii) {
            (Some(e), _, _) => {
                let e = unit("--e", e)?;
                Ok(Some((e, e)))
            }
            (None, Some(a), Some(b)) => Ok(Some((unit("--ei", a)?, unit("--eii", b)?))),
            _ => Ok(None),
        }
    }
}

fn sweep_points(args: &SweepArgs) -> CliResult<Vec<(f64, f64)>> {
    if let Some(p) = args.point.pair()? {
        return Ok(vec![p]);
    }
    match (args.e_min, args.e_max, args.e_step) {
        (Some(lo), Some(hi), Some(step)) => Ok(e_grid(lo, hi, step)?.into_iter().map(|e| (e, e)).collect()),
        (None, None, None) => Err(usage("give --e, --ei/--eii or --e-min/--e-max/--e-step")),
        _ => Err(usage("--e-min, --e-max and --e-step go together")),
    }
}

/// Evaluates every `(E point, n)` pair in parallel; rows come back sorted by
/// `(n, E_I, E_II)`.
pub fn sweep_records(points: &[(f64, f64)], levels: &[usize]) -> Vec<SweepRecord> {
    let mut records: Vec<SweepRecord> = levels
        .par_iter()
        .flat_map_iter(|&n| points.iter().map(move |&(a, b)| SweepRecord::evaluate(a, b, n, 1)))
        .collect();
    records.sort_by(|x, y| {
        x.n.cmp(&y.n)
            .then(x.e_i.total_cmp(&y.e_i))
            .then(x.e_ii.total_cmp(&y.e_ii))
    });
    records
}

pub fn write_csv<T: Serialize, W: Write>(rows: &[T], w: W) -> CliResult<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_csv<T: for<'de> Deserialize<'de>, R: Read>(r: R) -> CliResult<Vec<T>> {
    csv::Reader::from_reader(r)
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(Failure::from)
}

#[derive(Debug, Serialize)]
pub struct Document<'a, C: Serialize, R: Serialize, S: Serialize> {
    pub config: C,
    pub records: &'a [R],
    pub summary: S,
}

fn sink(out: &Option<PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit<C: Serialize, R: Serialize, S: Serialize>(
    output: &OutputArgs,
    config: C,
    records: &[R],
    summary: S,
) -> CliResult<()> {
    let mut w = sink(&output.out)?;
    match output.format {
        Format::Csv => write_csv(records, &mut w)?,
        Format::Json => {
            serde_json::to_writer_pretty(
                &mut w,
                &Document {
                    config,
                    records,
                    summary,
                },
            )?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct SweepSummary {
    records: usize,
    violating: usize,
    /// Smallest violating depth for each point, if any.
    first_violation: Vec<FirstViolation>,
}

#[derive(Debug, Serialize)]
struct FirstViolation {
    e_i: f64,
    e_ii: f64,
    n: Option<usize>,
    /// Depth predicted from `E_I² + E_II² > 1`, independent of the grid.
    n_star: Option<usize>,
}

pub fn cmd_sweep(args: &SweepArgs) -> CliResult<()> {
    let points = sweep_points(args)?;
    let levels = level_range(args.n, args.n_max, MAX_SWEEP_LEVELS)?;
    let records = sweep_records(&points, &levels);
    let first_violation = points
        .iter()
        .map(|&(e_i, e_ii)| {
            Ok(FirstViolation {
                e_i,
                e_ii,
                n: records
                    .iter()
                    .find(|r| r.e_i == e_i && r.e_ii == e_ii && r.violates)
                    .map(|r| r.n),
                n_star: violation_witness(e_i, e_ii)?.n_star,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let summary = SweepSummary {
        records: records.len(),
        violating: records.iter().filter(|r| r.violates).count(),
        first_violation,
    };
    #[derive(Serialize)]
    struct Config<'a> {
        points: &'a [(f64, f64)],
        levels: &'a [usize],
        m: usize,
    }
    emit(
        &args.output,
        Config {
            points: &points,
            levels: &levels,
            m: 1,
        },
        &records,
        summary,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub n: usize,
    pub e_star: f64,
}

pub fn cmd_threshold(args: &ThresholdArgs) -> CliResult<()> {
    let levels = level_range(args.n, args.n_max, MAX_SWEEP_LEVELS)?;
    if !(args.tol > 0.0 && args.tol < 0.5) {
        return Err(usage(format!("--tol = {} must lie in (0, 0.5)", args.tol)));
    }
    let rows = levels
        .par_iter()
        .map(|&n| {
            threshold_e(n, args.tol)
                .map(|e_star| ThresholdRow { n, e_star })
                .map_err(|e| Failure::Numeric(e.to_string()))
        })
        .collect::<CliResult<Vec<_>>>()?;
    #[derive(Serialize)]
    struct Config<'a> {
        levels: &'a [usize],
        tol: f64,
    }
    #[derive(Serialize)]
    struct Summary {
        tsirelson_e: f64,
        strictly_decreasing: bool,
    }
    let strictly_decreasing = rows.windows(2).all(|w| w[1].e_star < w[0].e_star);
    emit(
        &args.output,
        Config {
            levels: &levels,
            tol: args.tol,
        },
        &rows,
        Summary {
            tsirelson_e: TSIRELSON_E,
            strictly_decreasing,
        },
    )?;
    eprintln!("reference 1/sqrt(2) = {TSIRELSON_E}");
    Ok(())
}

/// Flat per-index row for CSV output of `simulate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateRow {
    pub index: usize,
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub analytic: f64,
    pub z: f64,
}

fn box_source(point: &BoxArgs, kind: Option<BoxKind>) -> CliResult<BoxSource> {
    if let Some(BoxKind::Singlet) = kind {
        return Ok(BoxSource::Singlet);
    }
    match point.pair()? {
        Some((a, b)) => Ok(Correlators::from_effective(a, b)?.into()),
        None => Err(usage("give --e, --ei/--eii or --box")),
    }
}

pub fn cmd_simulate(args: &SimulateArgs) -> CliResult<()> {
    let source = box_source(&args.point, args.box_kind)?;
    let mut plan = TrialPlan::new(source, args.n, args.trials, args.seed);
    if let Some(ix) = &args.index {
        plan = plan.with_indices(ix.clone());
    }
    let mut report = estimate(&plan)?;
    match (args.reference_e, args.reference_ei, args.reference_eii) {
        (Some(e), _, _) => {
            let e = unit("--reference-e", e)?;
            report = report.rereference(e, e);
        }
        (None, Some(a), Some(b)) => {
            report = report.rereference(unit("--reference-ei", a)?, unit("--reference-eii", b)?);
        }
        _ => {}
    }
    let verdict = compare(&report);
    let rows: Vec<SimulateRow> = report
        .per_index
        .iter()
        .map(|e| SimulateRow {
            index: e.index,
            trials: e.trials,
            successes: e.successes,
            p_hat: e.p_hat,
            wilson_low: e.wilson_low,
            wilson_high: e.wilson_high,
            analytic: e.analytic,
            z: e.z,
        })
        .collect();
    #[derive(Serialize)]
    struct Summary<'a> {
        empirical_i: f64,
        exact_i: f64,
        reference: (f64, f64),
        verdict: &'a icbox_core::Verdict,
    }
    let summary = Summary {
        empirical_i: report.empirical_i,
        exact_i: report.exact_i,
        reference: report.reference,
        verdict: &verdict,
    };
    match args.output.format {
        Format::Json => emit(&args.output, &report.plan, &report.per_index, summary)?,
        Format::Csv => emit(&args.output, (), &rows, ())?,
    }
    eprintln!(
        "empirical I = {:.6}, exact I = {:.6}, max |z| = {:.3}: {}",
        report.empirical_i,
        report.exact_i,
        verdict.max_abs_z,
        if verdict.pass { "PASS" } else { "FAIL" }
    );
    if verdict.pass {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "compare failed: {}",
            verdict.failures.join("; ")
        )))
    }
}

pub fn cmd_verify(args: &VerifyArgs) -> CliResult<()> {
    if args.states == 0 || args.channels == 0 {
        return Err(usage("--states and --channels must be positive"));
    }
    if !(args.gap_step > 0.0 && args.gap_step <= 1.0) {
        return Err(usage(format!("--gap-step = {} must lie in (0, 1]", args.gap_step)));
    }
    let cfg = VerifyConfig {
        seed: args.seed,
        states: args.states,
        channels: args.channels,
        gap_step: args.gap_step,
    };
    let suites = verify::run_all(&cfg)?;
    for s in &suites {
        eprintln!("{} {:<22} {}", if s.passed { "PASS" } else { "FAIL" }, s.name, s.detail);
    }
    #[derive(Serialize)]
    struct Row<'a> {
        suite: &'a str,
        passed: bool,
        cases: usize,
        worst: f64,
        detail: &'a str,
    }
    let rows: Vec<Row> = suites
        .iter()
        .map(|s| Row {
            suite: s.name,
            passed: s.passed,
            cases: s.cases,
            worst: s.worst,
            detail: &s.detail,
        })
        .collect();
    let failed: Vec<&str> = suites.iter().filter(|s| !s.passed).map(|s| s.name).collect();
    #[derive(Serialize)]
    struct Summary<'a> {
        all_passed: bool,
        failed: &'a [&'a str],
    }
    emit(
        &args.output,
        cfg,
        &rows,
        Summary {
            all_passed: failed.is_empty(),
            failed: &failed,
        },
    )?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(format!("failed suites: {}", failed.join(", "))))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshRow {
    pub c00: f64,
    pub c01: f64,
    pub c10: f64,
    pub c11: f64,
    pub p_i: f64,
    pub p_ii: f64,
    pub s: f64,
}

pub fn chsh_row(c: &Correlators) -> ChshRow {
    let [c00, c01, c10, c11] = c.as_array();
    let (p_i, p_ii) = c.guess_probabilities();
    ChshRow {
        c00,
        c01,
        c10,
        c11,
        p_i,
        p_ii,
        s: c.chsh_value(),
    }
}

pub fn cmd_chsh(args: &ChshArgs) -> CliResult<()> {
    let c = match (&args.c, args.box_kind) {
        (Some(v), _) => match v[..] {
            [c00, c01, c10, c11] => Correlators::new(c00, c01, c10, c11)?,
            _ => return Err(usage(format!("--c takes four values, got {}", v.len()))),
        },
        (None, kind) => box_source(&args.point, kind)?.correlators(),
    };
    let row = chsh_row(&c);
    #[derive(Serialize)]
    struct Summary {
        classical_limit: f64,
        quantum_limit: f64,
        algebraic_limit: f64,
    }
    emit(
        &args.output,
        (),
        &[row],
        Summary {
            classical_limit: 3.0,
            quantum_limit: 2.0 + 2f64.sqrt(),
            algebraic_limit: 4.0,
        },
    )
}

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Sweep(a) => cmd_sweep(a),
        Command::Threshold(a) => cmd_threshold(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Chsh(a) => cmd_chsh(a),
    }
}
