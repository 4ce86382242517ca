//! `transfinite`: build rank sets and zero schedules, evaluate the resulting
//! products, probe their dilation families and run the acceptance suite.
//! Every command that writes a file also writes `<file>.manifest.json`.

mod grid;
mod manifest;

use std::fs;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rug::{Float, Integer, Rational};
use serde::Serialize;
use transfinite::acceptance::{parse_suite, run_suite};
use transfinite::evaluator::{family_eval, EvalResult, PRECISION_ENV};
use transfinite::exact::parse_rational;
use transfinite::ordinal::Ordinal;
use transfinite::par::{self, Strategy};
use transfinite::pointset::{build_rank_set, Arc, Card, RankTree};
use transfinite::probe::{condition_m_sweep, order_report, DilationRule, ProbePoint, ProbeReport, Status, SweepRow};
use transfinite::schedule::{build_finite_schedule, build_limit_schedule, build_sector_schedule, ZeroSchedule};

use grid::Grid;
use manifest::{FileDigest, RunManifest};

const EXIT_USAGE: u8 = 2;
const EXIT_INVARIANT: u8 = 3;
const EXIT_INCONCLUSIVE: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "transfinite",
    version,
    about = "Rank-prescribed point sets, zero schedules and dilation probes"
)]
struct Cli {
    /// Working precision in bits.
    #[arg(long, global = true, env = PRECISION_ENV, default_value_t = 200, value_parser = clap::value_parser!(u32).range(64..=1_000_000))]
    precision: u32,

    /// How sweeps and grid evaluations are scheduled.
    #[arg(long, global = true, value_enum, default_value_t = StrategyArg::Parallel)]
    strategy: StrategyArg,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum StrategyArg {
    Parallel,
    Sequential,
}

impl StrategyArg {
    fn strategy(self) -> Strategy {
        match self {
            StrategyArg::Parallel => Strategy::Parallel,
            StrategyArg::Sequential => Strategy::Sequential,
        }
    }

    fn name(self) -> &'static str {
        match self {
            StrategyArg::Parallel => "parallel",
            StrategyArg::Sequential => "sequential",
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build E(alpha, nu) on an arc and print its rank-tree JSON.
    BuildSet(BuildSetArgs),
    /// Take the beta-th derived set of a rank tree.
    Derive(DeriveArgs),
    /// Build a zero schedule: rows for finite nu, sectors for `--nu inf` or a
    /// limit alpha.
    BuildZeros(BuildZerosArgs),
    /// Evaluate log f(jz) over a grid and write CSV.
    Eval(EvalArgs),
    /// Classify a dilation rule, certify clustering and report the claimed
    /// non-C0 set. Exits with 4 when the report is inconclusive.
    Probe(ProbeArgs),
    /// Run the acceptance suite and print a pass/fail table.
    Verify(VerifyArgs),
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).ok_or_else(|| format!("not a rational number: {s:?}"))
}

fn k_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let (a, b) = s
        .split_once("..=")
        .or_else(|| s.split_once(".."))
        .ok_or_else(|| format!("expected a range like 6..10, got {s:?}"))?;
    let a: usize = a.trim().parse().map_err(|_| format!("bad range start in {s:?}"))?;
    let b: usize = b.trim().parse().map_err(|_| format!("bad range end in {s:?}"))?;
    if a == 0 || b < a {
        return Err(format!("range {s:?} must satisfy 1 <= start <= end"));
    }
    Ok(a..=b)
}

#[derive(Args, Debug)]
struct OutputArg {
    /// Output file; stdout when absent (no manifest is written then).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BuildSetArgs {
    #[arg(long)]
    alpha: Ordinal,
    #[arg(long, default_value_t = 1)]
    nu: u64,
    /// Arc centre in turns.
    #[arg(long, default_value = "1/8", value_parser = rational)]
    center: Rational,
    /// Arc half-width in turns, below 1/4.
    #[arg(long, default_value = "1/32", value_parser = rational)]
    half_width: Rational,
    #[command(flatten)]
    out: OutputArg,
}

#[derive(Args, Debug)]
struct DeriveArgs {
    /// Rank-tree JSON; `-` for stdin.
    #[arg(short, long, default_value = "-")]
    input: PathBuf,
    #[arg(long)]
    beta: Ordinal,
    /// Expansion depth for the listed points.
    #[arg(long, default_value_t = 2)]
    depth: usize,
    /// Children expanded per level for the listed points.
    #[arg(long, default_value_t = 3)]
    per_level: usize,
    #[command(flatten)]
    out: OutputArg,
}

#[derive(Args, Debug)]
struct BuildZerosArgs {
    #[arg(long)]
    alpha: Ordinal,
    /// Apex multiplicity, or `inf` for one sector per multiplicity.
    #[arg(long, default_value = "1")]
    nu: String,
    /// Rings for finite nu, blocks for the sector layouts.
    #[arg(long)]
    nmax: usize,
    #[command(flatten)]
    out: OutputArg,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Zero-schedule JSON.
    #[arg(short, long)]
    zeros: PathBuf,
    /// Dilation factor.
    #[arg(long, default_value = "1")]
    j: Integer,
    /// `ring:a3`, `annulus:n=3,samples=64` or `circle:r=1/2,samples=36`.
    #[arg(long)]
    grid: Grid,
    /// Rings in the truncated product; all stored rings when absent.
    #[arg(long)]
    rows: Option<usize>,
    #[command(flatten)]
    out: OutputArg,
}

#[derive(Args, Debug)]
struct ProbeArgs {
    /// Zero-schedule JSON.
    #[arg(short, long)]
    zeros: PathBuf,
    /// `ratio-plus:r=1/2`, `geometric-mean:l=1,r=1/2`, `sector:r=1/2,t=2`
    /// or `explicit:r=1,j=3;8;21`.
    #[arg(long)]
    rule: DilationRule,
    /// Indices k of the probed sequence.
    #[arg(long, value_parser = k_range)]
    k: RangeInclusive<usize>,
    /// Number of source points to certify.
    #[arg(long, default_value_t = 3)]
    depth: usize,
    /// Certificates must end below r * delta.
    #[arg(long, default_value = "1/1000", value_parser = rational)]
    delta: Rational,
    /// Also sweep the spherical derivative around each certified point.
    #[arg(long)]
    sweep: bool,
    #[command(flatten)]
    out: OutputArg,
}

#[derive(Clone, Debug)]
struct Suite(Vec<u8>);

fn suite(s: &str) -> Result<Suite, String> {
    parse_suite(s).map(Suite)
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// `all` or a comma-separated list of criterion ids.
    #[arg(long, default_value = "all", value_parser = suite)]
    suite: Suite,
    /// Directory for `verify-report.json` and its manifest.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

enum Failure {
    Usage(String),
    Invariant(anyhow::Error),
    Inconclusive,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Invariant(e)
    }
}

fn usage(flag: &str, msg: impl std::fmt::Display) -> Failure {
    Failure::Usage(format!("{flag}: {msg}"))
}

pub(crate) fn fmt_float(x: &Float) -> String {
    if x.is_infinite() {
        return if x.is_sign_negative() { "-inf" } else { "inf" }.into();
    }
    if x.is_zero() {
        return "0".into();
    }
    x.to_string_radix(10, Some(17))
}

struct Ctx {
    manifest: RunManifest,
    precision: u32,
    strategy: Strategy,
}

impl Ctx {
    fn read(&mut self, flag: &str, path: &Path) -> Result<String, Failure> {
        let text = if path == Path::new("-") {
            std::io::read_to_string(std::io::stdin()).map_err(|e| usage(flag, e))?
        } else {
            let t = fs::read_to_string(path).map_err(|e| usage(flag, format!("{}: {e}", path.display())))?;
            self.manifest.inputs.push(FileDigest::of(path)?);
            t
        };
        Ok(text)
    }

    fn read_schedule(&mut self, flag: &str, path: &Path) -> Result<ZeroSchedule, Failure> {
        let text = self.read(flag, path)?;
        serde_json::from_str(&text).map_err(|e| usage(flag, format!("invalid zero schedule: {e}")))
    }

    fn emit(&mut self, out: &OutputArg, bytes: &[u8]) -> Result<(), Failure> {
        match &out.output {
            Some(path) => {
                fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?;
                self.manifest.outputs.push(FileDigest::of(path)?);
            }
            None => std::io::stdout().write_all(bytes).context("writing stdout")?,
        }
        Ok(())
    }

    fn emit_json<T: Serialize>(&mut self, out: &OutputArg, value: &T) -> Result<(), Failure> {
        let mut text = serde_json::to_string_pretty(value).context("serializing output")?;
        text.push('\n');
        self.emit(out, text.as_bytes())
    }
}

#[derive(Serialize)]
struct DeriveOutput {
    beta: Ordinal,
    cardinality: Card,
    points: Vec<String>,
    set: RankTree,
}

fn build_set(ctx: &mut Ctx, a: &BuildSetArgs) -> Result<(), Failure> {
    let host = Arc::new(a.center.clone(), a.half_width.clone()).map_err(|e| usage("--half-width", e))?;
    let e = build_rank_set(&a.alpha, a.nu, &host).map_err(|e| usage("--nu", e))?;
    ctx.emit_json(&a.out, &e)
}

fn derive(ctx: &mut Ctx, a: &DeriveArgs) -> Result<(), Failure> {
    let text = ctx.read("--input", &a.input)?;
    let e: RankTree = serde_json::from_str(&text).map_err(|e| usage("--input", format!("invalid rank tree: {e}")))?;
    let d = e.derive(&a.beta);
    let points = d
        .materialize(a.depth, a.per_level)
        .iter()
        .map(|q| q.to_string())
        .collect();
    let out = DeriveOutput {
        beta: a.beta.clone(),
        cardinality: d.cardinality(),
        points,
        set: d,
    };
    ctx.emit_json(&a.out, &out)
}

fn build_zeros(ctx: &mut Ctx, a: &BuildZerosArgs) -> Result<(), Failure> {
    if a.nmax == 0 {
        return Err(usage("--nmax", "must be at least 1"));
    }
    let schedule = if a.alpha.is_limit() {
        if a.nu != "1" && a.nu != "inf" {
            return Err(usage("--nu", "a limit alpha takes one point per sector"));
        }
        build_limit_schedule(&a.alpha, a.nmax).map_err(|e| usage("--alpha", e))?
    } else if a.nu == "inf" {
        build_sector_schedule(&a.alpha, a.nmax).map_err(|e| usage("--alpha", e))?
    } else {
        let nu: u64 =
            a.nu.parse()
                .map_err(|_| usage("--nu", format!("expected a count or `inf`, got {:?}", a.nu)))?;
        let host = Arc::new(Rational::from((1, 8)), Rational::from((1, 32))).expect("default host arc");
        build_finite_schedule(&a.alpha, nu, &host, a.nmax).map_err(|e| usage("--nu", e))?
    };
    ctx.emit_json(&a.out, &schedule)
}

fn eval(ctx: &mut Ctx, a: &EvalArgs) -> Result<(), Failure> {
    let schedule = ctx.read_schedule("--zeros", &a.zeros)?;
    if a.j < 1 {
        return Err(usage("--j", "must be positive"));
    }
    let rows = a.rows.unwrap_or(schedule.rings().len());
    if rows > schedule.rings().len() {
        return Err(usage(
            "--rows",
            format!("schedule has {} rings", schedule.rings().len()),
        ));
    }
    let points = a.grid.points(schedule.radii(), ctx.precision);
    let results = par::map(ctx.strategy, &points, |p| family_eval(&schedule, &a.j, &p.z, rows));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["log_r", "turn", "log_mag", "phase", "tail_bound", "valid"])
        .context("csv")?;
    for (p, r) in points.iter().zip(results) {
        let r: EvalResult = r.map_err(|e| anyhow!("evaluation at turn {}: {e}", p.turn))?;
        w.write_record([
            p.log_r.clone(),
            p.turn.to_string(),
            fmt_float(&r.value.log_mag),
            fmt_float(&r.value.phase),
            fmt_float(&r.tail_bound),
            r.valid.to_string(),
        ])
        .context("csv")?;
    }
    let bytes = w.into_inner().map_err(|e| anyhow!("csv: {e}"))?;
    ctx.emit(&a.out, &bytes)
}

#[derive(Serialize)]
struct ProbeOutput {
    report: ProbeReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<Vec<SweepRow>>,
}

fn probe(ctx: &mut Ctx, a: &ProbeArgs) -> Result<(), Failure> {
    let schedule = ctx.read_schedule("--zeros", &a.zeros)?;
    let report = order_report(&schedule, &a.rule, a.depth, a.k.clone(), &a.delta).map_err(|e| usage("--rule", e))?;
    let sweep = if a.sweep {
        let points: Vec<ProbePoint> = report
            .certificates
            .iter()
            .map(|c| ProbePoint {
                turn: c.target.clone(),
                r: a.rule.r().clone(),
            })
            .collect();
        let js = |n: usize| a.rule.j(schedule.radii(), n);
        let rows = schedule.rings().len();
        let sweep = condition_m_sweep(&schedule, &points, &js, a.k.clone(), rows, ctx.precision, ctx.strategy)
            .map_err(|e| anyhow!("sweep: {e}"))?;
        Some(sweep)
    } else {
        None
    };
    let inconclusive = report.status == Status::Inconclusive;
    ctx.emit_json(&a.out, &ProbeOutput { report, sweep })?;
    if inconclusive {
        return Err(Failure::Inconclusive);
    }
    Ok(())
}

fn verify(ctx: &mut Ctx, a: &VerifyArgs) -> Result<(), Failure> {
    // the suite reads its precision from the environment
    std::env::set_var(PRECISION_ENV, ctx.precision.to_string());
    let report = run_suite(&a.suite.0, ctx.strategy);
    print!("{}", report.table());
    fs::create_dir_all(&a.out_dir).map_err(|e| usage("--out-dir", e))?;
    let out = OutputArg {
        output: Some(a.out_dir.join("verify-report.json")),
    };
    ctx.emit_json(&out, &report)?;
    if !report.all_pass() {
        return Err(Failure::Invariant(anyhow!(
            "{} acceptance criteria failed",
            report.failures()
        )));
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let name = match &cli.command {
        Command::BuildSet(_) => "build-set",
        Command::Derive(_) => "derive",
        Command::BuildZeros(_) => "build-zeros",
        Command::Eval(_) => "eval",
        Command::Probe(_) => "probe",
        Command::Verify(_) => "verify",
    };
    let arguments: Vec<String> = std::env::args().skip(1).collect();
    let mut ctx = Ctx {
        manifest: RunManifest::new(name, arguments, cli.precision, cli.strategy.name()),
        precision: cli.precision,
        strategy: cli.strategy.strategy(),
    };
    let result = match &cli.command {
        Command::BuildSet(a) => build_set(&mut ctx, a),
        Command::Derive(a) => derive(&mut ctx, a),
        Command::BuildZeros(a) => build_zeros(&mut ctx, a),
        Command::Eval(a) => eval(&mut ctx, a),
        Command::Probe(a) => probe(&mut ctx, a),
        Command::Verify(a) => verify(&mut ctx, a),
    };
    // outputs written before a failure still get their manifest
    ctx.manifest.write()?;
    result
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Invariant(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INVARIANT)
        }
        Err(Failure::Inconclusive) => {
            eprintln!("probe inconclusive");
            ExitCode::from(EXIT_INCONCLUSIVE)
        }
    }
}
