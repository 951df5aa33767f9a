//! Command-line front end of the `flowlab` binary.
//!
//! Results go to stdout as canonical JSON (or to `--out`). Exit codes: `0`
//! when every check passes, `1` when a check fails, `2` for bad input or a
//! field outside the admissible class. `FLOWLAB_THREADS` sets the size of
//! the worker pool.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::arcs::{census, Curve};
use crate::argument::{check_log_growth, oscillation, Ball, Target};
use crate::config::load_field;
use crate::expr::ParamEnv;
use crate::field::{Builtin, FieldError, VectorField};
use crate::geom::Point;
use crate::lemma_lab::constants::{constants, partition_params};
use crate::report::{read_trajectory_csv, to_canonical_json, write_trajectory_csv, Report};
use crate::suite::{self, Suite, SuiteConfig, SuiteError};
use crate::tracer::{trace, IntegratorConfig, TrajectoryKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "flowlab", version, about = "Numerical checks for planar steady Euler flows")]
pub struct Cli {
    /// Suppress progress and summary lines on stderr.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Field-file utilities.
    Field {
        #[command(subcommand)]
        action: FieldAction,
    },
    /// Integrate a streamline or gradient orbit and write it as CSV.
    Trace(TraceArgs),
    /// Oscillation of the velocity argument over a ball.
    Osc(OscArgs),
    /// Arc census of a curve read from a trajectory CSV.
    Arcs(ArcsArgs),
    /// Oscillation growth over balls of increasing radius.
    Growth(GrowthArgs),
    /// Run verification suites on a field.
    Verify(VerifyArgs),
    /// Constants and partition integers for a given `η`.
    Constants(ConstantsArgs),
    /// Run every built-in fixture end to end.
    Demo(DemoArgs),
}

#[derive(Debug, Subcommand)]
pub enum FieldAction {
    /// Divergence, Euler residual and speed bounds on the field's domain.
    Check {
        file: PathBuf,
        /// Grid points per side.
        #[arg(long, default_value_t = 41)]
        grid: usize,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Streamline,
    Gradient,
    StreamlineArclength,
    GradientArclength,
}

impl From<KindArg> for TrajectoryKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Streamline => TrajectoryKind::Streamline,
            KindArg::Gradient => TrajectoryKind::Gradient,
            KindArg::StreamlineArclength => TrajectoryKind::StreamlineArclength,
            KindArg::GradientArclength => TrajectoryKind::GradientArclength,
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct TraceArgs {
    /// Field file, or `builtin:<name>` for a parameter-free built-in.
    #[arg(long)]
    pub field: String,
    #[arg(long, value_enum, default_value = "gradient")]
    pub kind: KindArg,
    /// Start point `x1,x2`.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub from: Point,
    /// Time span `t0,t1` with `t0 <= 0 <= t1`.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true, default_value = "-20,20")]
    pub tspan: Point,
    #[arg(long)]
    pub max_step: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct OscArgs {
    #[arg(long)]
    pub field: String,
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true, default_value = "0,0")]
    pub center: Point,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Starting grid; refined until the oscillation settles.
    #[arg(long, default_value_t = 201)]
    pub grid: usize,
}

#[derive(Debug, clap::Args)]
pub struct ArcsArgs {
    /// Trajectory CSV as written by `flowlab trace`.
    #[arg(long)]
    pub curve: PathBuf,
    /// Parameter interval; defaults to the whole curve.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
}

#[derive(Debug, clap::Args)]
pub struct GrowthArgs {
    #[arg(long)]
    pub field: String,
    #[arg(long, value_delimiter = ',', default_value = "2,4,8,16")]
    pub radii: Vec<f64>,
    /// Speed bound `η`; certified on the largest ball when omitted.
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
}

#[derive(Debug, clap::Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub field: String,
    /// all, field, elliptic, patterns, foliation, constants, log-growth or shear.
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Upper bound for `η`; the certified value is used when smaller.
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub orbits: Option<usize>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct ConstantsArgs {
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    /// Endpoint gap for the partition integers.
    #[arg(long, default_value_t = 1.0)]
    pub d: f64,
}

#[derive(Debug, clap::Args)]
pub struct DemoArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_pair(s: &str) -> Result<Point, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected `a,b`, got `{s}`"));
    }
    let p = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    Ok([p(parts[0])?, p(parts[1])?])
}

/// Error with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(m: impl ToString) -> Self {
        CliError { code: EXIT_INPUT, message: m.to_string() }
    }
}

impl From<SuiteError> for CliError {
    fn from(e: SuiteError) -> Self {
        CliError::input(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::input(e)
    }
}

/// Loads a field file, or a built-in given as `builtin:<name>`.
pub fn resolve_field(spec: &str) -> Result<VectorField, CliError> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        let b = Builtin::from_name(name, &ParamEnv::new(), None).map_err(CliError::input)?;
        return b.build().map_err(CliError::input);
    }
    load_field(Path::new(spec)).map_err(CliError::input)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::input(format!("{}: {e}", p.display()))),
        None => {
            let mut so = io::stdout().lock();
            so.write_all(text.as_bytes())?;
            so.flush()?;
            Ok(())
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("FLOWLAB_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| CliError::input(format!("FLOWLAB_THREADS: expected a positive integer, got `{v}`")))?;
        // A second call in the same process finds the pool already built.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    Ok(())
}

fn report_exit(rep: &Report, out: Option<&Path>, quiet: bool) -> Result<i32, CliError> {
    emit(&to_canonical_json(rep), out)?;
    if !quiet {
        let s = &rep.summary;
        eprintln!("{}: {} checks, {} passed, {} failed, {} skipped", rep.command, s.total, s.passed, s.failed, s.skipped);
        for r in rep.records.iter().filter(|r| r.status == crate::report::Status::Fail) {
            eprintln!("  FAIL {} [{}]", r.name, r.anchor);
        }
    }
    Ok(if rep.has_failures() { EXIT_VIOLATION } else { EXIT_OK })
}

fn field_check(file: &Path, grid: usize) -> Result<Value, CliError> {
    let f = load_field(file).map_err(CliError::input)?;
    let dom = f.domain();
    let n = grid.max(2);
    let mut div = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            div = div.max(f.divergence_at(dom.grid_point(n, i, j)).map_err(CliError::input)?.abs());
        }
    }
    let euler = match f.euler_residual(dom, n) {
        Ok(r) => json!(r),
        Err(FieldError::MissingPressure(_)) => Value::Null,
        Err(e) => return Err(CliError::input(e)),
    };
    let b = f.estimate_eta(dom, n).map_err(CliError::input)?;
    Ok(json!({
        "name": f.name(),
        "domain": {"min": dom.min, "max": dom.max},
        "grid": n,
        "divergence_max": div,
        "euler_residual": euler,
        "eta_lo": b.eta_lo,
        "eta_hi": b.eta_hi,
        "eta": b.eta,
        "admissible": b.admissible,
    }))
}

fn run_trace(a: &TraceArgs, quiet: bool) -> Result<i32, CliError> {
    let f = resolve_field(&a.field)?;
    let mut cfg = IntegratorConfig::span(a.tspan[0], a.tspan[1]);
    if let Some(h) = a.max_step {
        cfg = cfg.with_max_step(h);
    }
    let traj = trace(&f, a.from, a.kind.into(), &cfg).map_err(CliError::input)?;
    match &a.out {
        Some(p) => {
            let file = File::create(p).map_err(|e| CliError::input(format!("{}: {e}", p.display())))?;
            write_trajectory_csv(&traj, BufWriter::new(file))?;
            if !quiet {
                let (t0, t1) = traj.t_range();
                eprintln!("trace: {} samples on [{t0}, {t1}] written to {}", traj.samples().len(), p.display());
            }
        }
        None => write_trajectory_csv(&traj, io::stdout().lock())?,
    }
    Ok(EXIT_OK)
}

fn run_arcs(a: &ArcsArgs) -> Result<i32, CliError> {
    let file = File::open(&a.curve).map_err(|e| CliError::input(format!("{}: {e}", a.curve.display())))?;
    let csv = read_trajectory_csv(BufReader::new(file))
        .map_err(|(line, m)| CliError::input(format!("{}:{line}: {m}", a.curve.display())))?;
    let tangents = (!csv.tangents.is_empty()).then_some(csv.tangents);
    let curve = Curve::new(csv.ts, csv.points, tangents).map_err(|e| CliError::input(format!("{}: {e}", a.curve.display())))?;
    let (t0, t1) = curve.t_range();
    let c = census(&curve, a.a.unwrap_or(t0), a.b.unwrap_or(t1)).map_err(CliError::input)?;
    emit(&to_canonical_json(&c), None)?;
    Ok(if c.bound_holds { EXIT_OK } else { EXIT_VIOLATION })
}

fn run_growth(a: &GrowthArgs) -> Result<i32, CliError> {
    let f = resolve_field(&a.field)?;
    let r_max = a.radii.iter().copied().fold(0.0, f64::max);
    let certified = suite::certify_eta(&f, crate::geom::Rect::square(r_max + 1.0))?;
    let eta = a.eta.map_or(certified, |e| e.min(certified));
    let recs = check_log_growth(&f, &a.radii, eta, a.grid).map_err(CliError::input)?;
    emit(&to_canonical_json(&recs), None)?;
    Ok(if recs.iter().any(|r| r.status.is_fail()) { EXIT_VIOLATION } else { EXIT_OK })
}

fn run_verify(a: &VerifyArgs, quiet: bool) -> Result<i32, CliError> {
    let f = resolve_field(&a.field)?;
    let suites = Suite::parse(&a.suite).ok_or_else(|| CliError::input(format!("unknown suite `{}`", a.suite)))?;
    let dom = f.domain();
    let bounds = f.estimate_eta(dom, 101).map_err(CliError::input)?;
    if !bounds.admissible && suites.iter().any(|s| *s != Suite::Constants && *s != Suite::Shear) {
        return Err(CliError::input(format!(
            "field `{}` has a stagnation point on its domain (|v| = {:e} at ({}, {})); the checks assume a speed bounded below",
            f.name(),
            bounds.eta_lo,
            bounds.argmin[0],
            bounds.argmin[1]
        )));
    }
    let mut cfg = SuiteConfig { seed: a.seed, eta: a.eta, ..Default::default() };
    if let Some(o) = a.orbits {
        cfg.orbits = o;
    }
    if let Some(p) = a.points {
        cfg.points = p;
    }
    if let Some(r) = &a.radii {
        cfg.radii = r.clone();
    }
    let records = suite::run_suites(&f, &suites, &cfg)?;
    let config = json!({"field": f.name(), "suite": a.suite, "settings": cfg.to_json()});
    report_exit(&Report::new("verify", config, records), a.out.as_deref(), quiet)
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    configure_threads()?;
    match cli.command {
        Command::Field { action: FieldAction::Check { file, grid } } => {
            let v = field_check(&file, grid)?;
            let admissible = v["admissible"].as_bool().unwrap_or(false);
            emit(&to_canonical_json(&v), None)?;
            Ok(if admissible { EXIT_OK } else { EXIT_VIOLATION })
        }
        Command::Trace(a) => run_trace(&a, cli.quiet),
        Command::Osc(a) => {
            let f = resolve_field(&a.field)?;
            let r = oscillation(&f, Ball::new(a.center, a.radius), a.grid, Target::Velocity).map_err(CliError::input)?;
            emit(&to_canonical_json(&r), None)?;
            Ok(EXIT_OK)
        }
        Command::Arcs(a) => run_arcs(&a),
        Command::Growth(a) => run_growth(&a),
        Command::Verify(a) => run_verify(&a, cli.quiet),
        Command::Constants(a) => {
            let c = constants(a.eta).map_err(CliError::input)?;
            let p = partition_params(a.d, a.eta).map_err(CliError::input)?;
            emit(&to_canonical_json(&json!({"constants": c, "partition": p})), None)?;
            Ok(EXIT_OK)
        }
        Command::Demo(a) => {
            let rep = suite::demo(a.seed)?;
            report_exit(&rep, a.out.as_deref(), cli.quiet)
        }
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("flowlab: {}", e.message);
            e.code
        }
    }
}
