//! The `qbl` command line tool.
//!
//! Four subcommands cover the laboratory workflow: `boundary` tabulates the
//! analytic curve, `sweep` drives Monte Carlo evolutions against it,
//! `oracle` rebuilds the curve by brute force and compares, `interfere`
//! reads overlaps out of the pseudo-pure interferometer. Every run writes
//! its tables and figures plus a manifest.json into `--out`; re-invoking
//! with the parameters recorded in a manifest reproduces every CSV, JSON and
//! SVG byte for byte, with any `--threads` value (`duration_seconds` inside
//! the manifest itself is the one field that varies).
//!
//! Exit status: 0 when the command's checks pass, 1 when a check fails (a
//! machine-readable failure JSON goes to stdout and to failure.json), 2 for
//! usage or environment errors.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::boundary;
use crate::error::{Error, Result};
use crate::interferometer;
use crate::linalg::MAX_DIM;
use crate::oracle;
use crate::report::{self, ReadoutRow, RunManifest};
use crate::state::{self, SchmidtSpec, TwoQuditState};
use crate::svg;
use crate::sweep::{self, SweepConfig, SweepStrategy};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const DEFAULT_TOL: f64 = 1e-9;
/// The interferometer cross-check is exact up to rounding, so its gate is
/// much tighter than the Monte Carlo membership tolerance.
const INTERFERE_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(
    name = "qbl",
    version,
    about = "Numerical laboratory for intrinsic overlap bounds of two qudits under random local SU(d) evolution"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate the analytic boundary of reachable overlaps.
    Boundary(BoundaryArgs),
    /// Sweep random local evolutions and check confinement.
    Sweep(SweepArgs),
    /// Rebuild the boundary by brute force over eigenphases and compare.
    Oracle(OracleArgs),
    /// Read overlaps interferometrically from a pseudo-pure state.
    Interfere(InterfereArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// RNG seed; the QBL_SEED environment variable overrides it.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Directory receiving all output files.
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Tolerance for this command's pass/fail checks
    /// (default 1e-9, or 1e-12 for interfere).
    #[arg(long, value_parser = parse_tol)]
    tol: Option<f64>,

    /// Worker threads; 0 keeps the rayon default. Never changes results.
    #[arg(long, default_value_t = 0)]
    threads: usize,

    /// Format of the tabular outputs.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Args)]
struct BoundaryArgs {
    /// Local dimension.
    #[arg(long, default_value = "3", value_parser = parse_dim)]
    d: usize,

    /// Number of points along the curve.
    #[arg(long, default_value_t = 720)]
    n: usize,

    /// Qubit concurrence; switches to the partially entangled d = 2 curve.
    #[arg(long, value_parser = parse_concurrence)]
    concurrence: Option<f64>,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Local dimension.
    #[arg(long, default_value = "3", value_parser = parse_dim)]
    d: usize,

    /// How the local unitaries are drawn.
    #[arg(long, default_value = "haar-two-sided", value_parser = parse_strategy)]
    strategy: SweepStrategy,

    /// Number of samples.
    #[arg(long, default_value_t = 1000, value_parser = parse_count)]
    n: usize,

    /// Schmidt coefficients of the initial state, comma separated, with
    /// squares summing to 1.
    #[arg(long, value_delimiter = ',', num_args = 1.., conflicts_with = "concurrence")]
    schmidt_weights: Option<Vec<f64>>,

    /// Concurrence of the initial qubit pair (d = 2 only).
    #[arg(long, value_parser = parse_concurrence)]
    concurrence: Option<f64>,

    /// Number of phase histogram bins.
    #[arg(long, default_value_t = 36, value_parser = parse_bins)]
    bins: usize,

    /// Label histogram angles in degrees instead of radians.
    #[arg(long)]
    degrees: bool,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct OracleArgs {
    /// Local dimension; the exhaustive grid supports 2, 3 and 4.
    #[arg(long, default_value = "3", value_parser = parse_oracle_dim)]
    d: usize,

    /// Grid steps per free eigenphase axis (d = 4 caps at 256 and adds a
    /// fixed-seed random supplement).
    #[arg(long, default_value_t = 1024)]
    steps: usize,

    /// Number of overlap-phase bins.
    #[arg(long, default_value_t = 360, value_parser = parse_bins)]
    bins: usize,

    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct InterfereArgs {
    /// Local dimension.
    #[arg(long, default_value = "2", value_parser = parse_dim)]
    d: usize,

    /// Number of readouts.
    #[arg(long, default_value_t = 800, value_parser = parse_count)]
    n: usize,

    /// Pseudo-pure polarization, in (0, 1].
    #[arg(long, default_value_t = 1.0, value_parser = parse_epsilon)]
    epsilon: f64,

    /// Ancilla dephasing applied before readout, in [0, 1].
    #[arg(long, default_value_t = 0.0, value_parser = parse_gamma)]
    gamma: f64,

    /// Schmidt coefficients of the probe state, comma separated, with
    /// squares summing to 1.
    #[arg(long, value_delimiter = ',', num_args = 1.., conflicts_with = "concurrence")]
    schmidt_weights: Option<Vec<f64>>,

    /// Concurrence of the probe qubit pair (d = 2 only).
    #[arg(long, value_parser = parse_concurrence)]
    concurrence: Option<f64>,

    #[command(flatten)]
    common: CommonArgs,
}

fn parse_dim(s: &str) -> std::result::Result<usize, String> {
    let d: usize = s.parse().map_err(|_| format!("`{s}` is not an integer"))?;
    if (2..=MAX_DIM).contains(&d) {
        Ok(d)
    } else {
        Err(format!("local dimension must lie in 2..={MAX_DIM}"))
    }
}

fn parse_oracle_dim(s: &str) -> std::result::Result<usize, String> {
    let d: usize = s.parse().map_err(|_| format!("`{s}` is not an integer"))?;
    if (2..=4).contains(&d) {
        Ok(d)
    } else {
        Err("the eigenphase grid grows as steps^(d-1); the oracle supports d = 2, 3, 4".into())
    }
}

fn parse_count(s: &str) -> std::result::Result<usize, String> {
    let n: usize = s.parse().map_err(|_| format!("`{s}` is not an integer"))?;
    if n >= 1 {
        Ok(n)
    } else {
        Err("need at least one sample".into())
    }
}

fn parse_bins(s: &str) -> std::result::Result<usize, String> {
    let n: usize = s.parse().map_err(|_| format!("`{s}` is not an integer"))?;
    if n >= 2 {
        Ok(n)
    } else {
        Err("need at least two bins".into())
    }
}

fn parse_tol(s: &str) -> std::result::Result<f64, String> {
    let tol: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if tol > 0.0 && tol.is_finite() {
        Ok(tol)
    } else {
        Err("tolerance must be positive and finite".into())
    }
}

fn parse_concurrence(s: &str) -> std::result::Result<f64, String> {
    let c: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (0.0..=1.0).contains(&c) {
        Ok(c)
    } else {
        Err("concurrence lies in [0, 1]".into())
    }
}

fn parse_epsilon(s: &str) -> std::result::Result<f64, String> {
    let e: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if e > 0.0 && e <= 1.0 {
        Ok(e)
    } else {
        Err("polarization lies in (0, 1]".into())
    }
}

fn parse_gamma(s: &str) -> std::result::Result<f64, String> {
    let g: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (0.0..=1.0).contains(&g) {
        Ok(g)
    } else {
        Err("dephasing strength lies in [0, 1]".into())
    }
}

fn parse_strategy(s: &str) -> std::result::Result<SweepStrategy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Entry point for the qbl binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let rendered = err.render();
            if err.use_stderr() {
                eprint!("{rendered}");
                return EXIT_USAGE;
            }
            // --help and --version land here
            print!("{rendered}");
            return EXIT_OK;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            EXIT_USAGE
        }
    }
}

fn execute(cli: Cli) -> Result<i32> {
    let started = Instant::now();
    let outcome = match cli.command {
        Command::Boundary(args) => {
            with_pool(args.common.threads, move || run_boundary(&args, started))?
        }
        Command::Sweep(args) => with_pool(args.common.threads, move || run_sweep(&args, started))?,
        Command::Oracle(args) => {
            with_pool(args.common.threads, move || run_oracle(&args, started))?
        }
        Command::Interfere(args) => {
            with_pool(args.common.threads, move || run_interfere(&args, started))?
        }
    };
    match outcome {
        None => Ok(EXIT_OK),
        Some(payload) => {
            println!("{}", serde_json::to_string_pretty(&payload)?);
            Ok(EXIT_CHECK_FAILED)
        }
    }
}

fn with_pool<T, F>(threads: usize, job: F) -> Result<T>
where
    T: Send,
    F: FnOnce() -> Result<T> + Send,
{
    if threads == 0 {
        return job();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Contract(format!("could not build thread pool: {e}")))?;
    pool.install(job)
}

/// QBL_SEED, when set, wins over --seed.
fn effective_seed(flag: u64) -> Result<u64> {
    match std::env::var("QBL_SEED") {
        Ok(text) => text
            .trim()
            .parse::<u64>()
            .map_err(|_| Error::Contract(format!("QBL_SEED must be an unsigned integer, got `{text}`"))),
        Err(std::env::VarError::NotPresent) => Ok(flag),
        Err(err) => Err(Error::Contract(format!("QBL_SEED unreadable: {err}"))),
    }
}

/// Resolves the initial-state flags into a Schmidt spec plus the concurrence
/// to use for membership checks (None means the maximally entangled curve).
fn resolve_initial(
    d: usize,
    weights: &Option<Vec<f64>>,
    concurrence: Option<f64>,
) -> Result<(SchmidtSpec, Option<f64>)> {
    if let Some(weights) = weights {
        let spec = SchmidtSpec::new(weights.clone())?;
        if spec.d() != d {
            return Err(Error::Contract(format!(
                "--schmidt-weights lists {} coefficients but --d is {d}",
                spec.d()
            )));
        }
        if d == 2 {
            let w = spec.weights();
            let c = 2.0 * w[0] * w[1];
            return Ok((spec, Some(c)));
        }
        // The analytic boundary is known for every maximally entangled pair
        // and for any qubit pair, not for partially entangled d >= 3.
        let uniform = 1.0 / (d as f64).sqrt();
        if spec.weights().iter().any(|w| (w - uniform).abs() > 1e-9) {
            return Err(Error::Contract(
                "partially entangled states have a closed boundary only for d = 2; \
                 drop --schmidt-weights or use --d 2"
                    .into(),
            ));
        }
        return Ok((spec, None));
    }
    if let Some(c) = concurrence {
        if d != 2 {
            return Err(Error::Contract(format!(
                "--concurrence applies to qubit pairs only (got --d {d})"
            )));
        }
        return Ok((SchmidtSpec::qubit_with_concurrence(c)?, Some(c)));
    }
    Ok((SchmidtSpec::maximally_entangled(d)?, None))
}

struct OutputSink {
    dir: PathBuf,
    names: Vec<String>,
}

impl OutputSink {
    fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            names: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        fs::write(self.dir.join(name), contents)?;
        self.names.push(name.to_string());
        Ok(())
    }
}

fn pretty(value: &Value) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

fn base_parameters(d: usize, seed: u64, tol: f64, format: Format) -> BTreeMap<String, String> {
    let mut parameters = BTreeMap::new();
    parameters.insert("d".to_string(), d.to_string());
    parameters.insert("seed".to_string(), seed.to_string());
    parameters.insert("tol".to_string(), tol.to_string());
    parameters.insert("format".to_string(), format.name().to_string());
    parameters
}

fn record_initial(
    parameters: &mut BTreeMap<String, String>,
    spec: &SchmidtSpec,
    weights: &Option<Vec<f64>>,
    concurrence: Option<f64>,
) {
    if weights.is_some() {
        let joined = spec
            .weights()
            .iter()
            .map(|w| w.to_string())
            .collect::<Vec<_>>()
            .join(",");
        parameters.insert("schmidt-weights".to_string(), joined);
    } else if let Some(c) = concurrence {
        parameters.insert("concurrence".to_string(), c.to_string());
    }
}

/// Writes failure.json (when checks failed) and manifest.json, then hands
/// back the failure payload for stdout.
fn conclude(
    mut sink: OutputSink,
    subcommand: &str,
    seed: u64,
    parameters: BTreeMap<String, String>,
    started: Instant,
    failures: Vec<String>,
    detail: Value,
) -> Result<Option<Value>> {
    let payload = if failures.is_empty() {
        None
    } else {
        let payload = json!({
            "version": crate::VERSION,
            "subcommand": subcommand,
            "failed_checks": failures,
            "detail": detail,
        });
        sink.write("failure.json", &pretty(&payload)?)?;
        Some(payload)
    };
    let manifest = RunManifest {
        subcommand: subcommand.to_string(),
        version: crate::VERSION.to_string(),
        seed: Some(seed),
        parameters,
        outputs: sink.names.clone(),
        duration_seconds: started.elapsed().as_secs_f64(),
    };
    let mut text = manifest.to_pretty_json();
    text.push('\n');
    fs::write(sink.dir.join("manifest.json"), text)?;
    Ok(payload)
}

fn run_boundary(args: &BoundaryArgs, started: Instant) -> Result<Option<Value>> {
    let tol = args.common.tol.unwrap_or(DEFAULT_TOL);
    let seed = effective_seed(args.common.seed)?;
    if args.concurrence.is_some() && args.d != 2 {
        return Err(Error::Contract(format!(
            "--concurrence applies to qubit pairs only (got --d {})",
            args.d
        )));
    }
    let curve = boundary::curve(args.d, args.n, args.concurrence)?;

    let mut failures = Vec::new();
    match args.concurrence {
        None => {
            let df = args.d as f64;
            let floor = 1.0 - 2.0 / df;
            for k in 0..args.d {
                let touch = boundary::boundary_point(args.d, TAU * k as f64 / df)?.r_max;
                if (touch - 1.0).abs() > tol {
                    failures.push(format!(
                        "touchpoint {k}: R_max = {touch} should be 1 within {tol:e}"
                    ));
                }
                let dip = boundary::boundary_point(args.d, (2 * k + 1) as f64 * PI / df)?.r_max;
                if (dip - floor).abs() > tol {
                    failures.push(format!(
                        "minimum {k}: R_max = {dip} should be {floor} within {tol:e}"
                    ));
                }
            }
        }
        Some(c) => {
            let (major, _) = boundary::qubit_boundary_point(c, 0.0)?;
            if (major - 1.0).abs() > tol {
                failures.push(format!("major axis: r_max = {major} should be 1"));
            }
            let minor_target = (1.0 - c * c).sqrt();
            let (minor, _) = boundary::qubit_boundary_point(c, FRAC_PI_2)?;
            if (minor - minor_target).abs() > tol {
                failures.push(format!(
                    "minor axis: r_max = {minor} should be {minor_target} within {tol:e}"
                ));
            }
        }
    }

    let mut sink = OutputSink::create(&args.common.out)?;
    match args.common.format {
        Format::Csv => sink.write("boundary.csv", &report::boundary_csv(&curve))?,
        Format::Json => sink.write("boundary.json", &pretty(&report::boundary_json(&curve))?)?,
    }
    let title = match args.concurrence {
        Some(c) => format!("qubit overlap boundary, C = {c}"),
        None => format!("overlap boundary, d = {}", args.d),
    };
    sink.write("boundary.svg", &svg::overlay(&curve, &[], &title))?;

    let mut parameters = base_parameters(args.d, seed, tol, args.common.format);
    parameters.insert("n".to_string(), args.n.to_string());
    if let Some(c) = args.concurrence {
        parameters.insert("concurrence".to_string(), c.to_string());
    }
    let detail = json!({ "d": args.d, "n": args.n, "tol": tol });
    let out_dir = sink.dir.clone();
    let payload = conclude(sink, "boundary", seed, parameters, started, failures, detail)?;
    if payload.is_none() {
        println!(
            "boundary d = {}: {} points, extrema checks passed; outputs in {}",
            args.d,
            args.n,
            out_dir.display()
        );
    }
    Ok(payload)
}

fn run_sweep(args: &SweepArgs, started: Instant) -> Result<Option<Value>> {
    let tol = args.common.tol.unwrap_or(DEFAULT_TOL);
    let seed = effective_seed(args.common.seed)?;
    let (spec, membership) = resolve_initial(args.d, &args.schmidt_weights, args.concurrence)?;
    let config = SweepConfig::new(spec.clone(), args.strategy, args.n, seed, tol)?;
    let samples = sweep::run_sweep(&config)?;
    let confinement = sweep::check_confinement(&samples, args.d, membership, tol)?;
    let histogram = sweep::phase_histogram(&samples, args.bins)?;

    let mut failures = Vec::new();
    if !confinement.violations.is_empty() {
        failures.push(format!(
            "{} of {} samples escape the boundary by up to {:e} (tolerance {tol:e})",
            confinement.violations.len(),
            confinement.total,
            confinement.max_excess
        ));
    }

    let mut sink = OutputSink::create(&args.common.out)?;
    match args.common.format {
        Format::Csv => {
            sink.write("samples.csv", &report::samples_csv(&samples))?;
            sink.write(
                "histogram.csv",
                &report::histogram_csv(&histogram, args.degrees),
            )?;
        }
        Format::Json => {
            sink.write("samples.json", &pretty(&report::samples_json(&samples))?)?;
            sink.write(
                "histogram.json",
                &pretty(&report::histogram_json(&histogram, args.degrees))?,
            )?;
        }
    }
    sink.write(
        "confinement.json",
        &pretty(&report::confinement_json(&confinement, tol))?,
    )?;
    let curve = boundary::curve(args.d, 720, membership)?;
    let points: Vec<(f64, f64)> = samples.iter().map(|s| (s.value.re, s.value.im)).collect();
    let title = format!("{} sweep, d = {}, {} samples", args.strategy, args.d, args.n);
    sink.write("scatter.svg", &svg::scatter(&curve, &points, &title))?;
    sink.write(
        "histogram.svg",
        &svg::histogram_wedges(
            &histogram,
            args.degrees,
            &format!("overlap phase distribution, d = {}", args.d),
        ),
    )?;

    let mut parameters = base_parameters(args.d, seed, tol, args.common.format);
    parameters.insert("strategy".to_string(), args.strategy.name().to_string());
    parameters.insert("n".to_string(), args.n.to_string());
    parameters.insert("bins".to_string(), args.bins.to_string());
    parameters.insert("degrees".to_string(), args.degrees.to_string());
    record_initial(&mut parameters, &spec, &args.schmidt_weights, args.concurrence);
    let detail = report::confinement_json(&confinement, tol);
    let out_dir = sink.dir.clone();
    let payload = conclude(sink, "sweep", seed, parameters, started, failures, detail)?;
    if payload.is_none() {
        println!(
            "sweep {} d = {}: {} samples confined within {tol:e}; outputs in {}",
            args.strategy,
            args.d,
            args.n,
            out_dir.display()
        );
    }
    Ok(payload)
}

fn run_oracle(args: &OracleArgs, started: Instant) -> Result<Option<Value>> {
    let tol = args.common.tol.unwrap_or(DEFAULT_TOL);
    let seed = effective_seed(args.common.seed)?;
    let empirical = oracle::grid_max_overlap(args.d, args.steps, args.bins)?;
    let analytic = boundary::curve(args.d, 10 * args.bins, None)?;
    let gaps = oracle::compare_boundaries(&empirical, &analytic)?;
    // Only the exhaustive grids carry a resolution guarantee; the sampled
    // d = 4 supplement does not.
    let completeness_bound = if args.d <= 3 {
        Some(2.0 * TAU / empirical.steps_per_axis() as f64)
    } else {
        None
    };

    let mut failures = Vec::new();
    let soundness = gaps.soundness_violations(tol);
    if soundness > 0 {
        failures.push(format!(
            "{soundness} bins exceed the analytic curve beyond {tol:e} (min gap {:e})",
            gaps.min_gap()
        ));
    }
    if let Some(bound) = completeness_bound {
        if gaps.max_gap > bound {
            failures.push(format!(
                "max gap {:e} exceeds the grid resolution bound {bound:e}; refine --steps",
                gaps.max_gap
            ));
        }
    }

    let mut sink = OutputSink::create(&args.common.out)?;
    match args.common.format {
        Format::Csv => sink.write("empirical.csv", &report::empirical_csv(&empirical))?,
        Format::Json => sink.write("empirical.json", &pretty(&report::empirical_json(&empirical))?)?,
    }
    sink.write(
        "gaps.json",
        &pretty(&report::gap_json(&gaps, tol, completeness_bound))?,
    )?;
    let markers: Vec<(f64, f64)> = empirical
        .bins()
        .iter()
        .flatten()
        .map(|bin| (bin.argmax_phase, bin.max_modulus))
        .collect();
    let title = format!("empirical vs analytic boundary, d = {}", args.d);
    sink.write("overlay.svg", &svg::overlay(&analytic, &markers, &title))?;

    let mut parameters = base_parameters(args.d, seed, tol, args.common.format);
    parameters.insert("steps".to_string(), args.steps.to_string());
    parameters.insert("bins".to_string(), args.bins.to_string());
    let detail = report::gap_json(&gaps, tol, completeness_bound);
    let out_dir = sink.dir.clone();
    let payload = conclude(sink, "oracle", seed, parameters, started, failures, detail)?;
    if payload.is_none() {
        println!(
            "oracle d = {}: {}/{} bins populated, max gap {:.3e}, soundness holds; outputs in {}",
            args.d,
            empirical.populated(),
            args.bins,
            gaps.max_gap,
            out_dir.display()
        );
    }
    Ok(payload)
}

fn run_interfere(args: &InterfereArgs, started: Instant) -> Result<Option<Value>> {
    let tol = args.common.tol.unwrap_or(INTERFERE_TOL);
    let seed = effective_seed(args.common.seed)?;
    let (spec, membership) = resolve_initial(args.d, &args.schmidt_weights, args.concurrence)?;
    let probe = TwoQuditState::from_schmidt(&spec);
    // Mirror the experiment on qubits; Haar on one side otherwise.
    let strategy = if args.d == 2 {
        SweepStrategy::RxRz
    } else {
        SweepStrategy::HaarOneSided
    };
    let config = SweepConfig::new(spec.clone(), strategy, args.n, seed, tol)?;
    let prepared = interferometer::build_pps(&probe, args.epsilon)?;

    let rows = (0..args.n)
        .into_par_iter()
        .map(|k| {
            let (ua, ub) = sweep::sample_unitaries(&config, k)?;
            let joint = ua.kronecker(&ub);
            let mut after = interferometer::apply_circuit(&prepared, &joint)?;
            if args.gamma > 0.0 {
                after = interferometer::apply_dephasing(&after, args.gamma)?;
            }
            let readout = interferometer::read_signal(&after, args.epsilon);
            let evolved = state::evolve_local(&probe, &ua, &ub)?;
            let direct = state::overlap(&probe, &evolved)?;
            let residual = (readout.signal - direct.scale(args.epsilon)).norm();
            Ok((readout, residual))
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<ReadoutRow> = rows
        .into_iter()
        .enumerate()
        .map(|(index, (readout, residual))| ReadoutRow {
            index,
            value: readout.normalized(),
            residual,
        })
        .collect();

    let max_residual = rows.iter().map(|r| r.residual).fold(0.0_f64, f64::max);
    let max_signal = rows
        .iter()
        .map(|r| r.value.norm() * args.epsilon)
        .fold(0.0_f64, f64::max);
    let mut failures = Vec::new();
    if args.gamma == 0.0 && max_residual > tol {
        failures.push(format!(
            "readout deviates from the direct overlap by {max_residual:e} (tolerance {tol:e})"
        ));
    }
    if max_signal > args.epsilon + 1e-10 {
        failures.push(format!(
            "signal modulus {max_signal:e} exceeds the polarization bound {}",
            args.epsilon
        ));
    }

    let mut sink = OutputSink::create(&args.common.out)?;
    match args.common.format {
        Format::Csv => sink.write("readout.csv", &report::readout_csv(&rows))?,
        Format::Json => sink.write("readout.json", &pretty(&report::readout_json(&rows))?)?,
    }
    let curve = boundary::curve(args.d, 720, membership)?;
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.value.re, r.value.im)).collect();
    let title = format!(
        "interferometric readout, d = {}, epsilon = {}",
        args.d, args.epsilon
    );
    sink.write("readout.svg", &svg::scatter(&curve, &points, &title))?;

    let mut parameters = base_parameters(args.d, seed, tol, args.common.format);
    parameters.insert("n".to_string(), args.n.to_string());
    parameters.insert("epsilon".to_string(), args.epsilon.to_string());
    parameters.insert("gamma".to_string(), args.gamma.to_string());
    record_initial(&mut parameters, &spec, &args.schmidt_weights, args.concurrence);
    let detail = json!({
        "n": args.n,
        "epsilon": args.epsilon,
        "gamma": args.gamma,
        "tol": tol,
        "max_residual": max_residual,
    });
    let out_dir = sink.dir.clone();
    let payload = conclude(sink, "interfere", seed, parameters, started, failures, detail)?;
    if payload.is_none() {
        println!(
            "interfere d = {}: {} readouts, max residual {max_residual:.3e}; outputs in {}",
            args.d,
            args.n,
            out_dir.display()
        );
    }
    Ok(payload)
}
