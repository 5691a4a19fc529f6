//! `quditsim`: Monte Carlo runs, threshold crossings and plateau fits.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use qudit_topo::analysis::{find_threshold, fit_plateau, BOOTSTRAP};
use qudit_topo::io::{read_rates, read_thresholds, round_g, write_rates};
use qudit_topo::montecarlo::{estimate_rate_with, RatePoint, Schedule};
use qudit_topo::{CodeGraph, CodeKind, DecoderKind, Error, QuditDim};

const EXIT_RUNTIME: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "quditsim", version, about = "Planar qudit surface and color code threshold simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate logical error rates on a grid of distances and error rates.
    Simulate(SimulateArgs),
    /// Locate the crossing of two distances' rate curves.
    Threshold(ThresholdArgs),
    /// Fit T(D) = T_plateau - alpha / (beta - D) to per-dimension thresholds.
    FitPlateau(PlateauArgs),
}

#[derive(Args, Default)]
struct SimulateArgs {
    /// TOML file with any of the fields below; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    code: Option<String>,
    #[arg(long)]
    decoder: Option<String>,
    #[arg(long)]
    dim: Option<u32>,
    /// Comma-separated odd distances.
    #[arg(long, value_delimiter = ',')]
    distances: Option<Vec<usize>>,
    #[arg(long)]
    p_start: Option<f64>,
    #[arg(long)]
    p_end: Option<f64>,
    #[arg(long)]
    p_steps: Option<usize>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    workers: Option<usize>,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Simulation settings as read from a config file.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
struct SimulationConfig {
    code: Option<String>,
    decoder: Option<String>,
    dim: Option<u32>,
    distances: Option<Vec<usize>>,
    p_start: Option<f64>,
    p_end: Option<f64>,
    p_steps: Option<usize>,
    trials: Option<u64>,
    seed: Option<u64>,
    workers: Option<usize>,
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ThresholdArgs {
    /// Rate CSV written by `simulate`.
    #[arg(long)]
    input: PathBuf,
    /// The two distances to cross; defaults to the two largest (d=7 color curves excluded).
    #[arg(long, value_delimiter = ',')]
    distances: Option<Vec<usize>>,
    #[arg(long, default_value_t = BOOTSTRAP)]
    bootstrap: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlateauArgs {
    /// CSV with `dim,p_thresh` columns.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct ThresholdJson {
    p_thresh: f64,
    stderr: f64,
    d_pair: [usize; 2],
    fit_window: [f64; 2],
}

#[derive(Serialize)]
struct PlateauJson {
    #[serde(rename = "T_plateau")]
    t_plateau: f64,
    alpha: f64,
    beta: f64,
    residual: f64,
}

/// Failure with the exit code it maps to.
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Unsupported { .. }
            | Error::InvalidDistance(_)
            | Error::InvalidDimension(_)
            | Error::InvalidProbability(_) => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
            Failure::Runtime(format!("cannot create {}: {e}", p.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn open(path: &Path) -> Result<File, Failure> {
    File::open(path).map_err(|e| Failure::Runtime(format!("cannot open {}: {e}", path.display())))
}

fn merge(args: SimulateArgs) -> Result<SimulationConfig, Failure> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
            toml::from_str(&text).map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))?
        }
        None => SimulationConfig::default(),
    };
    macro_rules! overlay {
        ($($f:ident),*) => { $(if args.$f.is_some() { cfg.$f = args.$f; })* };
    }
    overlay!(code, decoder, dim, distances, p_start, p_end, p_steps, trials, seed, workers, out);
    Ok(cfg)
}

/// Evenly spaced error rates, rounded to the digits the CSV keeps.
fn p_grid(start: f64, end: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![round_g(start)];
    }
    (0..steps)
        .map(|i| round_g(start + (end - start) * i as f64 / (steps - 1) as f64))
        .collect()
}

fn simulate(args: SimulateArgs) -> Result<(), Failure> {
    let cfg = merge(args)?;
    let as_usage = |e: Error| Failure::Usage(e.to_string());
    let code: CodeKind = cfg
        .code
        .as_deref()
        .ok_or(Failure::Usage("--code is required".into()))?
        .parse()
        .map_err(as_usage)?;
    let decoder: DecoderKind = cfg
        .decoder
        .as_deref()
        .ok_or(Failure::Usage("--decoder is required".into()))?
        .parse()
        .map_err(as_usage)?;
    let dim = QuditDim::new(cfg.dim.unwrap_or(2))?;
    decoder.check_applicable(code, dim)?;
    let distances = cfg.distances.clone().unwrap_or_default();
    if distances.is_empty() {
        return usage("--distances is required");
    }
    let (Some(p_start), Some(p_end)) = (cfg.p_start, cfg.p_end) else {
        return usage("--p-start and --p-end are required");
    };
    let steps = cfg.p_steps.unwrap_or(1);
    if steps == 0 {
        return usage("--p-steps must be positive");
    }
    let grid = p_grid(p_start, p_end, steps);
    if let Some(bad) = grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return usage(format!("error rate {bad} outside [0, 1]"));
    }
    let trials = cfg.trials.unwrap_or(1000);
    if trials == 0 {
        return usage("--trials must be positive");
    }
    let seed = cfg.seed.unwrap_or(0);
    let schedule = match cfg.workers {
        Some(0) => return usage("--workers must be positive"),
        Some(w) => Schedule::Workers(w),
        None => Schedule::Parallel,
    };
    let codes = distances
        .iter()
        .map(|&d| CodeGraph::build(code, d))
        .collect::<Result<Vec<_>, _>>()?;
    let mut points: Vec<RatePoint> = Vec::with_capacity(codes.len() * grid.len());
    for graph in &codes {
        for &p in &grid {
            points.push(estimate_rate_with(graph, decoder, p, dim, trials, seed, schedule)?);
        }
    }
    let mut out = output(cfg.out.as_deref())?;
    write_rates(&mut out, &points)?;
    out.flush()?;
    Ok(())
}

/// Two largest distances, skipping d=7 color-code curves.
fn default_pair(points: &[RatePoint]) -> Result<(usize, usize), Failure> {
    let mut ds: Vec<usize> = points
        .iter()
        .filter(|r| !(r.code == CodeKind::Color666 && r.distance == 7))
        .map(|r| r.distance)
        .collect();
    ds.sort_unstable();
    ds.dedup();
    match ds.as_slice() {
        [.., a, b] => Ok((*a, *b)),
        _ => Err(Failure::Runtime("input needs rate curves for two distances".into())),
    }
}

fn threshold(args: ThresholdArgs) -> Result<(), Failure> {
    let points = read_rates(open(&args.input)?)?;
    let pair = match args.distances.as_deref() {
        None => default_pair(&points)?,
        Some(&[a, b]) if a != b => (a, b),
        Some(_) => return usage("--distances takes two different distances"),
    };
    for d in [pair.0, pair.1] {
        if !points.iter().any(|r| r.distance == d) {
            return Err(Failure::Runtime(format!("no rate curve for distance {d} in {}", args.input.display())));
        }
    }
    let t = find_threshold(&points, pair, args.bootstrap, args.seed)?;
    let json = ThresholdJson {
        p_thresh: t.p_thresh,
        stderr: t.std_err,
        d_pair: [pair.0, pair.1],
        fit_window: [t.window.0, t.window.1],
    };
    emit(args.out.as_deref(), &json)
}

fn plateau(args: PlateauArgs) -> Result<(), Failure> {
    let rows = read_thresholds(open(&args.input)?)?;
    let fit = fit_plateau(&rows)?;
    let json = PlateauJson {
        t_plateau: fit.t_plateau,
        alpha: fit.alpha,
        beta: fit.beta,
        residual: fit.residual,
    };
    emit(args.out.as_deref(), &json)
}

fn emit<T: Serialize>(path: Option<&Path>, value: &T) -> Result<(), Failure> {
    let mut out = output(path)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| Failure::Runtime(e.to_string()))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Threshold(a) => threshold(a),
        Command::FitPlateau(a) => plateau(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("quditsim: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("quditsim: {msg}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
