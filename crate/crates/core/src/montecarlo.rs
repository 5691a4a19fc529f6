//! Monte Carlo estimation of logical error rates.
//!
//! Trial `i` draws its noise from [`trial_rng`]`(seed, i)`, so the failure
//! count depends only on the seed and the number of trials, never on how
//! trials are scheduled across threads.

use serde::{Deserialize, Serialize};

use crate::charge::QuditDim;
use crate::codegraph::{CodeGraph, CodeKind};
use crate::decoders::DecoderKind;
use crate::error::{Error, Result};
use crate::logical::residual_fails;
use crate::noise::{check_probability, sample_into, trial_rng};
use crate::syndrome::extract_dense;
use crate::transport::TransportLedger;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;

/// Trials handed to one worker at a time.
const CHUNK: u64 = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub code: CodeKind,
    pub decoder: DecoderKind,
    pub dim: u32,
    pub distance: usize,
    pub p: f64,
    pub trials: u64,
    pub failures: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(failures: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = failures as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = Z95 * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if failures == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if failures == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Reusable per-worker buffers.
struct Scratch {
    error: Vec<u32>,
    syndrome: Vec<u32>,
    residual: Vec<u32>,
}

impl Scratch {
    fn new(code: &CodeGraph) -> Self {
        Scratch {
            error: vec![0; code.num_data()],
            syndrome: vec![0; code.num_stabilizers()],
            residual: vec![0; code.num_data()],
        }
    }
}

fn trial_in(
    code: &CodeGraph,
    decoder: DecoderKind,
    p: f64,
    dim: QuditDim,
    seed: u64,
    index: u64,
    scratch: &mut Scratch,
) -> Result<bool> {
    let mut rng = trial_rng(seed, index);
    sample_into(&mut scratch.error, p, dim, &mut rng);
    extract_dense(code, &scratch.error, dim, &mut scratch.syndrome);
    let mut ledger = TransportLedger::from_dense(code, scratch.syndrome.clone(), dim);
    decoder.decode_ledger(&mut ledger).map_err(|e| annotate(e, seed, index))?;
    for ((r, &e), &c) in scratch
        .residual
        .iter_mut()
        .zip(&scratch.error)
        .zip(ledger.correction_dense())
    {
        *r = dim.add(e, c);
    }
    residual_fails(code, &scratch.residual, dim, &mut scratch.syndrome).map_err(|e| annotate(e, seed, index))
}

fn annotate(e: Error, seed: u64, index: u64) -> Error {
    match e {
        Error::NontrivialResidual(_) | Error::DecoderStalled(_) => {
            Error::Precondition(format!("decoder postcondition violated (seed {seed}, trial {index}): {e}"))
        }
        other => other,
    }
}

/// Samples, decodes and judges trial `index`. `true` means logical failure.
pub fn run_trial(
    code: &CodeGraph,
    decoder: DecoderKind,
    p: f64,
    dim: QuditDim,
    seed: u64,
    index: u64,
) -> Result<bool> {
    check_probability(p)?;
    decoder.check_applicable(code.kind(), dim)?;
    trial_in(code, decoder, p, dim, seed, index, &mut Scratch::new(code))
}

fn count_chunk(
    code: &CodeGraph,
    decoder: DecoderKind,
    p: f64,
    dim: QuditDim,
    seed: u64,
    range: std::ops::Range<u64>,
) -> Result<u64> {
    let mut scratch = Scratch::new(code);
    let mut failures = 0;
    for i in range {
        failures += trial_in(code, decoder, p, dim, seed, i, &mut scratch)? as u64;
    }
    Ok(failures)
}

fn chunks(trials: u64) -> Vec<std::ops::Range<u64>> {
    (0..trials.div_ceil(CHUNK))
        .map(|c| c * CHUNK..((c + 1) * CHUNK).min(trials))
        .collect()
}

#[cfg(feature = "parallel")]
fn count_failures(
    code: &CodeGraph,
    decoder: DecoderKind,
    p: f64,
    dim: QuditDim,
    seed: u64,
    trials: u64,
) -> Result<u64> {
    use rayon::prelude::*;
    chunks(trials)
        .into_par_iter()
        .map(|r| count_chunk(code, decoder, p, dim, seed, r))
        .collect::<Result<Vec<u64>>>()
        .map(|v| v.into_iter().sum())
}

#[cfg(not(feature = "parallel"))]
fn count_failures(
    code: &CodeGraph,
    decoder: DecoderKind,
    p: f64,
    dim: QuditDim,
    seed: u64,
    trials: u64,
) -> Result<u64> {
    count_failures_sequential(code, decoder, p, dim, seed, trials)
}

fn count_failures_sequential(
    code: &CodeGraph,
    decoder: DecoderKind,
    p: f64,
    dim: QuditDim,
    seed: u64,
    trials: u64,
) -> Result<u64> {
    chunks(trials)
        .into_iter()
        .map(|r| count_chunk(code, decoder, p, dim, seed, r))
        .sum()
}

/// How trials are scheduled. Results never depend on the choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    /// Single thread, in trial order.
    Sequential,
    /// The global rayon pool (or sequential without the `parallel` feature).
    #[default]
    Parallel,
    /// A dedicated pool of this many threads.
    Workers(usize),
}

fn point(
    code: &CodeGraph,
    decoder: DecoderKind,
    p: f64,
    dim: QuditDim,
    trials: u64,
    seed: u64,
    failures: u64,
) -> RatePoint {
    let (ci_low, ci_high) = wilson_interval(failures, trials);
    RatePoint {
        code: code.kind(),
        decoder,
        dim: dim.get(),
        distance: code.distance(),
        p,
        trials,
        failures,
        rate: failures as f64 / trials as f64,
        ci_low,
        ci_high,
        seed,
    }
}

pub fn estimate_rate(
    code: &CodeGraph,
    decoder: DecoderKind,
    p: f64,
    dim: QuditDim,
    trials: u64,
    seed: u64,
) -> Result<RatePoint> {
    estimate_rate_with(code, decoder, p, dim, trials, seed, Schedule::default())
}

pub fn estimate_rate_with(
    code: &CodeGraph,
    decoder: DecoderKind,
    p: f64,
    dim: QuditDim,
    trials: u64,
    seed: u64,
    schedule: Schedule,
) -> Result<RatePoint> {
    check_probability(p)?;
    if trials == 0 {
        return Err(Error::Precondition("at least one trial is required".into()));
    }
    decoder.check_applicable(code.kind(), dim)?;
    let failures = match schedule {
        Schedule::Sequential => count_failures_sequential(code, decoder, p, dim, seed, trials)?,
        Schedule::Parallel => count_failures(code, decoder, p, dim, seed, trials)?,
        Schedule::Workers(w) => with_workers(w, || count_failures(code, decoder, p, dim, seed, trials))?,
    };
    Ok(point(code, decoder, p, dim, trials, seed, failures))
}

#[cfg(feature = "parallel")]
fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
    pool.install(f)
}

#[cfg(not(feature = "parallel"))]
fn with_workers<T: Send>(_workers: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    f()
}
