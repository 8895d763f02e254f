//! Monte Carlo estimation of logical error rates and decode runtime.

use std::time::Duration;

use qldpc_core::{BitVector, CssCode, Decoder, RowspaceBasis, Side};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("error rate {0} is outside [0, 1]")]
    BadProbability(f64),
    #[error("word error rate needs k >= 1")]
    ZeroDimension,
    #[error("code encodes no logical qubits")]
    TrivialCode,
    #[error("cannot build thread pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Core(#[from] qldpc_core::Error),
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(SimError::BadProbability(p))
    }
}

/// Independent bit flips with probability `p`.
pub fn sample_error<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<BitVector> {
    check_probability(p)?;
    let mut e = BitVector::zeros(n);
    for i in 0..n {
        if rng.gen_bool(p) {
            e.set(i, true);
        }
    }
    Ok(e)
}

/// `1 - (1 - p_l)^(1/k)`, evaluated without cancellation at small `p_l`.
pub fn wer(p_l: f64, k: usize) -> Result<f64> {
    check_probability(p_l)?;
    if k == 0 {
        return Err(SimError::ZeroDimension);
    }
    if k == 1 {
        return Ok(p_l);
    }
    Ok(-((-p_l).ln_1p() / k as f64).exp_m1())
}

/// RNG for one trial of one sweep point.
pub fn trial_rng(master_seed: u64, point: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(((point as u64) << 32) | trial as u64);
    rng
}

/// A code together with the precomputed stabilizer test for one side.
#[derive(Clone, Debug)]
pub struct Harness {
    code: CssCode,
    side: Side,
    stabilizers: RowspaceBasis,
}

impl Harness {
    pub fn new(code: CssCode, side: Side) -> Self {
        let stabilizers = RowspaceBasis::new(code.stabilizer_matrix(side));
        Self {
            code,
            side,
            stabilizers,
        }
    }

    pub fn code(&self) -> &CssCode {
        &self.code
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn is_stabilizer(&self, v: &BitVector) -> Result<bool> {
        Ok(self.stabilizers.contains(v)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialOutcome {
    pub success: bool,
    pub converged: bool,
    /// Set when the estimate reproduces the syndrome of the sampled error.
    pub syndrome_consistent: bool,
    pub elapsed: Duration,
}

/// Decodes a given error and tests the residual.
pub fn run_trial_on(
    harness: &Harness,
    decoder: &Decoder,
    error: &BitVector,
    decoder_seed: u64,
) -> Result<TrialOutcome> {
    let side = harness.side;
    let syndrome = harness.code.syndrome(side, error)?;
    let out = decoder.decode(&harness.code, side, &syndrome, decoder_seed)?;
    let syndrome_consistent = harness.code.syndrome(side, &out.estimate)? == syndrome;
    let mut residual = error.clone();
    residual.xor_assign(&out.estimate);
    let success = out.converged && harness.is_stabilizer(&residual)?;
    Ok(TrialOutcome {
        success,
        converged: out.converged,
        syndrome_consistent,
        elapsed: out.elapsed,
    })
}

/// Samples an error at rate `p` from `rng`, decodes it and tests the residual.
/// The decoder's own seed is drawn from the same stream.
pub fn run_trial<R: RngCore>(
    harness: &Harness,
    decoder: &Decoder,
    p: f64,
    rng: &mut R,
) -> Result<TrialOutcome> {
    let error = sample_error(harness.code.n(), p, rng)?;
    let seed = rng.next_u64();
    run_trial_on(harness, decoder, &error, seed)
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub code: CssCode,
    pub side: Side,
    pub decoder: Decoder,
    pub per_values: Vec<f64>,
    pub samples_per_point: usize,
    pub master_seed: u64,
    /// `None` uses the available parallelism.
    pub threads: Option<usize>,
}

/// One row of a sweep. Field order is the CSV column order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub per: f64,
    pub samples: usize,
    pub failures: usize,
    pub block_error_rate: f64,
    pub word_error_rate: f64,
    pub mean_decode_ns: u64,
    pub decoder: String,
    pub growth: String,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
}

/// p values from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (end - start) / (points - 1) as f64;
            (0..points)
                .map(|i| {
                    if i == points - 1 {
                        end
                    } else {
                        start + step * i as f64
                    }
                })
                .collect()
        }
    }
}

fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t.max(1));
    }
    builder
        .build()
        .map_err(|e| SimError::ThreadPool(e.to_string()))
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    for &p in &cfg.per_values {
        check_probability(p)?;
    }
    let k = cfg.code.k();
    if k == 0 {
        return Err(SimError::TrivialCode);
    }
    let harness = Harness::new(cfg.code.clone(), cfg.side);
    let pool = thread_pool(cfg.threads)?;

    let mut points = Vec::with_capacity(cfg.per_values.len());
    for (idx, &p) in cfg.per_values.iter().enumerate() {
        let (failures, total_ns) = pool.install(|| {
            (0..cfg.samples_per_point)
                .into_par_iter()
                .map(|t| {
                    let mut rng = trial_rng(cfg.master_seed, idx, t);
                    let out = run_trial(&harness, &cfg.decoder, p, &mut rng)?;
                    Ok::<_, SimError>((usize::from(!out.success), out.elapsed.as_nanos()))
                })
                .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))
        })?;
        let samples = cfg.samples_per_point;
        let block_error_rate = if samples == 0 {
            0.0
        } else {
            failures as f64 / samples as f64
        };
        let mean_decode_ns = if samples == 0 {
            0
        } else {
            (total_ns / samples as u128) as u64
        };
        points.push(SweepPoint {
            per: p,
            samples,
            failures,
            block_error_rate,
            word_error_rate: wer(block_error_rate, k)?,
            mean_decode_ns,
            decoder: cfg.decoder.name().to_string(),
            growth: cfg.decoder.growth_label().to_string(),
            seed: cfg.master_seed,
        });
    }
    Ok(SweepResult { points })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub decoder: String,
    pub samples: usize,
    pub mean_decode_ns: u64,
    pub p: f64,
}

/// Mean decode time per (code, decoder). Trials run sequentially on the
/// calling thread; only the decode call is timed.
pub fn bench_runtime(
    codes: &[CssCode],
    decoders: &[Decoder],
    p: f64,
    samples: usize,
    seed: u64,
) -> Result<Vec<BenchRow>> {
    check_probability(p)?;
    let mut rows = Vec::with_capacity(codes.len() * decoders.len());
    for (ci, code) in codes.iter().enumerate() {
        let side = Side::X;
        // decoders take turns on each trial, so drift hits all of them alike
        let mut totals = vec![Duration::ZERO; decoders.len()];
        for t in 0..samples {
            let mut rng = trial_rng(seed, ci, t);
            let error = sample_error(code.n(), p, &mut rng)?;
            let dseed = rng.next_u64();
            let syndrome = code.syndrome(side, &error)?;
            for (total, decoder) in totals.iter_mut().zip(decoders) {
                *total += decoder.decode(code, side, &syndrome, dseed)?.elapsed;
            }
        }
        for (total, decoder) in totals.into_iter().zip(decoders) {
            let mean_decode_ns = if samples == 0 {
                0
            } else {
                (total.as_nanos() / samples as u128) as u64
            };
            rows.push(BenchRow {
                n: code.n(),
                decoder: decoder.name().to_string(),
                samples,
                mean_decode_ns,
                p,
            });
        }
    }
    Ok(rows)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 || points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
