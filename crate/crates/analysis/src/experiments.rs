//! Experiment runners. Each trial draws from its own substream
//! `(seed, size index, p index, trial)` and results are reduced in trial
//! order, so the worker count never changes the output.

use rand::Rng;
use rayon::prelude::*;
use rcqec_core::rng::trial_rng;
use rcqec_core::{Boundary, CircuitCode, Pauli, PauliOperator};
use rcqec_ft::{build_protocol, decode_trial, entropy_trial, mutual_info_trial, RowSet};
use rcqec_statmech::{marginal_decode, minimum_weight_decode};
use serde::{Deserialize, Serialize};

use crate::config::{CodeCapacityConfig, EntropyConfig, ExperimentConfig, MutualInfoConfig, OutcomeRows, RunConfig, SpacetimeConfig};
use crate::record::{ExperimentKind, ExperimentRecord, Point};
use crate::AnalysisError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decoder {
    Marginal,
    Minweight,
}

/// Worker count from `RCQEC_THREADS`, else the available parallelism.
pub fn worker_count() -> usize {
    std::env::var("RCQEC_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// `f(0..count)` in order, on `threads` workers.
pub fn map_trials<T, F>(count: usize, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if threads <= 1 {
        return (0..count).map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(|| (0..count).into_par_iter().map(&f).collect()),
        Err(_) => (0..count).map(f).collect(),
    }
}

fn collect<T>(results: Vec<Result<T, AnalysisError>>) -> Result<Vec<T>, AnalysisError> {
    results.into_iter().collect()
}

/// I.i.d. depolarizing error: X, Y, Z each with probability `p/3`.
pub fn depolarizing<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> PauliOperator {
    let mut e = PauliOperator::identity(n);
    for q in 0..n {
        if rng.random::<f64>() < p {
            e.set_letter(q, Pauli::NON_IDENTITY[rng.random_range(0..3usize)]);
        }
    }
    e
}

/// Fraction of logical qubits decoded into the wrong class, for one
/// open-boundary code and one depolarizing error.
pub fn code_capacity_trial<R: Rng + ?Sized>(
    n: usize,
    rate: f64,
    d: usize,
    p: f64,
    decoder: Decoder,
    rng: &mut R,
) -> Result<f64, AnalysisError> {
    let code = CircuitCode::random(n, rate, d, Boundary::Open, false, rng)?;
    let e = depolarizing(code.num_qubits(), p, rng);
    let k = code.num_logicals();
    if p == 0.0 {
        return Ok(0.0);
    }
    let s = code.syndrome(&e)?;
    let failed = match decoder {
        Decoder::Minweight => {
            let mut r = minimum_weight_decode(&code, &s)?;
            r.mul_assign_right(&e);
            code.logical_action(&r).into_iter().filter(|&(x, z)| x || z).count()
        }
        Decoder::Marginal => {
            let classes = marginal_decode(&code, &s, p)?;
            let mut rel = code.canonical_error(&s)?;
            rel.mul_assign_right(&e);
            code.logical_action(&rel)
                .into_iter()
                .zip(classes)
                .filter(|&((x, z), c)| Pauli::from_bits(x, z) != c)
                .count()
        }
    };
    Ok(failed as f64 / k as f64)
}

/// 1 if the spacetime erasure decoder fails on a fresh code, else 0.
pub fn spacetime_trial<R: Rng + ?Sized>(
    n: usize,
    rate: f64,
    d: usize,
    ec_rounds: usize,
    rows: RowSet,
    p: f64,
    rng: &mut R,
) -> Result<f64, AnalysisError> {
    let code = CircuitCode::random(n, rate, d, Boundary::Periodic, true, rng)?;
    let protocol = build_protocol(&code, d, ec_rounds, rows)?;
    Ok(if decode_trial(&protocol, p, rng).failed { 1.0 } else { 0.0 })
}

fn code_capacity(c: &CodeCapacityConfig, seed: u64, batches: usize, threads: usize) -> Result<Vec<Point>, AnalysisError> {
    let mut points = Vec::new();
    for (di, &d) in c.depths.iter().enumerate() {
        for (pi, &p) in c.p_grid.iter().enumerate() {
            let samples = collect(map_trials(c.trials, threads, |t| {
                code_capacity_trial(c.n, c.rate, d, p, c.decoder, &mut trial_rng(seed, di, pi, t))
            }))?;
            points.push(Point::from_samples(d, p, &samples, batches));
        }
    }
    Ok(points)
}

fn entropy(c: &EntropyConfig, seed: u64, batches: usize, threads: usize) -> Result<Vec<Point>, AnalysisError> {
    let q_max = c.qs.iter().copied().max().unwrap_or(0);
    let mut per_q: Vec<Vec<Point>> = vec![Vec::new(); c.qs.len()];
    for (pi, &p) in c.p_grid.iter().enumerate() {
        let runs = collect(map_trials(c.trials, threads, |t| {
            entropy_trial(c.n, c.rate, c.d, q_max, &c.qs, p, &mut trial_rng(seed, 0, pi, t)).map_err(AnalysisError::from)
        }))?;
        for (qi, &q) in c.qs.iter().enumerate() {
            let samples: Vec<f64> = runs.iter().map(|r| r[qi] as f64 / c.n as f64).collect();
            per_q[qi].push(Point::from_samples(q, p, &samples, batches));
        }
    }
    Ok(per_q.into_iter().flatten().collect())
}

fn mutual_info(c: &MutualInfoConfig, seed: u64, batches: usize, threads: usize) -> Result<Vec<Point>, AnalysisError> {
    let k = (c.n as f64 * c.rate + 1e-9).floor();
    let mut points = Vec::new();
    for (di, &d) in c.depths.iter().enumerate() {
        for (pi, &p) in c.p_grid.iter().enumerate() {
            let samples = collect(map_trials(c.trials, threads, |t| {
                mutual_info_trial(c.n, c.rate, d, d, c.rounds, p, &mut trial_rng(seed, di, pi, t))
                    .map(|i| i as f64 / k)
                    .map_err(AnalysisError::from)
            }))?;
            points.push(Point::from_samples(d, p, &samples, batches));
        }
    }
    Ok(points)
}

fn spacetime(c: &SpacetimeConfig, seed: u64, batches: usize, threads: usize) -> Result<Vec<Point>, AnalysisError> {
    let rows = match c.rows {
        OutcomeRows::State => RowSet::StateStabilizers,
        OutcomeRows::Code => RowSet::CodeStabilizers,
    };
    let mut points = Vec::new();
    for (di, &d) in c.depths.iter().enumerate() {
        for (pi, &p) in c.p_grid.iter().enumerate() {
            let samples = collect(map_trials(c.trials, threads, |t| {
                spacetime_trial(c.n, c.rate, d, c.ec_rounds, rows, p, &mut trial_rng(seed, di, pi, t))
            }))?;
            points.push(Point::from_samples(d, p, &samples, batches));
        }
    }
    Ok(points)
}

pub fn kind_of(experiment: &ExperimentConfig) -> ExperimentKind {
    match experiment {
        ExperimentConfig::CodeCapacity(c) => match c.decoder {
            Decoder::Marginal => ExperimentKind::CodeCapacityMarginal,
            Decoder::Minweight => ExperimentKind::CodeCapacityMinweight,
        },
        ExperimentConfig::Entropy(_) => ExperimentKind::Entropy,
        ExperimentConfig::MutualInfo(_) => ExperimentKind::MutualInfo,
        ExperimentConfig::Spacetime(_) => ExperimentKind::SpacetimeFailure,
    }
}

/// Runs the configured experiment on `threads` workers. The record's
/// config hash is left empty.
pub fn run_experiment(cfg: &RunConfig, threads: usize) -> Result<ExperimentRecord, AnalysisError> {
    cfg.validate()?;
    let (seed, b) = (cfg.seed, cfg.batches);
    let points = match &cfg.experiment {
        ExperimentConfig::CodeCapacity(c) => code_capacity(c, seed, b, threads)?,
        ExperimentConfig::Entropy(c) => entropy(c, seed, b, threads)?,
        ExperimentConfig::MutualInfo(c) => mutual_info(c, seed, b, threads)?,
        ExperimentConfig::Spacetime(c) => spacetime(c, seed, b, threads)?,
    };
    Ok(ExperimentRecord::new(kind_of(&cfg.experiment), seed, points))
}
