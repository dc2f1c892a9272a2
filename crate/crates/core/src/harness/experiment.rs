use rayon::prelude::*;

use super::config::ExperimentConfig;
use crate::engine::{NoiseParams, SimState, StandardGossip};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::SimStreams;
use crate::theory::{initial_dual_gap, GraphRates, RateReport};

/// Relative errors below this are recorded as exactly zero.
pub const RELATIVE_ERROR_FLOOR: f64 = 1e-30;

pub const THREADS_ENV: &str = "GOSSIP_THREADS";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub t: u64,
    pub mean_rel_err: f64,
    pub min_rel_err: f64,
    pub max_rel_err: f64,
    pub mean_drift_sq: f64,
    /// Expected-gap bound divided by the initial gap, averaged over seeds.
    pub bound: f64,
    pub baseline_rel_err: f64,
}

/// Seed-averaged metrics at each recorded iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub label: String,
    pub config: String,
    pub rows: Vec<TraceRow>,
}

impl Trace {
    pub fn times(&self) -> Vec<u64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    pub fn mean_rel_err(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.mean_rel_err).collect()
    }

    pub fn baseline_rel_err(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.baseline_rel_err).collect()
    }
}

/// Everything an experiment produced besides the trace itself.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub trace: Trace,
    pub graph: Graph,
    pub graph_seed: Option<u64>,
    pub params: NoiseParams,
    pub rates: RateReport,
}

/// Iterations at which metrics are recorded: `0, stride, 2*stride, ..., k`.
pub fn record_times(k: u64, stride: u64) -> Vec<u64> {
    let mut times: Vec<u64> = (0..=k).step_by(stride as usize).collect();
    if *times.last().unwrap() != k {
        times.push(k);
    }
    times
}

struct SeedRun {
    rel: Vec<f64>,
    drift_sq: Vec<f64>,
    baseline: Vec<f64>,
    inv_gap0: f64,
}

fn simulate_seed(
    graph: &Graph,
    params: &NoiseParams,
    cfg: &ExperimentConfig,
    times: &[u64],
    seed: u64,
) -> Result<SeedRun> {
    let streams = SimStreams::from_seed(seed);
    let c = cfg.init.generate(graph.n(), &mut streams.init_stream())?;
    let gap0 = initial_dual_gap(&c);

    let mut sim = SimState::init(graph, c.clone(), params.clone())?;
    sim.relative_error()?;
    let norm = sim.initial_squared_error();
    let target = sim.target();
    let mut base = StandardGossip::new(graph, c)?;

    let mut rel = Vec::with_capacity(times.len());
    let mut drift_sq = Vec::with_capacity(times.len());
    let mut baseline = Vec::with_capacity(times.len());
    let base_sq = |b: &StandardGossip| {
        b.values()
            .iter()
            .map(|v| (v - target) * (v - target))
            .sum::<f64>()
    };

    let mut record = |sim: &SimState, base: &StandardGossip| {
        rel.push(sim.squared_error() / norm);
        drift_sq.push(sim.mean_drift().powi(2));
        baseline.push(base_sq(base) / norm);
    };
    record(&sim, &base);
    for &t in &times[1..] {
        while sim.iteration() < t {
            sim.step(&streams)?;
            base.step(&streams)?;
        }
        record(&sim, &base);
    }
    Ok(SeedRun {
        rel,
        drift_sq,
        baseline,
        inv_gap0: 1.0 / gap0,
    })
}

fn thread_count(cfg: &ExperimentConfig) -> usize {
    cfg.threads
        .or_else(|| std::env::var(THREADS_ENV).ok()?.trim().parse().ok())
        .unwrap_or(0)
}

fn floor(v: f64) -> f64 {
    if v < RELATIVE_ERROR_FLOOR {
        0.0
    } else {
        v
    }
}

/// Runs `cfg.seeds` independent simulations (seeds `base_seed..base_seed+R`)
/// plus a noiseless baseline on each seed's edge sequence, and averages them.
///
/// Seeds run in parallel; the reduction is in seed order so the result does
/// not depend on scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let built = cfg.graph.build()?;
    let graph = built.graph;
    let rates = GraphRates::new(&graph)?;
    let params = cfg.noise_params(&graph, &rates)?;
    let report = rates.rate_report(&params)?;
    let times = record_times(cfg.iterations, cfg.stride);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count(cfg))
        .build()
        .map_err(|e| Error::Setup(format!("thread pool: {e}")))?;
    let runs: Vec<SeedRun> = pool.install(|| {
        (0..cfg.seeds as u64)
            .into_par_iter()
            .map(|s| simulate_seed(&graph, &params, cfg, &times, cfg.base_seed.wrapping_add(s)))
            .collect::<Result<_>>()
    })?;

    let horizon =
        usize::try_from(cfg.iterations).map_err(|_| Error::invalid("iteration count too large"))?;
    let curve = rates.theorem_bound(horizon, &params, 0.0)?;
    let mean_inv_gap0 = runs.iter().map(|r| r.inv_gap0).sum::<f64>() / runs.len() as f64;
    let rho = rates.rho();

    let r = runs.len() as f64;
    let rows = times
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let mut sum = 0.0;
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            let mut drift = 0.0;
            let mut base = 0.0;
            for run in &runs {
                sum += run.rel[k];
                lo = lo.min(run.rel[k]);
                hi = hi.max(run.rel[k]);
                drift += run.drift_sq[k];
                base += run.baseline[k];
            }
            let noise_part = if t == 0 {
                0.0
            } else {
                curve.values[t as usize - 1]
            };
            TraceRow {
                t,
                mean_rel_err: floor(sum / r),
                min_rel_err: floor(lo),
                max_rel_err: floor(hi),
                mean_drift_sq: drift / r,
                bound: rho.powi(t as i32) + noise_part * mean_inv_gap0,
                baseline_rel_err: floor(base / r),
            }
        })
        .collect();

    let mut config = cfg.describe();
    if let Some(s) = built.seed_used {
        config.push_str(&format!(" graph_seed_used={s}"));
    }
    config.push_str(&format!(" n={} m={}", graph.n(), graph.m()));

    Ok(ExperimentOutcome {
        trace: Trace {
            label: format!("phi={}", cfg.phi),
            config,
            rows,
        },
        graph,
        graph_seed: built.seed_used,
        params,
        rates: report,
    })
}
