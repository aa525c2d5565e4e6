//! Multi-round runs, convergence detection, and batches of seeded
//! instantiations.
//!
//! A run advances round by round until the master's audit probability first
//! lands on its floor (the convergence round), then keeps going for
//! `post_convergence_horizon` more rounds so that post-convergence
//! correctness can be observed. `max_rounds` bounds only the search for
//! convergence; a run that converges always completes its horizon.

mod stats;
mod theorems;

pub use stats::{AggregateStats, Summary};
pub use theorems::{check_theorem_1, check_theorem_2, Expectation, TheoremReport, Verdict};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::master::{Accepted, MasterState, RoundOutcome};
use crate::model::{RandomStream, ScenarioConfig, WorkerId, WorkerSpec, WorkerType};
use crate::worker::WorkerState;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkerSnapshot {
    pub worker_id: WorkerId,
    pub worker_type: WorkerType,
    pub cheat_prob: f64,
    pub rho_rs: f64,
    pub rho_tr: f64,
    pub rho: f64,
}

/// Everything observable about one round. Snapshots cover the selected
/// workers and are taken after all of the round's updates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round_index: u64,
    pub outcome: RoundOutcome,
    pub snapshots: Vec<WorkerSnapshot>,
}

impl RoundRecord {
    pub fn audit_prob_before(&self) -> f64 {
        self.outcome.audit_prob_before
    }

    pub fn audit_prob_after(&self) -> f64 {
        self.outcome.audit_prob_after
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub seed: u64,
    /// `None` when `max_rounds` elapsed without convergence.
    pub convergence_round: Option<u64>,
    /// Audited rounds up to and including convergence (all rounds when the
    /// run did not converge).
    pub audits_to_convergence: u64,
    pub incorrect_before_convergence: u64,
    pub incorrect_after_convergence: u64,
    pub empty_rounds_after_convergence: u64,
    /// Set when the run never converged or accepted WRONG/NONE after
    /// convergence.
    pub eventual_correctness_violated: bool,
}

impl RunMetrics {
    pub fn converged(&self) -> bool {
        self.convergence_round.is_some()
    }

    pub fn not_converged(&self) -> bool {
        self.convergence_round.is_none()
    }

    /// A converged run that accepted WRONG or NONE after convergence.
    pub fn post_convergence_violation(&self) -> bool {
        self.converged()
            && (self.incorrect_after_convergence > 0 || self.empty_rounds_after_convergence > 0)
    }
}

/// One run's mutable state bundle.
pub struct Simulation {
    master: MasterState,
    workers: Vec<WorkerState>,
    rng: RandomStream,
    round: u64,
}

impl Simulation {
    /// Expects a config that passed validation.
    pub fn new(config: &ScenarioConfig, seed: u64) -> Self {
        let mut rng = RandomStream::from_seed(seed);
        let mut specs: Vec<WorkerSpec> = config.workers.clone();
        specs.sort_by_key(|w| w.worker_id);
        let spread = config.aspiration_spread;
        let workers = specs
            .into_iter()
            .map(|spec| {
                let mut w = WorkerState::new(spec);
                if spread > 0.0 {
                    w.aspiration = rng
                        .uniform_in(w.aspiration - spread, w.aspiration + spread)
                        .max(0.0);
                }
                w
            })
            .collect();
        Self {
            master: MasterState::new(config.mechanism, config.payoffs),
            workers,
            rng,
            round: 0,
        }
    }

    pub fn master(&self) -> &MasterState {
        &self.master
    }

    pub fn workers(&self) -> &[WorkerState] {
        &self.workers
    }

    pub fn step(&mut self) -> RoundRecord {
        self.round += 1;
        let outcome = self.master.run_round(&mut self.workers, &mut self.rng);
        let snapshots = outcome
            .selected
            .iter()
            .map(|&id| WorkerSnapshot {
                worker_id: id,
                worker_type: self.workers[id].worker_type(),
                cheat_prob: self.workers[id].cheat_prob,
                rho_rs: self.master.responsiveness(id),
                rho_tr: self.master.truthfulness(id),
                rho: self.master.reputation(id),
            })
            .collect();
        RoundRecord {
            round_index: self.round,
            outcome,
            snapshots,
        }
    }
}

struct MetricsTracker {
    metrics: RunMetrics,
    audit_prob_min: f64,
    horizon: u64,
    max_rounds: u64,
    last_round: u64,
}

impl MetricsTracker {
    fn new(config: &ScenarioConfig, seed: u64) -> Self {
        Self {
            metrics: RunMetrics {
                seed,
                convergence_round: None,
                audits_to_convergence: 0,
                incorrect_before_convergence: 0,
                incorrect_after_convergence: 0,
                empty_rounds_after_convergence: 0,
                eventual_correctness_violated: false,
            },
            audit_prob_min: config.mechanism.audit_prob_min,
            horizon: config.post_convergence_horizon,
            max_rounds: config.max_rounds,
            last_round: 0,
        }
    }

    fn observe(&mut self, rec: &RoundRecord) {
        debug_assert_eq!(rec.round_index, self.last_round + 1);
        self.last_round = rec.round_index;
        let m = &mut self.metrics;
        let out = &rec.outcome;
        match m.convergence_round {
            None => {
                if out.audited {
                    m.audits_to_convergence += 1;
                }
                if out.accepted == Accepted::Wrong {
                    m.incorrect_before_convergence += 1;
                }
                if out.audit_prob_after == self.audit_prob_min {
                    m.convergence_round = Some(rec.round_index);
                }
            }
            Some(_) => match out.accepted {
                Accepted::Wrong => m.incorrect_after_convergence += 1,
                Accepted::Empty => m.empty_rounds_after_convergence += 1,
                Accepted::Correct => {}
            },
        }
    }

    fn done(&self) -> bool {
        match self.metrics.convergence_round {
            Some(c) => self.last_round >= c + self.horizon,
            None => self.last_round >= self.max_rounds,
        }
    }

    fn finish(mut self) -> RunMetrics {
        let m = &mut self.metrics;
        m.eventual_correctness_violated = m.convergence_round.is_none()
            || m.incorrect_after_convergence > 0
            || m.empty_rounds_after_convergence > 0;
        self.metrics
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: Vec<RoundRecord>,
    pub metrics: RunMetrics,
}

/// Runs one instantiation and keeps its full round trace.
pub fn run_single(config: &ScenarioConfig, seed: u64) -> Result<RunOutput> {
    let mut records = Vec::new();
    let metrics = run_single_with(config, seed, |r| records.push(r.clone()))?;
    Ok(RunOutput { records, metrics })
}

/// Runs one instantiation, handing each round to `observer` instead of
/// storing it.
pub fn run_single_with<F>(config: &ScenarioConfig, seed: u64, mut observer: F) -> Result<RunMetrics>
where
    F: FnMut(&RoundRecord),
{
    config.ensure_valid()?;
    let mut sim = Simulation::new(config, seed);
    let mut tracker = MetricsTracker::new(config, seed);
    while !tracker.done() {
        let rec = sim.step();
        tracker.observe(&rec);
        observer(&rec);
    }
    Ok(tracker.finish())
}

/// Number of trailing rounds that accepted CORRECT.
pub fn trailing_correct_rounds(records: &[RoundRecord]) -> usize {
    records
        .iter()
        .rev()
        .take_while(|r| r.outcome.accepted == Accepted::Correct)
        .count()
}

#[derive(Debug, Clone, Copy)]
pub struct BatchOptions {
    /// Worker threads; 0 or 1 runs sequentially.
    pub parallelism: usize,
    pub keep_traces: bool,
}

impl Default for BatchOptions {
    fn default() -> Self {
        Self {
            parallelism: 1,
            keep_traces: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BatchResult {
    /// In instantiation (seed) order.
    pub runs: Vec<RunMetrics>,
    pub stats: AggregateStats,
    /// Per-run traces, only when requested.
    pub traces: Vec<Vec<RoundRecord>>,
}

pub fn run_batch(config: &ScenarioConfig) -> Result<BatchResult> {
    run_batch_with(config, BatchOptions::default())
}

/// Runs `num_instantiations` runs seeded `base_seed + k`. Results are
/// identical regardless of `parallelism`.
pub fn run_batch_with(config: &ScenarioConfig, opts: BatchOptions) -> Result<BatchResult> {
    config.ensure_valid()?;
    let seeds: Vec<u64> = (0..config.num_instantiations)
        .map(|k| RandomStream::instantiation_seed(config.base_seed, k))
        .collect();
    let one = |seed: u64| -> Result<(RunMetrics, Vec<RoundRecord>)> {
        if opts.keep_traces {
            let out = run_single(config, seed)?;
            Ok((out.metrics, out.records))
        } else {
            Ok((run_single_with(config, seed, |_| {})?, Vec::new()))
        }
    };

    let results: Vec<Result<(RunMetrics, Vec<RoundRecord>)>> = if opts.parallelism > 1 {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.parallelism)
            .build()
            .expect("thread pool");
        pool.install(|| seeds.par_iter().map(|&s| one(s)).collect())
    } else {
        seeds.iter().map(|&s| one(s)).collect()
    };

    let mut runs = Vec::with_capacity(results.len());
    let mut traces = Vec::new();
    for r in results {
        let (m, t) = r?;
        runs.push(m);
        if opts.keep_traces {
            traces.push(t);
        }
    }
    let stats = AggregateStats::from_runs(&runs);
    Ok(BatchResult {
        runs,
        stats,
        traces,
    })
}
