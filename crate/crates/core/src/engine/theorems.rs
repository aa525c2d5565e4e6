//! Statistical checks of the eventual-correctness results for pools made
//! only of altruistic and malicious workers.

use serde::{Deserialize, Serialize};

use super::{run_batch_with, BatchOptions};
use crate::error::{Error, Result};
use crate::model::{ReputationType, ScenarioConfig, WorkerType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
}

/// What a passing batch is supposed to show.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Expectation {
    /// No converged run accepts WRONG or NONE after convergence.
    ViolationFree,
    /// At least one converged run does.
    SomeViolations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub verdict: Verdict,
    pub expectation: Expectation,
    pub runs: usize,
    pub converged: usize,
    pub violating_runs: usize,
    /// `violating_runs / converged`, 0 when nothing converged.
    pub violating_fraction: f64,
}

fn check_pool(config: &ScenarioConfig) -> Result<()> {
    if config
        .workers
        .iter()
        .any(|w| w.worker_type == WorkerType::Rational)
    {
        return Err(Error::Inapplicable(
            "pool must contain only altruistic and malicious workers".into(),
        ));
    }
    if !config
        .workers
        .iter()
        .any(|w| w.worker_type == WorkerType::Altruistic && w.availability == 1.0)
    {
        return Err(Error::Inapplicable(
            "pool needs at least one altruistic worker with availability 1".into(),
        ));
    }
    Ok(())
}

fn evaluate(
    config: &ScenarioConfig,
    expectation: Expectation,
    parallelism: usize,
) -> Result<TheoremReport> {
    let batch = run_batch_with(
        config,
        BatchOptions {
            parallelism,
            keep_traces: false,
        },
    )?;
    let converged = batch.stats.converged;
    let violating = batch.stats.violating_runs;
    let fraction = if converged == 0 {
        0.0
    } else {
        violating as f64 / converged as f64
    };
    let pass = match expectation {
        Expectation::ViolationFree => violating == 0,
        Expectation::SomeViolations => violating > 0,
    };
    Ok(TheoremReport {
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        expectation,
        runs: batch.runs.len(),
        converged,
        violating_runs: violating,
        violating_fraction: fraction,
    })
}

/// Linear/exponential truthfulness with an always-available altruist:
/// every converged run must stay correct after convergence.
pub fn check_theorem_1(config: &ScenarioConfig, parallelism: usize) -> Result<TheoremReport> {
    check_pool(config)?;
    if config.mechanism.reputation_type == ReputationType::Boinc {
        return Err(Error::Inapplicable(
            "reputation type must be LINEAR or EXPONENTIAL".into(),
        ));
    }
    evaluate(config, Expectation::ViolationFree, parallelism)
}

/// BOINC truthfulness: correctness holds exactly when fewer than `n`
/// altruists are partially available. In the other case the batch passes
/// if some run shows the failure.
pub fn check_theorem_2(config: &ScenarioConfig, parallelism: usize) -> Result<TheoremReport> {
    check_pool(config)?;
    if config.mechanism.reputation_type != ReputationType::Boinc {
        return Err(Error::Inapplicable("reputation type must be BOINC".into()));
    }
    let partial_altruists = config
        .workers
        .iter()
        .filter(|w| w.worker_type == WorkerType::Altruistic && w.availability < 1.0)
        .count();
    let expectation = if partial_altruists < config.mechanism.select_n {
        Expectation::ViolationFree
    } else {
        Expectation::SomeViolations
    };
    evaluate(config, expectation, parallelism)
}
