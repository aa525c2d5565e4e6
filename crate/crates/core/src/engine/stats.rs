use serde::{Deserialize, Serialize};

use super::RunMetrics;

/// Order statistics and moments of one metric across runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
    /// Population standard deviation.
    pub std: f64,
    pub q1: f64,
    pub q3: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        Some(Self {
            min: v[0],
            max: v[v.len() - 1],
            mean,
            median: quantile(&v, 0.5),
            std: var.sqrt(),
            q1: quantile(&v, 0.25),
            q3: quantile(&v, 0.75),
        })
    }

    pub fn iqr(&self) -> f64 {
        self.q3 - self.q1
    }
}

/// Linear interpolation between closest ranks; `sorted` must be non-empty.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Per-metric statistics over the converged runs of a batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub instantiations: usize,
    /// Runs that converged; every summary below is over these only.
    pub converged: usize,
    pub not_converged: usize,
    /// Converged runs that accepted WRONG or NONE after convergence.
    pub violating_runs: usize,
    pub rounds: Option<Summary>,
    pub audits: Option<Summary>,
    pub incorrect_before: Option<Summary>,
    pub incorrect_after: Option<Summary>,
    pub empty_after: Option<Summary>,
}

impl AggregateStats {
    pub fn from_runs(runs: &[RunMetrics]) -> Self {
        let conv: Vec<&RunMetrics> = runs.iter().filter(|r| r.converged()).collect();
        let col = |f: fn(&RunMetrics) -> u64| -> Option<Summary> {
            let v: Vec<f64> = conv.iter().map(|r| f(r) as f64).collect();
            Summary::of(&v)
        };
        Self {
            instantiations: runs.len(),
            converged: conv.len(),
            not_converged: runs.len() - conv.len(),
            violating_runs: conv
                .iter()
                .filter(|r| r.post_convergence_violation())
                .count(),
            rounds: col(|r| r.convergence_round.unwrap_or(0)),
            audits: col(|r| r.audits_to_convergence),
            incorrect_before: col(|r| r.incorrect_before_convergence),
            incorrect_after: col(|r| r.incorrect_after_convergence),
            empty_after: col(|r| r.empty_rounds_after_convergence),
        }
    }
}
