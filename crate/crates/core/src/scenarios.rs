//! Built-in scenario presets.
//!
//! Two families share the baseline parameters (aspiration 0.1, learning
//! rates 0.1, tau 0.5, audit floor 0.01, epsilon 0.5, WPc 0, WCt 0.1, WBy 1,
//! initial cheat probability 0.5, n = 5, 100 instantiations):
//!
//! * full availability: pool size 5, 9 or 99 crossed with a
//!   rational/malicious ratio of 5/4, 4/5 or 1/8, named like `p99-r1m8`;
//! * partial availability on a pool of 9: `S1` to `S6`.
//!
//! Each preset is a generator taking the reputation type and the initial
//! audit probability.

use crate::error::{Error, Result};
use crate::model::{ReputationType, ScenarioConfig, SelectionPolicy, WorkerSpec, WorkerType};

pub const POOL_SIZES: [usize; 3] = [5, 9, 99];
/// (rational, malicious) ratios.
pub const RATIOS: [(usize, usize); 3] = [(5, 4), (4, 5), (1, 8)];
pub const INITIAL_AUDIT_PROBS: [f64; 2] = [0.5, 1.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PresetParams {
    pub reputation: ReputationType,
    pub audit_prob_initial: f64,
}

impl Default for PresetParams {
    fn default() -> Self {
        Self {
            reputation: ReputationType::Linear,
            audit_prob_initial: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Composition {
    /// (worker type, availability, count) groups, ids assigned in order.
    Groups(Vec<(WorkerType, f64, usize)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioPreset {
    pub name: String,
    pub description: String,
    composition: Composition,
}

impl ScenarioPreset {
    pub fn generate(&self, params: PresetParams) -> ScenarioConfig {
        let Composition::Groups(groups) = &self.composition;
        let mut workers = Vec::new();
        for &(t, d, count) in groups {
            for _ in 0..count {
                workers.push(WorkerSpec::new(workers.len(), t, d));
            }
        }
        let pool_size = workers.len();
        let mut cfg = ScenarioConfig::baseline(workers, params.reputation);
        cfg.mechanism.audit_prob_initial = params.audit_prob_initial;
        if cfg.mechanism.select_n >= pool_size {
            // The whole pool is chosen every round, which is what a frozen
            // selection of all N workers does.
            cfg.mechanism.select_n = pool_size;
            cfg.mechanism.selection_policy = SelectionPolicy::FixedRandom;
        }
        cfg
    }

    pub fn pool_size(&self) -> usize {
        let Composition::Groups(groups) = &self.composition;
        groups.iter().map(|g| g.2).sum()
    }
}

/// Splits a pool of `size` by a rational/malicious ratio, keeping at least
/// one worker of each type.
pub fn split_pool(size: usize, (rational, malicious): (usize, usize)) -> (usize, usize) {
    let share = size as f64 * rational as f64 / (rational + malicious) as f64;
    let r = (share.round() as usize).clamp(1, size - 1);
    (r, size - r)
}

fn preset(
    name: &str,
    description: String,
    groups: Vec<(WorkerType, f64, usize)>,
) -> ScenarioPreset {
    ScenarioPreset {
        name: name.to_string(),
        description,
        composition: Composition::Groups(groups),
    }
}

pub fn list_scenarios() -> Vec<ScenarioPreset> {
    use WorkerType::*;
    let mut out = Vec::new();
    for size in POOL_SIZES {
        for ratio in RATIOS {
            let (r, m) = split_pool(size, ratio);
            out.push(preset(
                &format!("p{size}-r{}m{}", ratio.0, ratio.1),
                format!(
                    "pool of {size}, rational/malicious {}/{} ({r} rational, {m} malicious), d=1",
                    ratio.0, ratio.1
                ),
                vec![(Rational, 1.0, r), (Malicious, 1.0, m)],
            ));
        }
    }
    out.push(preset(
        "S1",
        "9 altruistic with d=1".into(),
        vec![(Altruistic, 1.0, 9)],
    ));
    out.push(preset(
        "S2",
        "1 altruistic with d=1 and 8 altruistic with d=0.5".into(),
        vec![(Altruistic, 1.0, 1), (Altruistic, 0.5, 8)],
    ));
    out.push(preset(
        "S3",
        "1 altruistic with d=1 and 8 malicious with d=0.5".into(),
        vec![(Altruistic, 1.0, 1), (Malicious, 0.5, 8)],
    ));
    out.push(preset(
        "S4",
        "9 rational with d=1".into(),
        vec![(Rational, 1.0, 9)],
    ));
    out.push(preset(
        "S5",
        "1 rational with d=1 and 8 rational with d=0.5".into(),
        vec![(Rational, 1.0, 1), (Rational, 0.5, 8)],
    ));
    out.push(preset(
        "S6",
        "1 rational with d=1 and 8 malicious with d=0.5".into(),
        vec![(Rational, 1.0, 1), (Malicious, 0.5, 8)],
    ));
    out
}

pub fn find_scenario(name: &str) -> Result<ScenarioPreset> {
    let all = list_scenarios();
    all.iter()
        .find(|p| p.name.eq_ignore_ascii_case(name))
        .cloned()
        .ok_or_else(|| Error::UnknownScenario {
            name: name.to_string(),
            valid: all.iter().map(|p| p.name.clone()).collect(),
        })
}

/// Every preset under every reputation type and initial audit probability.
pub fn expanded_catalog() -> Vec<(ScenarioPreset, PresetParams)> {
    let mut out = Vec::new();
    for p in list_scenarios() {
        for reputation in ReputationType::ALL {
            for audit_prob_initial in INITIAL_AUDIT_PROBS {
                out.push((
                    p.clone(),
                    PresetParams {
                        reputation,
                        audit_prob_initial,
                    },
                ));
            }
        }
    }
    out
}
