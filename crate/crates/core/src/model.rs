//! Domain types, scenario configuration and the seeded randomness contract.
//!
//! Everything here is immutable once a run starts. A [`ScenarioConfig`] is the
//! unit of experiment: a worker pool, the payoff schedule, the master's
//! mechanism parameters, and the seeding/horizon plumbing for a batch of
//! independent instantiations.
//!
//! Configs are stored as TOML. Field names in the file match the struct field
//! names, except where the conventional symbol carries capitals
//! (`pool_size_N`, `punishment_WPc`, `task_cost_WCt`, `reward_WBy`).

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type WorkerId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum WorkerType {
    Malicious,
    Altruistic,
    Rational,
}

impl fmt::Display for WorkerType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WorkerType::Malicious => "MALICIOUS",
            WorkerType::Altruistic => "ALTRUISTIC",
            WorkerType::Rational => "RATIONAL",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkerSpec {
    pub worker_id: WorkerId,
    pub worker_type: WorkerType,
    /// Probability that a selected worker replies within the round.
    pub availability: f64,
    pub aspiration: f64,
    pub initial_cheat_prob: f64,
    /// Per-worker override of `mechanism.worker_learning_rate_alpha_w`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub learning_rate: Option<f64>,
}

impl WorkerSpec {
    pub fn new(worker_id: WorkerId, worker_type: WorkerType, availability: f64) -> Self {
        Self {
            worker_id,
            worker_type,
            availability,
            aspiration: 0.1,
            initial_cheat_prob: 0.5,
            learning_rate: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffParams {
    #[serde(rename = "punishment_WPc")]
    pub punishment_wpc: f64,
    #[serde(rename = "task_cost_WCt")]
    pub task_cost_wct: f64,
    #[serde(rename = "reward_WBy")]
    pub reward_wby: f64,
}

impl Default for PayoffParams {
    fn default() -> Self {
        Self {
            punishment_wpc: 0.0,
            task_cost_wct: 0.1,
            reward_wby: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ReputationType {
    Linear,
    Exponential,
    Boinc,
}

impl ReputationType {
    pub const ALL: [ReputationType; 3] = [
        ReputationType::Linear,
        ReputationType::Exponential,
        ReputationType::Boinc,
    ];

    pub fn short(self) -> &'static str {
        match self {
            ReputationType::Linear => "L",
            ReputationType::Exponential => "E",
            ReputationType::Boinc => "B",
        }
    }
}

impl fmt::Display for ReputationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReputationType::Linear => "LINEAR",
            ReputationType::Exponential => "EXPONENTIAL",
            ReputationType::Boinc => "BOINC",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SelectionPolicy {
    /// Top-n by combined reputation, random tie-break, every round.
    Reputation,
    /// One uniform n-subset drawn in round 1 and reused forever.
    FixedRandom,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MechanismParams {
    #[serde(rename = "pool_size_N")]
    pub pool_size: usize,
    pub select_n: usize,
    pub audit_prob_initial: f64,
    pub audit_prob_min: f64,
    pub tolerance_tau: f64,
    pub master_learning_rate_alpha_m: f64,
    pub worker_learning_rate_alpha_w: f64,
    pub reputation_type: ReputationType,
    pub exponential_base_epsilon: f64,
    pub selection_policy: SelectionPolicy,
}

impl MechanismParams {
    /// Baseline mechanism for a pool of `pool_size` workers.
    pub fn baseline(pool_size: usize, reputation_type: ReputationType) -> Self {
        Self {
            pool_size,
            select_n: 5,
            audit_prob_initial: 0.5,
            audit_prob_min: 0.01,
            tolerance_tau: 0.5,
            master_learning_rate_alpha_m: 0.1,
            worker_learning_rate_alpha_w: 0.1,
            reputation_type,
            exponential_base_epsilon: 0.5,
            selection_policy: SelectionPolicy::Reputation,
        }
    }
}

pub const DEFAULT_INSTANTIATIONS: usize = 100;
pub const DEFAULT_MAX_ROUNDS: u64 = 50_000;
pub const DEFAULT_HORIZON: u64 = 500;
pub const DEFAULT_BASE_SEED: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub num_instantiations: usize,
    pub max_rounds: u64,
    pub post_convergence_horizon: u64,
    pub base_seed: u64,
    /// Half-width of the uniform jitter applied to each worker's aspiration
    /// at the start of a run. Zero keeps aspirations as written.
    #[serde(default)]
    pub aspiration_spread: f64,
    pub payoffs: PayoffParams,
    pub mechanism: MechanismParams,
    pub workers: Vec<WorkerSpec>,
}

impl ScenarioConfig {
    /// Builds a config around `workers` with baseline parameters everywhere else.
    pub fn baseline(workers: Vec<WorkerSpec>, reputation_type: ReputationType) -> Self {
        let mechanism = MechanismParams::baseline(workers.len(), reputation_type);
        Self {
            num_instantiations: DEFAULT_INSTANTIATIONS,
            max_rounds: DEFAULT_MAX_ROUNDS,
            post_convergence_horizon: DEFAULT_HORIZON,
            base_seed: DEFAULT_BASE_SEED,
            aspiration_spread: 0.0,
            payoffs: PayoffParams::default(),
            mechanism,
            workers,
        }
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        Ok(toml::from_str(s)?)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    /// Sets a single field addressed by a dotted path such as
    /// `mechanism.reputation_type` or `workers.3.availability`. Indices may
    /// also be written `workers[3].availability`, as diagnostics print them.
    ///
    /// `raw` is parsed as a TOML value; anything that does not parse is taken
    /// as a bare string, so `--set mechanism.reputation_type=BOINC` works
    /// without quoting.
    pub fn with_override(&self, path: &str, raw: &str) -> Result<Self> {
        let fail = |reason: String| Error::Override {
            path: path.to_string(),
            reason,
        };
        let mut root = toml::Value::try_from(self)?;
        let value = parse_toml_scalar(raw);

        let normalized = path.replace('[', ".").replace(']', "");
        let segments: Vec<&str> = normalized.split('.').collect();
        if segments.iter().any(|s| s.is_empty()) {
            return Err(fail("empty path segment".into()));
        }
        let (last, parents) = segments.split_last().expect("split on non-empty");
        let mut cursor = &mut root;
        for seg in parents {
            cursor = match cursor {
                toml::Value::Table(t) => t
                    .get_mut(*seg)
                    .ok_or_else(|| fail(format!("no field `{seg}`")))?,
                toml::Value::Array(a) => {
                    let idx: usize = seg
                        .parse()
                        .map_err(|_| fail(format!("`{seg}` is not an index")))?;
                    let len = a.len();
                    a.get_mut(idx)
                        .ok_or_else(|| fail(format!("index {idx} out of range ({len})")))?
                }
                _ => return Err(fail(format!("`{seg}` is not a table"))),
            };
        }
        match cursor {
            toml::Value::Table(t) => {
                let existing = t
                    .get(*last)
                    .ok_or_else(|| fail(format!("no field `{last}`")))?;
                t.insert(last.to_string(), coerce_like(existing, value));
            }
            toml::Value::Array(a) => {
                let idx: usize = last
                    .parse()
                    .map_err(|_| fail(format!("`{last}` is not an index")))?;
                let len = a.len();
                let slot = a
                    .get_mut(idx)
                    .ok_or_else(|| fail(format!("index {idx} out of range ({len})")))?;
                *slot = coerce_like(slot, value);
            }
            _ => return Err(fail("parent is not a table".into())),
        }
        root.try_into::<ScenarioConfig>()
            .map_err(|e| fail(e.to_string()))
    }

    pub fn validate(&self) -> Vec<Diagnostic> {
        validate_config(self)
    }

    pub fn errors(&self) -> Vec<Diagnostic> {
        self.validate()
            .into_iter()
            .filter(|d| d.severity == Severity::Error)
            .collect()
    }

    /// Fails with [`Error::Invalid`] when any error-level diagnostic exists.
    pub fn ensure_valid(&self) -> Result<()> {
        let errors = self.errors();
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(errors))
        }
    }
}

fn parse_toml_scalar(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => t
            .remove("v")
            .unwrap_or_else(|| toml::Value::String(raw.into())),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

/// Integer literals written where a float lives (`--pa-init 1`) are widened.
fn coerce_like(existing: &toml::Value, value: toml::Value) -> toml::Value {
    match (existing, value) {
        (toml::Value::Float(_), toml::Value::Integer(i)) => toml::Value::Float(i as f64),
        (_, v) => v,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub field: String,
    pub message: String,
}

impl Diagnostic {
    fn error(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            field: field.into(),
            message: message.into(),
        }
    }

    fn warning(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {}: {}", self.field, self.message)
    }
}

fn is_probability(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}

/// Checks every structural invariant of a config.
///
/// An empty result means the config is valid. The participation condition
/// (`reward_WBy - task_cost_WCt >= aspiration`) only produces warnings.
pub fn validate_config(config: &ScenarioConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let m = &config.mechanism;
    let p = &config.payoffs;

    if m.pool_size == 0 {
        out.push(Diagnostic::error(
            "mechanism.pool_size_N",
            "pool_size_N must be > 0",
        ));
    }
    if config.workers.len() != m.pool_size {
        out.push(Diagnostic::error(
            "workers",
            format!(
                "number of workers ({}) must equal pool_size_N ({})",
                config.workers.len(),
                m.pool_size
            ),
        ));
    }
    if m.select_n == 0 {
        out.push(Diagnostic::error(
            "mechanism.select_n",
            "select_n must be > 0",
        ));
    }
    match m.selection_policy {
        SelectionPolicy::Reputation if m.select_n >= m.pool_size => {
            out.push(Diagnostic::error(
                "mechanism.select_n",
                "select_n must be < pool_size_N",
            ));
        }
        SelectionPolicy::FixedRandom if m.select_n > m.pool_size => {
            out.push(Diagnostic::error(
                "mechanism.select_n",
                "select_n must be <= pool_size_N",
            ));
        }
        _ => {}
    }
    if !(m.audit_prob_min > 0.0 && m.audit_prob_min <= 1.0) {
        out.push(Diagnostic::error(
            "mechanism.audit_prob_min",
            "audit_prob_min must be in (0, 1]",
        ));
    }
    if !(m.audit_prob_initial >= m.audit_prob_min && m.audit_prob_initial <= 1.0) {
        out.push(Diagnostic::error(
            "mechanism.audit_prob_initial",
            "audit_prob_initial must be in [audit_prob_min, 1]",
        ));
    }
    if !is_probability(m.tolerance_tau) {
        out.push(Diagnostic::error(
            "mechanism.tolerance_tau",
            "tolerance_tau must be in [0, 1]",
        ));
    }
    if !(m.master_learning_rate_alpha_m > 0.0 && m.master_learning_rate_alpha_m.is_finite()) {
        out.push(Diagnostic::error(
            "mechanism.master_learning_rate_alpha_m",
            "master_learning_rate_alpha_m must be > 0",
        ));
    }
    if !(m.worker_learning_rate_alpha_w > 0.0 && m.worker_learning_rate_alpha_w.is_finite()) {
        out.push(Diagnostic::error(
            "mechanism.worker_learning_rate_alpha_w",
            "worker_learning_rate_alpha_w must be > 0",
        ));
    }
    if !(m.exponential_base_epsilon > 0.0 && m.exponential_base_epsilon < 1.0) {
        out.push(Diagnostic::error(
            "mechanism.exponential_base_epsilon",
            "exponential_base_epsilon must be in (0, 1)",
        ));
    }

    for (name, v) in [
        ("payoffs.punishment_WPc", p.punishment_wpc),
        ("payoffs.task_cost_WCt", p.task_cost_wct),
        ("payoffs.reward_WBy", p.reward_wby),
    ] {
        if !(v >= 0.0 && v.is_finite()) {
            out.push(Diagnostic::error(name, "must be a non-negative number"));
        }
    }

    if config.num_instantiations == 0 {
        out.push(Diagnostic::error(
            "num_instantiations",
            "num_instantiations must be > 0",
        ));
    }
    if config.max_rounds == 0 {
        out.push(Diagnostic::error("max_rounds", "max_rounds must be > 0"));
    }
    if config.post_convergence_horizon == 0 {
        out.push(Diagnostic::error(
            "post_convergence_horizon",
            "post_convergence_horizon must be > 0",
        ));
    }
    if !(config.aspiration_spread >= 0.0 && config.aspiration_spread.is_finite()) {
        out.push(Diagnostic::error(
            "aspiration_spread",
            "aspiration_spread must be >= 0",
        ));
    }

    let mut seen = BTreeSet::new();
    for (idx, w) in config.workers.iter().enumerate() {
        let field = |name: &str| format!("workers[{idx}].{name}");
        if !(w.availability > 0.0 && w.availability <= 1.0) {
            out.push(Diagnostic::error(
                field("availability"),
                "availability must be > 0 and <= 1",
            ));
        }
        if !is_probability(w.initial_cheat_prob) {
            out.push(Diagnostic::error(
                field("initial_cheat_prob"),
                "initial_cheat_prob must be in [0, 1]",
            ));
        }
        if !(w.aspiration >= 0.0 && w.aspiration.is_finite()) {
            out.push(Diagnostic::error(
                field("aspiration"),
                "aspiration must be >= 0",
            ));
        }
        if let Some(lr) = w.learning_rate {
            if !(lr > 0.0 && lr.is_finite()) {
                out.push(Diagnostic::error(
                    field("learning_rate"),
                    "learning_rate must be > 0",
                ));
            }
        }
        if w.worker_id >= config.workers.len() {
            out.push(Diagnostic::error(
                field("worker_id"),
                format!(
                    "worker_id {} outside [0, {})",
                    w.worker_id,
                    config.workers.len()
                ),
            ));
        }
        if !seen.insert(w.worker_id) {
            out.push(Diagnostic::error(
                field("worker_id"),
                format!("duplicate worker_id {}", w.worker_id),
            ));
        }
    }

    let max_aspiration = config
        .workers
        .iter()
        .map(|w| w.aspiration)
        .fold(0.0_f64, f64::max)
        + config.aspiration_spread.max(0.0);
    if p.reward_wby - p.task_cost_wct < max_aspiration {
        out.push(Diagnostic::warning(
            "payoffs",
            format!(
                "participation condition violated: reward_WBy - task_cost_WCt = {} < max aspiration {}",
                p.reward_wby - p.task_cost_wct,
                max_aspiration
            ),
        ));
    }

    out
}

/// Seeded generator owned by exactly one run.
///
/// Every Bernoulli draw consumes exactly one 64-bit output, so the draw
/// sequence depends only on the seed and the order of calls.
#[derive(Debug, Clone)]
pub struct RandomStream(ChaCha8Rng);

impl RandomStream {
    pub fn from_seed(seed: u64) -> Self {
        RandomStream(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Seed of instantiation `k` of a batch.
    pub fn instantiation_seed(base_seed: u64, k: usize) -> u64 {
        base_seed.wrapping_add(k as u64)
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.0.gen::<f64>()
    }

    /// `true` with probability `p`; `p >= 1` is always true, `p <= 0` never.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    pub fn key(&mut self) -> u64 {
        self.0.gen::<u64>()
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }
}
