//! The master's per-round mechanism: reputation-ranked selection,
//! probabilistic auditing, weighted-majority acceptance, payoffs and the
//! audit-probability controller.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{
    MechanismParams, PayoffParams, RandomStream, SelectionPolicy, WorkerId, WorkerType,
};
use crate::reputation::{ReputationLedger, ReputationScheme};
use crate::worker::{Reply, ReplyValue, WorkerState};

/// Value the master settles on for a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Accepted {
    #[serde(rename = "CORRECT")]
    Correct,
    #[serde(rename = "WRONG")]
    Wrong,
    /// Unaudited round with no replies.
    #[serde(rename = "NONE")]
    Empty,
}

impl Accepted {
    pub fn as_str(self) -> &'static str {
        match self {
            Accepted::Correct => "CORRECT",
            Accepted::Wrong => "WRONG",
            Accepted::Empty => "NONE",
        }
    }
}

impl From<ReplyValue> for Accepted {
    fn from(v: ReplyValue) -> Self {
        match v {
            ReplyValue::Correct => Accepted::Correct,
            ReplyValue::Wrong => Accepted::Wrong,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundOutcome {
    /// `W^r`, ascending.
    pub selected: Vec<WorkerId>,
    /// `R`, ascending.
    pub responders: Vec<WorkerId>,
    pub replies: Vec<Reply>,
    pub audited: bool,
    /// `F`; empty unless audited.
    pub cheaters_caught: Vec<WorkerId>,
    pub accepted: Accepted,
    /// Delivered payoffs, responders only.
    pub payoffs: BTreeMap<WorkerId, f64>,
    pub audit_prob_before: f64,
    pub audit_prob_after: f64,
}

#[derive(Debug, Clone)]
pub struct MasterState {
    pub audit_prob: f64,
    pub ledgers: Vec<ReputationLedger>,
    pub params: MechanismParams,
    pub payoffs: PayoffParams,
    pub fixed_selection: Option<Vec<WorkerId>>,
}

impl MasterState {
    pub fn new(params: MechanismParams, payoffs: PayoffParams) -> Self {
        Self {
            audit_prob: params.audit_prob_initial,
            ledgers: vec![ReputationLedger::default(); params.pool_size],
            params,
            payoffs,
            fixed_selection: None,
        }
    }

    pub fn scheme(&self) -> ReputationScheme {
        ReputationScheme::new(
            self.params.reputation_type,
            self.params.exponential_base_epsilon,
        )
    }

    pub fn responsiveness(&self, id: WorkerId) -> f64 {
        self.ledgers[id].responsiveness()
    }

    pub fn truthfulness(&self, id: WorkerId) -> f64 {
        self.ledgers[id].truthfulness(self.scheme())
    }

    pub fn reputation(&self, id: WorkerId) -> f64 {
        self.ledgers[id].combined(self.scheme())
    }

    /// Picks this round's `W^r`, returned in ascending id order.
    ///
    /// Under [`SelectionPolicy::Reputation`] every worker draws a random
    /// tie-break key and the pool is ranked by (reputation desc, key).
    /// Under [`SelectionPolicy::FixedRandom`] the first call draws a uniform
    /// subset the same way and every later call returns it unchanged.
    pub fn select_workers(&mut self, rng: &mut RandomStream) -> Vec<WorkerId> {
        match self.params.selection_policy {
            SelectionPolicy::Reputation => {
                let reps: Vec<f64> = (0..self.ledgers.len())
                    .map(|i| self.reputation(i))
                    .collect();
                top_n(&reps, self.params.select_n, rng)
            }
            SelectionPolicy::FixedRandom => {
                if let Some(fixed) = &self.fixed_selection {
                    return fixed.clone();
                }
                let flat = vec![1.0; self.ledgers.len()];
                let chosen = top_n(&flat, self.params.select_n, rng);
                self.fixed_selection = Some(chosen.clone());
                chosen
            }
        }
    }

    /// One Bernoulli(`audit_prob`) draw.
    pub fn decide_audit(&self, rng: &mut RandomStream) -> bool {
        rng.bernoulli(self.audit_prob)
    }

    /// Accepts the reply value whose responders carry the largest summed
    /// truthfulness; ties break uniformly at random. Returns the accepted
    /// value and the ids in the accepted group.
    pub fn accept_by_weighted_majority(
        &self,
        replies: &[Reply],
        rng: &mut RandomStream,
    ) -> (Accepted, Vec<WorkerId>) {
        let mut weights: BTreeMap<ReplyValue, f64> = BTreeMap::new();
        for r in replies {
            *weights.entry(r.value).or_insert(0.0) += self.truthfulness(r.worker_id);
        }
        let groups: Vec<(ReplyValue, f64)> = weights.into_iter().collect();
        match weighted_majority(&groups, rng) {
            None => (Accepted::Empty, Vec::new()),
            Some(value) => {
                let members = replies
                    .iter()
                    .filter(|r| r.value == value)
                    .map(|r| r.worker_id)
                    .collect();
                (value.into(), members)
            }
        }
    }

    /// Payoffs for responders. Audited rounds pay `WBy` to honest replies and
    /// `-WPc` to caught cheaters; unaudited rounds pay `WBy` to `rewarded`
    /// and 0 to every other responder. Non-responders get no entry.
    pub fn apply_payoffs(
        &self,
        replies: &[Reply],
        audited: bool,
        rewarded: &[WorkerId],
    ) -> BTreeMap<WorkerId, f64> {
        replies
            .iter()
            .map(|r| {
                let pay = if audited {
                    if r.was_cheat {
                        -self.payoffs.punishment_wpc
                    } else {
                        self.payoffs.reward_wby
                    }
                } else if rewarded.contains(&r.worker_id) {
                    self.payoffs.reward_wby
                } else {
                    0.0
                };
                (r.worker_id, pay)
            })
            .collect()
    }

    /// Summed truthfulness of all responders and of the caught cheaters,
    /// read from the ledgers as they currently stand.
    pub fn truthfulness_sums(&self, replies: &[Reply]) -> (f64, f64) {
        let responders: f64 = replies.iter().map(|r| self.truthfulness(r.worker_id)).sum();
        let caught: f64 = replies
            .iter()
            .filter(|r| r.was_cheat)
            .map(|r| self.truthfulness(r.worker_id))
            .sum();
        (responders, caught)
    }

    /// Audit-probability controller, applied on audited rounds only.
    pub fn update_audit_prob(&mut self, sum_responders: f64, sum_caught: f64) -> f64 {
        let alpha = self.params.master_learning_rate_alpha_m;
        self.audit_prob = if sum_responders == 0.0 {
            (self.audit_prob + alpha).min(1.0)
        } else {
            let proposed =
                self.audit_prob + alpha * (sum_caught / sum_responders - self.params.tolerance_tau);
            proposed.max(self.params.audit_prob_min).min(1.0)
        };
        self.audit_prob
    }

    /// Runs one full round against `workers` (indexed by worker id).
    ///
    /// Random draws happen in a fixed order: selection keys, then per
    /// selected worker in ascending id order its availability and (rational
    /// only) cheat decision, then the audit coin, then a majority tie-break
    /// coin if one is needed.
    pub fn run_round(
        &mut self,
        workers: &mut [WorkerState],
        rng: &mut RandomStream,
    ) -> RoundOutcome {
        let audit_prob_before = self.audit_prob;
        let selected = self.select_workers(rng);
        for &id in &selected {
            self.ledgers[id].record_selection();
        }

        let mut replies = Vec::with_capacity(selected.len());
        for &id in &selected {
            let w = &workers[id];
            if w.draw_availability(rng) {
                replies.push(w.produce_reply(rng));
            }
        }
        let responders: Vec<WorkerId> = replies.iter().map(|r| r.worker_id).collect();
        for &id in &responders {
            self.ledgers[id].record_reply();
        }

        let audited = self.decide_audit(rng);
        let (accepted, cheaters_caught, payoffs) = if audited {
            let (sum_r, sum_f) = self.truthfulness_sums(&replies);
            for r in &replies {
                self.ledgers[r.worker_id].record_audit_outcome(!r.was_cheat);
            }
            self.update_audit_prob(sum_r, sum_f);
            let caught = replies
                .iter()
                .filter(|r| r.was_cheat)
                .map(|r| r.worker_id)
                .collect();
            let payoffs = self.apply_payoffs(&replies, true, &[]);
            (Accepted::Correct, caught, payoffs)
        } else {
            let (accepted, rewarded) = self.accept_by_weighted_majority(&replies, rng);
            let payoffs = self.apply_payoffs(&replies, false, &rewarded);
            (accepted, Vec::new(), payoffs)
        };

        let alpha_w = self.params.worker_learning_rate_alpha_w;
        for r in &replies {
            let w = &mut workers[r.worker_id];
            if w.worker_type() == WorkerType::Rational {
                let alpha = w.learning_rate(alpha_w);
                w.update_cheat_prob(payoffs[&r.worker_id], r.was_cheat, &self.payoffs, alpha);
            }
        }

        RoundOutcome {
            selected,
            responders,
            replies,
            audited,
            cheaters_caught,
            accepted,
            payoffs,
            audit_prob_before,
            audit_prob_after: self.audit_prob,
        }
    }
}

/// The `n` highest-scoring indices, ties broken by fresh random keys,
/// returned ascending. Draws one key per index.
fn top_n(scores: &[f64], n: usize, rng: &mut RandomStream) -> Vec<WorkerId> {
    let mut ranked: Vec<(f64, u64, WorkerId)> = scores
        .iter()
        .enumerate()
        .map(|(i, &s)| (s, rng.key(), i))
        .collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut chosen: Vec<WorkerId> = ranked.into_iter().take(n).map(|(_, _, i)| i).collect();
    chosen.sort_unstable();
    chosen
}

/// Heaviest group wins; a tie among the heaviest is a uniform draw.
/// `None` when there are no groups.
pub fn weighted_majority<V: Copy>(groups: &[(V, f64)], rng: &mut RandomStream) -> Option<V> {
    let best = groups.iter().map(|g| g.1).fold(f64::NEG_INFINITY, f64::max);
    let leaders: Vec<V> = groups.iter().filter(|g| g.1 == best).map(|g| g.0).collect();
    match leaders.len() {
        0 => None,
        1 => Some(leaders[0]),
        k => {
            let idx = ((rng.uniform() * k as f64) as usize).min(k - 1);
            Some(leaders[idx])
        }
    }
}
