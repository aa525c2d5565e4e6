//! Worker behavior: availability, replies, and the rational worker's
//! aspiration-driven update of its cheating probability.

use serde::{Deserialize, Serialize};

use crate::model::{PayoffParams, RandomStream, WorkerId, WorkerSpec, WorkerType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ReplyValue {
    Correct,
    Wrong,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reply {
    pub worker_id: WorkerId,
    pub value: ReplyValue,
    /// Known to the master only when it audits.
    pub was_cheat: bool,
}

impl Reply {
    pub fn new(worker_id: WorkerId, cheat: bool) -> Self {
        Self {
            worker_id,
            value: if cheat {
                ReplyValue::Wrong
            } else {
                ReplyValue::Correct
            },
            was_cheat: cheat,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkerState {
    pub spec: WorkerSpec,
    pub cheat_prob: f64,
    /// Effective aspiration for this run (the spec value, possibly jittered).
    pub aspiration: f64,
}

impl WorkerState {
    pub fn new(spec: WorkerSpec) -> Self {
        let cheat_prob = match spec.worker_type {
            WorkerType::Malicious => 1.0,
            WorkerType::Altruistic => 0.0,
            WorkerType::Rational => spec.initial_cheat_prob.clamp(0.0, 1.0),
        };
        let aspiration = spec.aspiration;
        Self {
            spec,
            cheat_prob,
            aspiration,
        }
    }

    pub fn id(&self) -> WorkerId {
        self.spec.worker_id
    }

    pub fn worker_type(&self) -> WorkerType {
        self.spec.worker_type
    }

    /// One Bernoulli draw: did the master receive a reply this round?
    pub fn draw_availability(&self, rng: &mut RandomStream) -> bool {
        rng.bernoulli(self.spec.availability)
    }

    /// Only rational workers consume a draw here.
    pub fn produce_reply(&self, rng: &mut RandomStream) -> Reply {
        let cheat = match self.spec.worker_type {
            WorkerType::Malicious => true,
            WorkerType::Altruistic => false,
            WorkerType::Rational => rng.bernoulli(self.cheat_prob),
        };
        Reply::new(self.id(), cheat)
    }

    pub fn learning_rate(&self, default_alpha_w: f64) -> f64 {
        self.spec.learning_rate.unwrap_or(default_alpha_w)
    }

    /// Reinforcement step after receiving `payoff`.
    ///
    /// A cheat moves `p_C` by `alpha_w * (payoff - a)`; an honest reply moves
    /// it by `-alpha_w * (payoff - WCt - a)`. The result is clamped to [0, 1].
    /// Non-rational workers are left untouched.
    pub fn update_cheat_prob(
        &mut self,
        payoff: f64,
        did_cheat: bool,
        params: &PayoffParams,
        alpha_w: f64,
    ) {
        if self.spec.worker_type != WorkerType::Rational {
            return;
        }
        let delta = if did_cheat {
            alpha_w * (payoff - self.aspiration)
        } else {
            -alpha_w * (payoff - params.task_cost_wct - self.aspiration)
        };
        self.cheat_prob = (self.cheat_prob + delta).clamp(0.0, 1.0);
    }
}
