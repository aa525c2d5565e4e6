//! Per-worker interaction counters and the reputations derived from them.
//!
//! Reputations are never stored. They are recomputed from a
//! [`ReputationLedger`] on demand, so the three truthfulness types can be
//! evaluated on the same history.

use serde::{Deserialize, Serialize};

use crate::model::ReputationType;

/// Consecutive audited-correct replies needed before a BOINC-type
/// truthfulness becomes positive.
pub const BOINC_STREAK_THRESHOLD: u64 = 10;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReputationLedger {
    /// Rounds in which the worker was selected.
    pub select_count: u64,
    /// Selected rounds in which its reply was received.
    pub reply_select_count: u64,
    /// Received replies that were audited.
    pub audit_reply_select_count: u64,
    /// Audited replies that were correct.
    pub correct_audit_count: u64,
    /// Audited-correct replies since the last audited cheat.
    pub streak: u64,
}

impl ReputationLedger {
    pub fn record_selection(&mut self) {
        self.select_count += 1;
    }

    pub fn record_reply(&mut self) {
        debug_assert!(self.reply_select_count < self.select_count);
        self.reply_select_count += 1;
    }

    pub fn record_audit_outcome(&mut self, was_truthful: bool) {
        debug_assert!(self.audit_reply_select_count < self.reply_select_count);
        self.audit_reply_select_count += 1;
        if was_truthful {
            self.correct_audit_count += 1;
            self.streak += 1;
        } else {
            self.streak = 0;
        }
    }

    /// `(reply_select + 1) / (select + 1)`, always in `(0, 1]`.
    pub fn responsiveness(&self) -> f64 {
        (self.reply_select_count + 1) as f64 / (self.select_count + 1) as f64
    }

    pub fn truthfulness(&self, scheme: ReputationScheme) -> f64 {
        match scheme.kind {
            ReputationType::Linear => {
                (self.correct_audit_count + 1) as f64 / (self.audit_reply_select_count + 1) as f64
            }
            ReputationType::Exponential => {
                let caught = self.audit_reply_select_count - self.correct_audit_count;
                scheme.epsilon.powf(caught as f64)
            }
            ReputationType::Boinc => {
                if self.streak < BOINC_STREAK_THRESHOLD {
                    0.0
                } else {
                    1.0 - 1.0 / self.streak as f64
                }
            }
        }
    }

    pub fn combined(&self, scheme: ReputationScheme) -> f64 {
        self.responsiveness() * self.truthfulness(scheme)
    }

    /// Counter ordering every ledger must satisfy.
    pub fn is_consistent(&self) -> bool {
        self.reply_select_count <= self.select_count
            && self.audit_reply_select_count <= self.reply_select_count
            && self.correct_audit_count <= self.audit_reply_select_count
            && self.streak <= self.correct_audit_count
    }
}

/// A truthfulness type together with its parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReputationScheme {
    pub kind: ReputationType,
    /// Base of the exponential type; ignored by the others.
    pub epsilon: f64,
}

impl ReputationScheme {
    pub fn new(kind: ReputationType, epsilon: f64) -> Self {
        Self { kind, epsilon }
    }

    pub fn linear() -> Self {
        Self::new(ReputationType::Linear, 0.5)
    }

    pub fn exponential(epsilon: f64) -> Self {
        Self::new(ReputationType::Exponential, epsilon)
    }

    pub fn boinc() -> Self {
        Self::new(ReputationType::Boinc, 0.5)
    }
}
