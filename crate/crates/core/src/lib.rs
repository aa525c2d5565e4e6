//! Simulator for reputation-based master-worker Internet computing.
//!
//! A master repeatedly hands a task to the `n` most reputable workers of a
//! pool of `N`, audits their replies with an adaptive probability, accepts
//! the weighted-majority answer otherwise, and pays or punishes accordingly.
//! Rational workers adapt their cheating probability by reinforcement
//! against an aspiration level. See [`engine::run_single`] and
//! [`engine::run_batch`] for the entry points.

pub mod engine;
pub mod error;
pub mod master;
pub mod model;
pub mod output;
pub mod reputation;
pub mod scenarios;
pub mod worker;

pub use error::{Error, Result};
