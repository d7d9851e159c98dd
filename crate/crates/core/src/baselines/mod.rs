//! Reference algorithms measured against CCS on the same estimator, widths
//! and comparison counter.
//!
//! [`LinGapE`] and [`LinGifa`] share one gap-index search engine and differ
//! only in which ordered pairs they evaluate each round. [`LinUGapE`] runs
//! `m` fixed-budget best-arm searches in sequence.

mod lingape;
mod lingifa;
mod linugape;
mod pairwise;

pub use lingape::LinGapE;
pub use lingifa::LinGifa;
pub use linugape::LinUGapE;
pub use pairwise::{PairScope, PairwiseState};

use crate::error::{invalid, Result};

pub const DEFAULT_MAX_ROUNDS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineConfig {
    pub m: usize,
    pub epsilon: f64,
    pub max_rounds: u64,
}

impl BaselineConfig {
    pub fn new(m: usize) -> Self {
        Self {
            m,
            epsilon: 1e-15,
            max_rounds: DEFAULT_MAX_ROUNDS,
        }
    }

    pub fn validate(&self, num_arms: usize) -> Result<()> {
        if self.m == 0 || self.m > num_arms {
            return Err(invalid(format!(
                "need 1 ≤ m ≤ K, got m = {}, K = {num_arms}",
                self.m
            )));
        }
        if !(self.epsilon >= 0.0) {
            return Err(invalid("epsilon must be non-negative"));
        }
        if self.max_rounds == 0 {
            return Err(invalid("max_rounds must be at least 1"));
        }
        Ok(())
    }
}

/// What one baseline round did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaselineRound {
    Stopped,
    Pulled { arm: usize },
}
