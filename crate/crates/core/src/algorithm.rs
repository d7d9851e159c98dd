use rand::Rng;

use crate::env::LinearBandit;
use crate::error::Result;
use crate::gap::ConfidenceConfig;

/// What an identification run returns, before it is scored against the truth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    /// Selected arms, ascending.
    pub selected: Vec<usize>,
    pub pulls: u64,
    pub comparisons: u64,
    /// Rounds executed, including the round in which the stopping rule fired.
    pub rounds: u64,
    /// False when the round cap was hit before the stopping rule fired.
    pub converged: bool,
}

/// A fixed-confidence (or fixed-budget) top-m identification procedure.
pub trait TopMAlgorithm {
    fn name(&self) -> &'static str;

    fn run<E: LinearBandit, R: Rng + ?Sized>(
        &self,
        env: &mut E,
        conf: &ConfidenceConfig,
        rng: &mut R,
    ) -> Result<RunOutcome>;
}
