use rand::Rng;

use super::pairwise::{self, PairScope};
use super::BaselineConfig;
use crate::algorithm::{RunOutcome, TopMAlgorithm};
use crate::env::LinearBandit;
use crate::error::Result;
use crate::gap::ConfidenceConfig;

/// Gap-based top-m search over pairs that straddle the empirical top-m
/// boundary. Pulls greedily minimize the largest crossing index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinGapE {
    pub config: BaselineConfig,
}

impl LinGapE {
    pub const SCOPE: PairScope = PairScope::Crossing;

    pub fn new(config: BaselineConfig) -> Self {
        Self { config }
    }
}

impl TopMAlgorithm for LinGapE {
    fn name(&self) -> &'static str {
        "lingape"
    }

    fn run<E: LinearBandit, R: Rng + ?Sized>(
        &self,
        env: &mut E,
        conf: &ConfidenceConfig,
        _rng: &mut R,
    ) -> Result<RunOutcome> {
        pairwise::run(Self::SCOPE, &self.config, env, conf)
    }
}
