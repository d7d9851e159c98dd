use rand::Rng;

use super::pairwise::{self, PairScope};
use super::BaselineConfig;
use crate::algorithm::{RunOutcome, TopMAlgorithm};
use crate::env::LinearBandit;
use crate::error::Result;
use crate::gap::ConfidenceConfig;

/// Gap-index search over every ordered pair of arms. Stops on the same
/// crossing criterion as [`LinGapE`](super::LinGapE), but both the stopping
/// check and the greedy allocation sweep all `K(K − 1)` indices. The pulled
/// arm minimizes the largest pair ambiguity `min(B(i, j), B(j, i))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinGifa {
    pub config: BaselineConfig,
}

impl LinGifa {
    pub const SCOPE: PairScope = PairScope::AllPairs;

    pub fn new(config: BaselineConfig) -> Self {
        Self { config }
    }
}

impl TopMAlgorithm for LinGifa {
    fn name(&self) -> &'static str {
        "lingifa"
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::pairwise::{step, PairwiseState};
    use crate::baselines::BaselineRound;
    use crate::env::{BanditEnv, ChannelConfig, SyntheticLinearEnv};
    use crate::gap::ComparisonCounter;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn noiseless_separated_instance() {
        let mut env = SyntheticLinearEnv::ladder(8, 4, 1.0, 4.0, 0.0, 2).unwrap();
        let conf = ConfidenceConfig {
            theta_norm_bound: 4.0,
            sigma: 0.05,
            ..Default::default()
        };
        let out = LinGifa::new(BaselineConfig::new(3))
            .run(&mut env, &conf, &mut ChaCha8Rng::seed_from_u64(0))
            .unwrap();
        assert!(out.converged, "{out:?}");
        assert_eq!(out.selected, vec![0, 1, 2]);
    }

    #[test]
    fn one_round_is_quadratic_in_k() {
        let mut env = BanditEnv::draw(&ChannelConfig::default(), 20).unwrap();
        let conf = ConfidenceConfig::default();
        let config = BaselineConfig::new(12);
        let mut state = PairwiseState::new(40, 20, &conf).unwrap();
        let mut counter = ComparisonCounter::new();
        let r = step(
            LinGifa::SCOPE,
            &config,
            &mut state,
            &mut env,
            &conf,
            &mut counter,
        )
        .unwrap();
        assert!(matches!(r, BaselineRound::Pulled { .. }));
        assert!(counter.count() >= 40 * 39 / 4);
        assert_eq!(counter.count(), 41 * 40 * 39);
    }
}
