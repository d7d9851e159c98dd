use rand::Rng;

use super::BaselineConfig;
use crate::algorithm::{RunOutcome, TopMAlgorithm};
use crate::env::LinearBandit;
use crate::error::Result;
use crate::gap::{beta, gap_index, ComparisonCounter, ConfidenceConfig};
use crate::linalg::DesignState;
use nalgebra::DMatrix;

/// Top-m through `m` sequential fixed-budget best-arm runs.
///
/// Run `r` works on the `K_r = K − r` arms not yet chosen and lasts `K_r + 1`
/// rounds. Each round evaluates `B(i, k)` for every ordered pair of active
/// arms, takes `B_k = max_i B(i, k)`, and picks `J = argmin_k B_k` with
/// `u = argmax_i B(i, J)`. The pulled arm is the active arm whose virtual pull
/// shrinks `‖x_u − x_J‖` the most. A run recommends the `J` with the smallest
/// `B_J` it saw. The estimator is shared across runs.
///
/// The comparison count depends only on `(K, m)`; see [`Self::comparison_schedule`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinUGapE {
    pub config: BaselineConfig,
}

impl LinUGapE {
    pub fn new(config: BaselineConfig) -> Self {
        Self { config }
    }

    /// `(pulls, comparisons)` for a full run on `num_arms` arms.
    pub fn comparison_schedule(num_arms: usize, m: usize) -> (u64, u64) {
        let (mut pulls, mut comparisons) = (0u64, 0u64);
        for r in 0..m {
            let n = (num_arms - r) as u64;
            if n < 2 {
                break;
            }
            pulls += n + 1;
            comparisons += (n + 1) * n * (n - 1);
        }
        (pulls, comparisons)
    }
}

struct RoundChoice {
    leader: usize,
    leader_index: f64,
    rival: usize,
}

fn choose_pair(
    active: &[usize],
    mu: &[f64],
    q: &DMatrix<f64>,
    b: f64,
    counter: &mut ComparisonCounter,
) -> RoundChoice {
    let mut best: Option<RoundChoice> = None;
    for &k in active {
        let mut worst = (f64::NEG_INFINITY, usize::MAX);
        for &i in active {
            if i == k {
                continue;
            }
            let w = b * (q[(i, i)] + q[(k, k)] - 2.0 * q[(i, k)]).max(0.0).sqrt();
            let index = gap_index(mu[i], mu[k], w, counter);
            if index > worst.0 {
                worst = (index, i);
            }
        }
        if best.as_ref().is_none_or(|c| worst.0 < c.leader_index) {
            best = Some(RoundChoice {
                leader: k,
                leader_index: worst.0,
                rival: worst.1,
            });
        }
    }
    best.expect("at least two active arms")
}

impl TopMAlgorithm for LinUGapE {
    fn name(&self) -> &'static str {
        "linugape"
    }

    fn run<E: LinearBandit, R: Rng + ?Sized>(
        &self,
        env: &mut E,
        conf: &ConfidenceConfig,
        _rng: &mut R,
    ) -> Result<RunOutcome> {
        conf.validate()?;
        let k = env.num_arms();
        self.config.validate(k)?;
        let mut design = DesignState::new(env.dim(), conf.reg)?;
        let mut mu = vec![0.0; k];
        let mut counter = ComparisonCounter::new();
        let mut chosen = vec![false; k];
        let mut selected = Vec::with_capacity(self.config.m);
        let mut rounds = 0u64;

        for _ in 0..self.config.m {
            let active: Vec<usize> = (0..k).filter(|&a| !chosen[a]).collect();
            if active.len() == 1 {
                selected.push(active[0]);
                chosen[active[0]] = true;
                continue;
            }
            let mut recommendation = (f64::INFINITY, active[0]);
            for _ in 0..=active.len() {
                rounds += 1;
                let b = beta(&design, conf);
                let q = design.cross_metric(env.features().as_matrix())?;
                let c = choose_pair(&active, &mu, &q, b, &mut counter);
                if c.leader_index < recommendation.0 {
                    recommendation = (c.leader_index, c.leader);
                }
                let direction: Vec<f64> = env
                    .features()
                    .arm(c.rival)
                    .iter()
                    .zip(env.features().arm(c.leader))
                    .map(|(u, j)| u - j)
                    .collect();
                let mut pick = (f64::INFINITY, active[0]);
                for &a in &active {
                    let v = design.norm_with_virtual_pull(&direction, env.features().arm(a))?;
                    if v < pick.0 {
                        pick = (v, a);
                    }
                }
                let reward = env.pull(pick.1)?;
                design.rank_one_update(env.features().arm(pick.1), reward)?;
                mu = design.predict_all(env.features().as_matrix());
            }
            chosen[recommendation.1] = true;
            selected.push(recommendation.1);
        }

        selected.sort_unstable();
        Ok(RunOutcome {
            selected,
            pulls: design.pulls(),
            comparisons: counter.count(),
            rounds,
            converged: true,
        })
    }
}
