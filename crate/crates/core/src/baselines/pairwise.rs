use crate::algorithm::RunOutcome;
use crate::baselines::{BaselineConfig, BaselineRound};
use crate::env::LinearBandit;
use crate::error::Result;
use crate::gap::{beta, gap_index, rank_desc, ComparisonCounter, ConfidenceConfig};
use crate::linalg::DesignState;

/// Which ordered pairs `(i, j)` a round evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairScope {
    /// `i` outside the empirical top-m, `j` inside it: `m(K − m)` pairs.
    Crossing,
    /// Every `i ≠ j`: `K(K − 1)` pairs.
    AllPairs,
}

impl PairScope {
    pub fn pairs_per_sweep(self, num_arms: usize, m: usize) -> u64 {
        match self {
            Self::Crossing => (m * (num_arms - m)) as u64,
            Self::AllPairs => (num_arms * (num_arms - 1)) as u64,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PairwiseState {
    pub design: DesignState,
    pub mu_hat: Vec<f64>,
    /// Empirical top-m, ascending.
    pub top: Vec<usize>,
    pub round: u64,
    pub pulls: u64,
    /// Largest crossing index seen in the last round.
    pub max_index: Option<f64>,
}

impl PairwiseState {
    pub fn new(num_arms: usize, dim: usize, conf: &ConfidenceConfig) -> Result<Self> {
        Ok(Self {
            design: DesignState::new(dim, conf.reg)?,
            mu_hat: vec![0.0; num_arms],
            top: Vec::new(),
            round: 0,
            pulls: 0,
            max_index: None,
        })
    }
}

/// One round: rank, evaluate indices over `scope`, stop or pull the arm whose
/// virtual pull minimizes the largest index.
///
/// Each round costs one sweep for the stopping check plus one sweep per
/// candidate arm.
pub fn step<E: LinearBandit>(
    scope: PairScope,
    config: &BaselineConfig,
    state: &mut PairwiseState,
    env: &mut E,
    conf: &ConfidenceConfig,
    counter: &mut ComparisonCounter,
) -> Result<BaselineRound> {
    let k = env.num_arms();
    let m = config.m;
    state.round += 1;

    let order = rank_desc(&state.mu_hat);
    let mut in_top = vec![false; k];
    for &a in &order[..m] {
        in_top[a] = true;
    }
    state.top = (0..k).filter(|&a| in_top[a]).collect();
    let rest: Vec<usize> = (0..k).filter(|&a| !in_top[a]).collect();
    if rest.is_empty() {
        state.max_index = None;
        return Ok(BaselineRound::Stopped);
    }

    // Crossing pairs are ordered (outside, inside); all-pairs entries are
    // unordered `i < j` and evaluated in both orders.
    let pairs: Vec<(usize, usize)> = match scope {
        PairScope::Crossing => rest
            .iter()
            .flat_map(|&i| state.top.iter().map(move |&j| (i, j)))
            .collect(),
        PairScope::AllPairs => (0..k)
            .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
            .collect(),
    };
    let both_orders = scope == PairScope::AllPairs;

    let b = beta(&state.design, conf);
    let q = state.design.cross_metric(env.features().as_matrix())?;
    let norm2: Vec<f64> = pairs
        .iter()
        .map(|&(i, j)| (q[(i, i)] + q[(j, j)] - 2.0 * q[(i, j)]).max(0.0))
        .collect();
    let mu = &state.mu_hat;

    let mut max_crossing = f64::NEG_INFINITY;
    let mut note = |i: usize, j: usize, index: f64| {
        if !in_top[i] && in_top[j] {
            max_crossing = max_crossing.max(index);
        }
    };
    for (&(i, j), &n2) in pairs.iter().zip(&norm2) {
        let w = b * n2.sqrt();
        note(i, j, gap_index(mu[i], mu[j], w, counter));
        if both_orders {
            note(j, i, gap_index(mu[j], mu[i], w, counter));
        }
    }
    state.max_index = Some(max_crossing);
    if max_crossing <= config.epsilon {
        return Ok(BaselineRound::Stopped);
    }

    // Greedy allocation. Crossing scope minimizes the largest crossing index;
    // all-pairs scope minimizes the largest pair ambiguity min(B(i,j), B(j,i)).
    let mut best = (f64::INFINITY, 0usize);
    for a in 0..k {
        let denom = 1.0 + q[(a, a)];
        let mut worst = f64::NEG_INFINITY;
        for (&(i, j), &n2) in pairs.iter().zip(&norm2) {
            let s = q[(i, a)] - q[(j, a)];
            let w = b * (n2 - s * s / denom).max(0.0).sqrt();
            let mut index = gap_index(mu[i], mu[j], w, counter);
            if both_orders {
                index = index.min(gap_index(mu[j], mu[i], w, counter));
            }
            worst = worst.max(index);
        }
        if worst < best.0 {
            best = (worst, a);
        }
    }

    let arm = best.1;
    let reward = env.pull(arm)?;
    state
        .design
        .rank_one_update(env.features().arm(arm), reward)?;
    state.pulls += 1;
    state.mu_hat = state.design.predict_all(env.features().as_matrix());
    Ok(BaselineRound::Pulled { arm })
}

pub(crate) fn run<E: LinearBandit>(
    scope: PairScope,
    config: &BaselineConfig,
    env: &mut E,
    conf: &ConfidenceConfig,
) -> Result<RunOutcome> {
    conf.validate()?;
    config.validate(env.num_arms())?;
    let mut state = PairwiseState::new(env.num_arms(), env.dim(), conf)?;
    let mut counter = ComparisonCounter::new();
    let mut converged = false;
    while state.round < config.max_rounds {
        if step(scope, config, &mut state, env, conf, &mut counter)? == BaselineRound::Stopped {
            converged = true;
            break;
        }
    }
    Ok(RunOutcome {
        selected: state.top,
        pulls: state.pulls,
        comparisons: counter.count(),
        rounds: state.round,
        converged,
    })
}
