//! Champion-challenger sampling.
//!
//! Each round:
//! 1. the weakest champion is swapped for the strongest challenger if the
//!    challenger's estimate is strictly higher;
//! 2. the challenger list is refilled with the `m′` best non-champions;
//! 3. gap indices `B(c, u)` are evaluated for every challenger `c` and
//!    champion `u`, and the largest one names the ambiguous pair;
//! 4. if that index is at most `ε` the champions are returned, otherwise the
//!    candidate whose virtual pull shrinks `‖x_b − x_c‖` the most is played.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::algorithm::{RunOutcome, TopMAlgorithm};
use crate::env::{FeatureMatrix, LinearBandit};
use crate::error::{invalid, Result};
use crate::gap::{beta, gap_index, rank_desc, ComparisonCounter, ConfidenceConfig};
use crate::linalg::DesignState;

pub const DEFAULT_MAX_ROUNDS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CcsConfig {
    pub m: usize,
    /// Requested challenger list size `m′`. Clamped to `K − m`.
    pub challenger_size: usize,
    pub epsilon: f64,
    pub max_rounds: u64,
}

impl CcsConfig {
    pub fn new(m: usize, challenger_size: usize) -> Self {
        Self {
            m,
            challenger_size,
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
        if self.challenger_size == 0 {
            return Err(invalid("challenger_size must be at least 1"));
        }
        if !(self.epsilon >= 0.0) {
            return Err(invalid("epsilon must be non-negative"));
        }
        if self.max_rounds == 0 {
            return Err(invalid("max_rounds must be at least 1"));
        }
        Ok(())
    }

    /// Challenger list size actually used on `num_arms` arms.
    pub fn effective_challengers(&self, num_arms: usize) -> usize {
        self.challenger_size.min(num_arms.saturating_sub(self.m))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmbiguousPair {
    /// `b_t`, the most threatened champion.
    pub champion: usize,
    /// `ca_t`, the most threatening challenger.
    pub challenger: usize,
    /// `B_t(ca_t, b_t)`.
    pub index: f64,
}

#[derive(Debug, Clone)]
pub struct ShortlistState {
    pub champions: Vec<usize>,
    pub challengers: Vec<usize>,
    pub design: DesignState,
    /// `x_aᵀθ̂` for every arm.
    pub mu_hat: Vec<f64>,
    pub round: u64,
    pub pulls: u64,
    pub pair: Option<AmbiguousPair>,
}

impl ShortlistState {
    pub fn is_consistent(&self, num_arms: usize, m: usize, challenger_size: usize) -> bool {
        let mut seen = vec![false; num_arms];
        for &a in self.champions.iter().chain(&self.challengers) {
            if a >= num_arms || seen[a] {
                return false;
            }
            seen[a] = true;
        }
        self.champions.len() == m && self.challengers.len() == challenger_size.min(num_arms - m)
    }
}

/// Champions from a random surrogate `θ ~ Unif(S^{d−1})`; challengers are the next `m′`.
pub fn init<R: Rng + ?Sized>(
    features: &FeatureMatrix,
    config: &CcsConfig,
    conf: &ConfidenceConfig,
    rng: &mut R,
) -> Result<ShortlistState> {
    let k = features.num_arms();
    config.validate(k)?;
    let d = features.dim();
    let theta = random_unit_vector(d, rng);
    let mu_hat: Vec<f64> = (0..k)
        .map(|a| crate::linalg::dot(features.arm(a), &theta))
        .collect();
    let order = rank_desc(&mu_hat);
    let mp = config.effective_challengers(k);
    Ok(ShortlistState {
        champions: order[..config.m].to_vec(),
        challengers: order[config.m..config.m + mp].to_vec(),
        design: DesignState::new(d, conf.reg)?,
        mu_hat,
        round: 0,
        pulls: 0,
        pair: None,
    })
}

fn random_unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Swaps the weakest champion for the strongest challenger on strict
/// improvement. Returns whether a swap happened.
pub fn update_champions(state: &mut ShortlistState) -> bool {
    let mu = &state.mu_hat;
    let Some(best_c) = argmax_by(&state.challengers, |a| mu[a]) else {
        return false;
    };
    let Some(worst_u) = argmin_by(&state.champions, |a| mu[a]) else {
        return false;
    };
    let (n_t, worst) = (state.challengers[best_c], state.champions[worst_u]);
    if mu[n_t] > mu[worst] {
        state.champions[worst_u] = n_t;
        state.challengers[best_c] = worst;
        true
    } else {
        false
    }
}

/// Refills the challenger list with the `challenger_size` best non-champions.
pub fn rotate_challengers(state: &mut ShortlistState, challenger_size: usize) {
    let k = state.mu_hat.len();
    let mut is_champion = vec![false; k];
    for &u in &state.champions {
        is_champion[u] = true;
    }
    let mut rest: Vec<usize> = (0..k).filter(|&a| !is_champion[a]).collect();
    let mu = &state.mu_hat;
    rest.sort_by(|&a, &b| mu[b].total_cmp(&mu[a]).then(a.cmp(&b)));
    rest.truncate(challenger_size);
    state.challengers = rest;
}

/// Evaluates `B(c, u)` over challengers × champions and returns the maximizer.
/// Ties go to the smallest `(c, u)`.
pub fn select_ambiguous_pair(
    state: &ShortlistState,
    features: &FeatureMatrix,
    conf: &ConfidenceConfig,
    counter: &mut ComparisonCounter,
) -> Result<Option<AmbiguousPair>> {
    let b = beta(&state.design, conf);
    let mut challengers = state.challengers.clone();
    challengers.sort_unstable();
    let mut champions = state.champions.clone();
    champions.sort_unstable();

    let mut best: Option<AmbiguousPair> = None;
    for &c in &challengers {
        for &u in &champions {
            let w = b * state.design.diff_norm(features.arm(c), features.arm(u))?;
            let index = gap_index(state.mu_hat[c], state.mu_hat[u], w, counter);
            if best.is_none_or(|p| index > p.index) {
                best = Some(AmbiguousPair {
                    champion: u,
                    challenger: c,
                    index,
                });
            }
        }
    }
    Ok(best)
}

/// Largest-variance rule: the champion or challenger whose virtual pull
/// minimizes `‖x_b − x_c‖` in the updated metric. Ties go to the lowest index.
pub fn select_arm(
    state: &ShortlistState,
    features: &FeatureMatrix,
    pair: &AmbiguousPair,
) -> Result<usize> {
    let direction: Vec<f64> = features
        .arm(pair.champion)
        .iter()
        .zip(features.arm(pair.challenger))
        .map(|(b, c)| b - c)
        .collect();
    let mut candidates: Vec<usize> = state
        .champions
        .iter()
        .chain(&state.challengers)
        .copied()
        .collect();
    candidates.sort_unstable();

    let mut best = (f64::INFINITY, candidates[0]);
    for a in candidates {
        let v = state
            .design
            .norm_with_virtual_pull(&direction, features.arm(a))?;
        if v < best.0 {
            best = (v, a);
        }
    }
    Ok(best.1)
}

/// What one round did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Round {
    /// The stopping rule fired (or there was nothing to compare).
    Stopped,
    Pulled {
        arm: usize,
        pair: AmbiguousPair,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ccs {
    pub config: CcsConfig,
}

impl Ccs {
    pub fn new(config: CcsConfig) -> Self {
        Self { config }
    }

    pub fn init<E: LinearBandit, R: Rng + ?Sized>(
        &self,
        env: &E,
        conf: &ConfidenceConfig,
        rng: &mut R,
    ) -> Result<ShortlistState> {
        conf.validate()?;
        init(env.features(), &self.config, conf, rng)
    }

    /// Runs one round on `state`.
    pub fn step<E: LinearBandit>(
        &self,
        state: &mut ShortlistState,
        env: &mut E,
        conf: &ConfidenceConfig,
        counter: &mut ComparisonCounter,
    ) -> Result<Round> {
        let k = env.num_arms();
        let mp = self.config.effective_challengers(k);
        state.round += 1;
        update_champions(state);
        rotate_challengers(state, mp);
        debug_assert!(state.is_consistent(k, self.config.m, self.config.challenger_size));

        let Some(pair) = select_ambiguous_pair(state, env.features(), conf, counter)? else {
            state.pair = None;
            return Ok(Round::Stopped);
        };
        state.pair = Some(pair);
        if pair.index <= self.config.epsilon {
            return Ok(Round::Stopped);
        }

        let arm = select_arm(state, env.features(), &pair)?;
        let reward = env.pull(arm)?;
        state
            .design
            .rank_one_update(env.features().arm(arm), reward)?;
        state.pulls += 1;
        state.mu_hat = state.design.predict_all(env.features().as_matrix());
        Ok(Round::Pulled { arm, pair })
    }
}

impl TopMAlgorithm for Ccs {
    fn name(&self) -> &'static str {
        "ccs"
    }

    fn run<E: LinearBandit, R: Rng + ?Sized>(
        &self,
        env: &mut E,
        conf: &ConfidenceConfig,
        rng: &mut R,
    ) -> Result<RunOutcome> {
        let mut state = self.init(env, conf, rng)?;
        let mut counter = ComparisonCounter::new();
        let mut converged = false;
        while state.round < self.config.max_rounds {
            if self.step(&mut state, env, conf, &mut counter)? == Round::Stopped {
                converged = true;
                break;
            }
        }
        let mut selected = state.champions.clone();
        selected.sort_unstable();
        Ok(RunOutcome {
            selected,
            pulls: state.pulls,
            comparisons: counter.count(),
            rounds: state.round,
            converged,
        })
    }
}

fn argmax_by(items: &[usize], key: impl Fn(usize) -> f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (pos, &a) in items.iter().enumerate() {
        let v = key(a);
        match best {
            Some((bp, bv)) if v < bv || (v == bv && a > items[bp]) => {}
            _ => best = Some((pos, v)),
        }
    }
    best.map(|(p, _)| p)
}

fn argmin_by(items: &[usize], key: impl Fn(usize) -> f64) -> Option<usize> {
    argmax_by(items, |a| -key(a))
}
