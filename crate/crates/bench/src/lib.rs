//! Fixtures shared by the criterion benchmarks.

use ccs_core::env::surrogate_norm_bound;
use ccs_core::{BanditEnv, ChannelConfig, ConfidenceConfig, DesignState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const FEATURE_DIM: usize = 20;

/// Channel with `num_tones` subcarriers and the default link budget.
pub fn reference_env(num_tones: usize, seed: u64) -> BanditEnv {
    let config = ChannelConfig {
        num_tones,
        seed,
        ..Default::default()
    };
    BanditEnv::draw(&config, FEATURE_DIM).expect("valid channel")
}

/// Confidence settings used by the experiment defaults.
pub fn reference_confidence() -> ConfidenceConfig {
    let gamma_ref = ChannelConfig::default().reference_snr();
    ConfidenceConfig {
        theta_norm_bound: surrogate_norm_bound(gamma_ref, FEATURE_DIM, 1.0).expect("surrogate fit"),
        feature_norm_bound: (FEATURE_DIM as f64).sqrt(),
        ..Default::default()
    }
}

/// A design after `pulls` random updates with uniform features.
pub fn random_design(dim: usize, pulls: usize, seed: u64) -> DesignState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut design = DesignState::new(dim, 1.0).expect("positive regularization");
    for _ in 0..pulls {
        let x = random_vector(dim, &mut rng);
        design
            .rank_one_update(&x, rng.random())
            .expect("finite update");
    }
    design
}

pub fn random_vector(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..dim).map(|_| rng.random::<f64>()).collect()
}
