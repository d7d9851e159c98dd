use ccs_core::baselines::BaselineConfig;
use ccs_core::harness::{aggregate, oracle_top_m, run_trials, OracleMode};
use ccs_core::{
    AlgorithmKind, Ccs, CcsConfig, ChannelConfig, ConfidenceConfig, ExperimentConfig, LinGapE,
    LinGifa, LinUGapE, LinearBandit, SyntheticLinearEnv, TopMAlgorithm,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn ordering_at_fifteen_tones() {
    let config = ExperimentConfig {
        channel: ChannelConfig {
            num_tones: 15,
            ..Default::default()
        },
        ..Default::default()
    };
    let rows: Vec<_> = run_trials(&config)
        .unwrap()
        .iter()
        .map(|r| r.row())
        .collect();
    let stats = aggregate(&rows).unwrap();
    let mean = |a| stats.group(a).unwrap().comparisons.unwrap().mean;
    let (c, u, g, f) = (
        mean(AlgorithmKind::Ccs),
        mean(AlgorithmKind::LinUGapE),
        mean(AlgorithmKind::LinGapE),
        mean(AlgorithmKind::LinGifa),
    );
    assert!(
        c < u && u < g && g < f,
        "ccs={c} linugape={u} lingape={g} lingifa={f}"
    );
    for group in &stats.groups {
        assert_eq!(group.non_converged, 0);
    }
}

#[test]
fn all_algorithms_agree_on_noiseless_separated_instance() {
    let conf = ConfidenceConfig {
        theta_norm_bound: 4.0,
        sigma: 0.1,
        ..Default::default()
    };
    for layout in 0..3 {
        let env = SyntheticLinearEnv::ladder(10, 4, 0.8, 4.0, 0.0, layout).unwrap();
        let truth = oracle_top_m(env.true_means(), 3, OracleMode::Sort).unwrap();
        let rng = || ChaCha8Rng::seed_from_u64(layout);
        let outs = [
            Ccs::new(CcsConfig::new(3, 4))
                .run(&mut env.clone(), &conf, &mut rng())
                .unwrap(),
            LinGapE::new(BaselineConfig::new(3))
                .run(&mut env.clone(), &conf, &mut rng())
                .unwrap(),
            LinUGapE::new(BaselineConfig::new(3))
                .run(&mut env.clone(), &conf, &mut rng())
                .unwrap(),
            LinGifa::new(BaselineConfig::new(3))
                .run(&mut env.clone(), &conf, &mut rng())
                .unwrap(),
        ];
        for out in outs {
            assert!(out.converged);
            assert_eq!(out.selected, truth);
        }
    }
}

#[test]
fn linugape_counts_ignore_rewards() {
    let conf = ConfidenceConfig {
        theta_norm_bound: 2.0,
        ..Default::default()
    };
    let algo = LinUGapE::new(BaselineConfig::new(4));
    let expected = LinUGapE::comparison_schedule(12, 4);
    for noise in [0.0, 0.5, 3.0] {
        let mut env = SyntheticLinearEnv::ladder(12, 3, 0.2, 2.0, noise, 9).unwrap();
        let out = algo
            .run(&mut env, &conf, &mut ChaCha8Rng::seed_from_u64(0))
            .unwrap();
        assert_eq!((out.pulls, out.comparisons), expected);
    }
}
