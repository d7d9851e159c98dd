use std::fs::{self, File};
use std::io::BufWriter;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::aggregate::Summary;
use super::oracle::{exhaustive_pull_count, oracle_top_m, OracleMode};
use super::record::{write_results, ResultRow, TrialResult};
use super::{aggregate, AggregateStats, AlgorithmKind, ExperimentConfig};
use crate::algorithm::{RunOutcome, TopMAlgorithm};
use crate::baselines::{LinGapE, LinGifa, LinUGapE};
use crate::ccs::Ccs;
use crate::env::{BanditEnv, ChannelConfig, LinearBandit};
use crate::error::{Error, Result};
use crate::gap::ConfidenceConfig;

pub const RESULTS_FILE: &str = "results.csv";
pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub trial_id: usize,
    pub algo: AlgorithmKind,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub results: Vec<TrialResult>,
    pub stats: AggregateStats,
    pub results_path: PathBuf,
    pub summary_path: PathBuf,
}

/// FNV-1a hash of a label, used to key independent RNG streams.
pub fn stream_key(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Runs one algorithm by kind.
pub fn run_algorithm<E: LinearBandit, R: Rng + ?Sized>(
    kind: AlgorithmKind,
    config: &ExperimentConfig,
    env: &mut E,
    conf: &ConfidenceConfig,
    rng: &mut R,
) -> Result<RunOutcome> {
    match kind {
        AlgorithmKind::Ccs => Ccs::new(config.ccs_config()).run(env, conf, rng),
        AlgorithmKind::LinGapE => LinGapE::new(config.baseline_config()).run(env, conf, rng),
        AlgorithmKind::LinUGapE => LinUGapE::new(config.baseline_config()).run(env, conf, rng),
        AlgorithmKind::LinGifa => LinGifa::new(config.baseline_config()).run(env, conf, rng),
    }
}

/// Every configured algorithm on the channel drawn for `trial_id`.
///
/// All algorithms see the same channel and features. Reward noise and
/// algorithm randomness come from streams keyed by algorithm name.
pub fn run_trial(
    config: &ExperimentConfig,
    conf: &ConfidenceConfig,
    trial_id: usize,
) -> Result<Vec<TrialResult>> {
    let seed = config.seed_base.wrapping_add(trial_id as u64);
    let channel = ChannelConfig {
        seed,
        ..config.channel.clone()
    };
    let env = BanditEnv::draw(&channel, config.d)?;
    let truth = oracle_top_m(env.true_means(), config.m, OracleMode::Sort)?;

    let mut out = Vec::with_capacity(config.algorithms.len());
    for &kind in &config.algorithms {
        let mut trial_env = env.clone();
        trial_env.reseed_rewards(stream_key(&format!("rewards/{kind}")));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_key(&format!("policy/{kind}")));

        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| {
            run_algorithm(kind, config, &mut trial_env, conf, &mut rng)
        }));
        let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;

        let mut result = TrialResult {
            trial_id,
            algorithm: kind,
            num_arms: env.num_arms(),
            m: config.m,
            d: config.d,
            challenger_size: config.challenger_size,
            seed,
            selected: Vec::new(),
            correct: false,
            converged: false,
            pulls: 0,
            comparisons: 0,
            tau: 0,
            wall_time_ms,
            failure: None,
        };
        match outcome {
            Ok(Ok(run)) => {
                result.correct = run.converged && run.selected == truth;
                result.converged = run.converged;
                result.selected = run.selected;
                result.pulls = run.pulls;
                result.comparisons = run.comparisons;
                result.tau = run.rounds;
            }
            Ok(Err(e)) => result.failure = Some(e.to_string()),
            Err(panic) => {
                let msg = panic
                    .downcast_ref::<&str>()
                    .map(|s| s.to_string())
                    .or_else(|| panic.downcast_ref::<String>().cloned())
                    .unwrap_or_else(|| "panic".into());
                result.failure = Some(format!("panicked: {msg}"));
            }
        }
        if let Some(msg) = &result.failure {
            log::warn!("trial {trial_id} {kind} failed: {msg}");
        }
        out.push(result);
    }
    Ok(out)
}

/// All trials in memory, ordered by trial then algorithm.
pub fn run_trials(config: &ExperimentConfig) -> Result<Vec<TrialResult>> {
    config.validate()?;
    let conf = config.confidence()?;
    let per_trial: Vec<Result<Vec<TrialResult>>> = if config.parallel {
        (0..config.trials)
            .into_par_iter()
            .map(|t| run_trial(config, &conf, t))
            .collect()
    } else {
        (0..config.trials)
            .map(|t| {
                log::debug!("trial {t}");
                run_trial(config, &conf, t)
            })
            .collect()
    };
    let mut out = Vec::new();
    for r in per_trial {
        out.extend(r?);
    }
    Ok(out)
}

/// Runs the experiment and writes `results.csv` and `summary.json` into
/// `config.output_dir`. The directory is checked before any trial runs.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    config.validate()?;
    let dir = &config.output_dir;
    let dir_err = |source| Error::OutputDir {
        path: dir.clone(),
        source,
    };
    fs::create_dir_all(dir).map_err(dir_err)?;
    let results_path = dir.join(RESULTS_FILE);
    let summary_path = dir.join(SUMMARY_FILE);
    let results_file = File::create(&results_path).map_err(dir_err)?;

    let results = run_trials(config)?;
    let rows: Vec<ResultRow> = results.iter().map(TrialResult::row).collect();
    write_results(BufWriter::new(results_file), &rows)?;

    let stats = aggregate(&rows)?;
    let summary = Summary {
        groups: stats.groups.clone(),
        failures: results
            .iter()
            .filter_map(|r| {
                r.failure.as_ref().map(|message| TrialFailure {
                    trial_id: r.trial_id,
                    algo: r.algorithm,
                    message: message.clone(),
                })
            })
            .collect(),
        num_arms: config.num_arms(),
        m: config.m,
        exhaustive_pull_count: exhaustive_pull_count(config.num_arms(), config.m, 1)?.to_string(),
    };
    serde_json::to_writer_pretty(BufWriter::new(File::create(&summary_path)?), &summary)?;

    Ok(ExperimentOutput {
        results,
        stats,
        results_path,
        summary_path,
    })
}
