use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::AlgorithmKind;
use crate::baselines::BaselineConfig;
use crate::ccs::CcsConfig;
use crate::env::{surrogate_norm_bound, ChannelConfig};
use crate::error::{invalid, Result};
use crate::gap::ConfidenceConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `channel.seed` is ignored; trial `t` uses `seed_base + t`.
    pub channel: ChannelConfig,
    pub algorithms: Vec<AlgorithmKind>,
    pub m: usize,
    /// Feature dimension.
    pub d: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub challenger_size: usize,
    pub trials: usize,
    pub seed_base: u64,
    pub output_dir: PathBuf,
    pub sigma: f64,
    pub reg: f64,
    /// Parameter-norm bound `S`. When absent it is taken from the surrogate
    /// ridge fit at the reference SNR.
    pub theta_norm_bound: Option<f64>,
    pub max_rounds: u64,
    /// Run trials on the rayon pool. Wall times then share the machine.
    pub parallel: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            channel: ChannelConfig::default(),
            algorithms: AlgorithmKind::ALL.to_vec(),
            m: 12,
            d: 20,
            epsilon: 1e-15,
            delta: 0.05,
            challenger_size: 10,
            trials: 50,
            seed_base: 0,
            output_dir: PathBuf::from("results"),
            sigma: 1.0,
            reg: 1.0,
            theta_norm_bound: None,
            max_rounds: crate::ccs::DEFAULT_MAX_ROUNDS,
            parallel: false,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let config: Self = serde_json::from_str(&text)?;
        Ok(config)
    }

    pub fn num_arms(&self) -> usize {
        self.channel.num_tones
    }

    pub fn validate(&self) -> Result<()> {
        self.channel.validate()?;
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        if self.algorithms.is_empty() {
            return Err(invalid("no algorithms selected"));
        }
        if self.d == 0 {
            return Err(invalid("feature dimension d must be at least 1"));
        }
        if let Some(s) = self.theta_norm_bound {
            if !(s > 0.0 && s.is_finite()) {
                return Err(invalid("theta_norm_bound must be positive and finite"));
            }
        }
        self.ccs_config().validate(self.num_arms())?;
        self.baseline_config().validate(self.num_arms())?;
        ConfidenceConfig {
            delta: self.delta,
            sigma: self.sigma,
            reg: self.reg,
            ..Default::default()
        }
        .validate()
    }

    pub fn ccs_config(&self) -> CcsConfig {
        CcsConfig {
            m: self.m,
            challenger_size: self.challenger_size,
            epsilon: self.epsilon,
            max_rounds: self.max_rounds,
        }
    }

    pub fn baseline_config(&self) -> BaselineConfig {
        BaselineConfig {
            m: self.m,
            epsilon: self.epsilon,
            max_rounds: self.max_rounds,
        }
    }

    /// Confidence settings shared by every algorithm. Features have entries
    /// in `[0, 1]`, so `‖x‖₂ ≤ √d`.
    pub fn confidence(&self) -> Result<ConfidenceConfig> {
        let theta_norm_bound = match self.theta_norm_bound {
            Some(s) => s,
            None => surrogate_norm_bound(self.channel.reference_snr(), self.d, self.reg)?,
        };
        let conf = ConfidenceConfig {
            delta: self.delta,
            sigma: self.sigma,
            reg: self.reg,
            theta_norm_bound,
            feature_norm_bound: (self.d as f64).sqrt(),
        };
        conf.validate()?;
        Ok(conf)
    }
}
