//! Top-m arm identification in linear bandits.
//!
//! The centerpiece is champion-challenger sampling ([`ccs`]): it keeps a
//! champion set of `m` arms and a short rotating list of challengers, and only
//! compares champions against challengers when looking for the most ambiguous
//! pair. Three reference algorithms ([`baselines`]) share the same estimator,
//! confidence widths and comparison counter so their costs can be compared
//! directly.
//!
//! Arms come from an OFDM downlink model ([`env`]): each subcarrier is an arm,
//! its reward is the achievable rate under a noisy SNR estimate, and its feature
//! vector is a polynomial expansion of the normalized SNR. The [`harness`]
//! module runs seeded experiments and writes per-trial CSV rows and a JSON
//! summary.

// `!(x >= 0.0)` deliberately rejects NaN along with negatives.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

mod algorithm;
pub mod baselines;
pub mod ccs;
pub mod env;
mod error;
pub mod gap;
pub mod harness;
pub mod linalg;

pub use algorithm::{RunOutcome, TopMAlgorithm};
pub use baselines::{LinGapE, LinGifa, LinUGapE};
pub use ccs::{Ccs, CcsConfig};
pub use env::{
    BanditEnv, ChannelConfig, FeatureMatrix, FeatureSource, LinearBandit, SyntheticLinearEnv,
};
pub use error::{Error, Result};
pub use gap::{ComparisonCounter, ConfidenceConfig};
pub use harness::{AlgorithmKind, ExperimentConfig, ResultRow, TrialResult};
pub use linalg::DesignState;
