//! Seeded experiments: configuration, correctness oracle, per-trial records,
//! aggregation and persistence.

mod aggregate;
mod config;
mod experiment;
mod oracle;
mod record;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use aggregate::{aggregate, AggregateStats, GroupStats, MeanStd, Summary};
pub use config::ExperimentConfig;
pub use experiment::{
    run_algorithm, run_experiment, run_trial, run_trials, stream_key, ExperimentOutput,
    TrialFailure, RESULTS_FILE, SUMMARY_FILE,
};
pub use oracle::{binomial, exhaustive_pull_count, oracle_top_m, OracleMode, MAX_ENUMERATION_ARMS};
pub use record::{read_results, write_results, ResultRow, TrialResult};

use crate::error::{invalid, Error};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmKind {
    Ccs,
    LinGapE,
    LinUGapE,
    LinGifa,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 4] = [Self::Ccs, Self::LinGapE, Self::LinUGapE, Self::LinGifa];

    pub fn name(self) -> &'static str {
        match self {
            Self::Ccs => "ccs",
            Self::LinGapE => "lingape",
            Self::LinUGapE => "linugape",
            Self::LinGifa => "lingifa",
        }
    }

    /// Parses one algorithm name, or `all` for every algorithm.
    pub fn parse_selection(s: &str) -> Result<Vec<Self>, Error> {
        if s.eq_ignore_ascii_case("all") {
            Ok(Self::ALL.to_vec())
        } else {
            Ok(vec![s.parse()?])
        }
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlgorithmKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                invalid(format!(
                    "unknown algorithm {s:?}; expected ccs, lingape, linugape, lingifa or all"
                ))
            })
    }
}
