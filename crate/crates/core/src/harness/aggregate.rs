use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{AlgorithmKind, ResultRow, TrialFailure};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    /// Sample standard deviation; zero for a single value.
    pub std: f64,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> Option<Self> {
        let n = values.len();
        if n == 0 {
            return None;
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Some(Self { mean, std })
    }
}

/// Statistics for one `(algorithm, K, challenger_size)` group. Means and
/// standard deviations use converged trials only; `None` when there are none.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub algo: AlgorithmKind,
    #[serde(rename = "K")]
    pub num_arms: usize,
    pub challenger_size: usize,
    pub trials: usize,
    pub converged: usize,
    pub non_converged: usize,
    /// Fraction of all trials in the group that returned the true top-m.
    pub correctness: f64,
    pub comparisons: Option<MeanStd>,
    pub pulls: Option<MeanStd>,
    pub tau: Option<MeanStd>,
    pub wall_time_ms: Option<MeanStd>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub groups: Vec<GroupStats>,
}

impl AggregateStats {
    pub fn group(&self, algo: AlgorithmKind) -> Option<&GroupStats> {
        self.groups.iter().find(|g| g.algo == algo)
    }
}

/// Groups rows by `(algorithm, K, challenger_size)`.
pub fn aggregate(rows: &[ResultRow]) -> Result<AggregateStats> {
    if rows.is_empty() {
        return Err(invalid("cannot aggregate an empty result set"));
    }
    let mut groups: BTreeMap<(AlgorithmKind, usize, usize), Vec<&ResultRow>> = BTreeMap::new();
    for row in rows {
        groups
            .entry((row.algo, row.num_arms, row.challenger_size))
            .or_default()
            .push(row);
    }
    let groups = groups
        .into_iter()
        .map(|((algo, num_arms, challenger_size), rows)| {
            let done: Vec<&&ResultRow> = rows.iter().filter(|r| r.converged).collect();
            let stat = |f: fn(&ResultRow) -> f64| {
                MeanStd::of(&done.iter().map(|r| f(r)).collect::<Vec<_>>())
            };
            GroupStats {
                algo,
                num_arms,
                challenger_size,
                trials: rows.len(),
                converged: done.len(),
                non_converged: rows.len() - done.len(),
                correctness: rows.iter().filter(|r| r.correct).count() as f64 / rows.len() as f64,
                comparisons: stat(|r| r.comparisons as f64),
                pulls: stat(|r| r.pulls as f64),
                tau: stat(|r| r.tau as f64),
                wall_time_ms: stat(|r| r.wall_time_ms),
            }
        })
        .collect();
    Ok(AggregateStats { groups })
}

/// Contents of the summary JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub groups: Vec<GroupStats>,
    pub failures: Vec<TrialFailure>,
    #[serde(rename = "K")]
    pub num_arms: usize,
    pub m: usize,
    /// `m · C(K, m)` as a decimal string; it overflows 64 bits for large `K`.
    pub exhaustive_pull_count: String,
}
