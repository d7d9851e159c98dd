use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::AlgorithmKind;
use crate::error::Result;

/// One algorithm run on one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial_id: usize,
    pub algorithm: AlgorithmKind,
    pub num_arms: usize,
    pub m: usize,
    pub d: usize,
    pub challenger_size: usize,
    pub seed: u64,
    /// Ascending. Empty for failed runs.
    pub selected: Vec<usize>,
    pub correct: bool,
    pub converged: bool,
    pub pulls: u64,
    pub comparisons: u64,
    pub tau: u64,
    pub wall_time_ms: f64,
    /// Set when the run panicked or returned an error.
    pub failure: Option<String>,
}

impl TrialResult {
    pub fn row(&self) -> ResultRow {
        ResultRow {
            trial_id: self.trial_id,
            algo: self.algorithm,
            num_arms: self.num_arms,
            m: self.m,
            d: self.d,
            challenger_size: self.challenger_size,
            seed: self.seed,
            correct: self.correct,
            converged: self.converged,
            pulls: self.pulls,
            comparisons: self.comparisons,
            tau: self.tau,
            wall_time_ms: self.wall_time_ms,
        }
    }
}

/// A results-CSV line. Field order is the column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub trial_id: usize,
    pub algo: AlgorithmKind,
    #[serde(rename = "K")]
    pub num_arms: usize,
    pub m: usize,
    pub d: usize,
    pub challenger_size: usize,
    pub seed: u64,
    pub correct: bool,
    pub converged: bool,
    pub pulls: u64,
    pub comparisons: u64,
    pub tau: u64,
    pub wall_time_ms: f64,
}

pub fn write_results<W: Write>(out: W, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(out);
    if rows.is_empty() {
        w.write_record([
            "trial_id",
            "algo",
            "K",
            "m",
            "d",
            "challenger_size",
            "seed",
            "correct",
            "converged",
            "pulls",
            "comparisons",
            "tau",
            "wall_time_ms",
        ])?;
    }
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_results<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for row in r.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}

impl ResultRow {
    pub fn read_file(path: impl AsRef<Path>) -> Result<Vec<ResultRow>> {
        read_results(File::open(path)?)
    }
}
