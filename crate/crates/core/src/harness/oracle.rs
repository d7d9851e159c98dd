use num_bigint::BigUint;

use crate::error::{invalid, Result};
use crate::gap::rank_desc;

/// Largest `K` for which subset enumeration is allowed.
pub const MAX_ENUMERATION_ARMS: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMode {
    /// Top-m by mean, ties to the lower index.
    Sort,
    /// Best summed mean over all size-m subsets, first in lexicographic order on ties.
    Enumerate,
}

/// The true top-m set, ascending.
pub fn oracle_top_m(means: &[f64], m: usize, mode: OracleMode) -> Result<Vec<usize>> {
    let k = means.len();
    if m == 0 || m > k {
        return Err(invalid(format!("need 1 ≤ m ≤ K, got m = {m}, K = {k}")));
    }
    if means.iter().any(|v| !v.is_finite()) {
        return Err(invalid("means must be finite"));
    }
    match mode {
        OracleMode::Sort => {
            let mut top = rank_desc(means)[..m].to_vec();
            top.sort_unstable();
            Ok(top)
        }
        OracleMode::Enumerate => {
            if k > MAX_ENUMERATION_ARMS {
                return Err(invalid(format!(
                    "subset enumeration refused for K = {k} > {MAX_ENUMERATION_ARMS}"
                )));
            }
            let mut subset: Vec<usize> = (0..m).collect();
            let mut best = (f64::NEG_INFINITY, subset.clone());
            loop {
                let total: f64 = subset.iter().map(|&a| means[a]).sum();
                if total > best.0 {
                    best = (total, subset.clone());
                }
                if !next_combination(&mut subset, k) {
                    return Ok(best.1);
                }
            }
        }
    }
}

/// Advances to the next `m`-subset of `0..n` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let m = c.len();
    let Some(i) = (0..m).rev().find(|&i| c[i] < n - m + i) else {
        return false;
    };
    c[i] += 1;
    for j in i + 1..m {
        c[j] = c[j - 1] + 1;
    }
    true
}

/// `C(n, k)` by Pascal's rule.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::from(0u8);
    }
    let k = k.min(n - k);
    let mut row = vec![BigUint::from(0u8); k + 1];
    row[0] = BigUint::from(1u8);
    for i in 1..=n {
        for j in (1..=k.min(i)).rev() {
            let prev = row[j - 1].clone();
            row[j] += prev;
        }
    }
    row.swap_remove(k)
}

/// Pulls needed to score every size-m subset with `samples_per_arm` pulls
/// per member: `m · M · C(K, m)`.
pub fn exhaustive_pull_count(num_arms: usize, m: usize, samples_per_arm: u64) -> Result<BigUint> {
    if m == 0 || m > num_arms || samples_per_arm == 0 {
        return Err(invalid("need K ≥ m ≥ 1 and at least one sample per arm"));
    }
    Ok(binomial(num_arms, m) * BigUint::from(m) * BigUint::from(samples_per_arm))
}
