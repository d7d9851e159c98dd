//! Confidence widths, gap indices and instance diagnostics.

use std::collections::BTreeSet;

use crate::error::{invalid, Result};
use crate::linalg::DesignState;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceConfig {
    pub delta: f64,
    /// Sub-Gaussian proxy of the reward noise.
    pub sigma: f64,
    pub reg: f64,
    /// Upper bound `S` on `‖θ★‖₂`.
    pub theta_norm_bound: f64,
    /// Upper bound `L` on `‖x_a‖₂`.
    pub feature_norm_bound: f64,
}

impl Default for ConfidenceConfig {
    fn default() -> Self {
        Self {
            delta: 0.05,
            sigma: 1.0,
            reg: 1.0,
            theta_norm_bound: 1.0,
            feature_norm_bound: 1.0,
        }
    }
}

impl ConfidenceConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(invalid(format!(
                "delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        for (name, v) in [
            ("sigma", self.sigma),
            ("reg", self.reg),
            ("theta_norm_bound", self.theta_norm_bound),
            ("feature_norm_bound", self.feature_norm_bound),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Data-independent upper bound on [`beta`] after `t` pulls, from
    /// `det V_t ≤ (λ + t L² / d)^d`.
    pub fn beta_upper_bound(&self, t: u64, dim: usize) -> f64 {
        let d = dim as f64;
        let log_det_ratio =
            d * (1.0 + t as f64 * self.feature_norm_bound.powi(2) / (d * self.reg)).ln();
        self.reg.sqrt() * self.theta_norm_bound
            + self.sigma * (2.0 * (1.0 / self.delta).ln() + log_det_ratio).sqrt()
    }
}

/// Counts gap-index evaluations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ComparisonCounter {
    count: u64,
}

impl ComparisonCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    #[inline]
    fn record(&mut self) {
        self.count += 1;
    }
}

/// Self-normalized confidence radius
/// `√λ·S + σ·sqrt(2 ln(1/δ) + ln(det V / λ^d))`.
pub fn beta(state: &DesignState, conf: &ConfidenceConfig) -> f64 {
    let d = state.dim() as f64;
    let log_det_ratio = (state.log_det() - d * conf.reg.ln()).max(0.0);
    conf.reg.sqrt() * conf.theta_norm_bound
        + conf.sigma * (2.0 * (1.0 / conf.delta).ln() + log_det_ratio).sqrt()
}

/// `W_t(i, j) = β_t · ‖x_i − x_j‖_{V⁻¹}`.
pub fn width(
    state: &DesignState,
    x_i: &[f64],
    x_j: &[f64],
    conf: &ConfidenceConfig,
) -> Result<f64> {
    Ok(beta(state, conf) * state.diff_norm(x_i, x_j)?)
}

/// `B_t(i, j) = μ̂_i − μ̂_j + W_t(i, j)`; every call is one comparison.
#[inline]
pub fn gap_index(mu_hat_i: f64, mu_hat_j: f64, w: f64, counter: &mut ComparisonCounter) -> f64 {
    counter.record();
    mu_hat_i - mu_hat_j + w
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceDiagnostics {
    pub true_gaps: Vec<f64>,
    pub top_m_set: BTreeSet<usize>,
    /// Arms sorted by decreasing mean, ties by ascending index.
    pub ranking: Vec<usize>,
}

/// Arms sorted by decreasing value; equal values keep ascending index order.
pub(crate) fn rank_desc(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    order
}

/// Distance of every arm from the top-m boundary: `μ(i) − μ(m+1)` inside
/// the top-m set, `μ(m) − μ(i)` outside it.
pub fn true_gaps(means: &[f64], m: usize) -> Result<InstanceDiagnostics> {
    let k = means.len();
    if m == 0 || m >= k {
        return Err(invalid(format!("need 1 ≤ m < K, got m = {m}, K = {k}")));
    }
    if means.iter().any(|v| !v.is_finite()) {
        return Err(invalid("means must be finite"));
    }
    let ranking = rank_desc(means);
    let mu_m = means[ranking[m - 1]];
    let mu_m1 = means[ranking[m]];
    let top_m_set: BTreeSet<usize> = ranking[..m].iter().copied().collect();
    let true_gaps = (0..k)
        .map(|i| {
            if top_m_set.contains(&i) {
                means[i] - mu_m1
            } else {
                mu_m - means[i]
            }
        })
        .collect();
    Ok(InstanceDiagnostics {
        true_gaps,
        top_m_set,
        ranking,
    })
}

/// `H = 4σ² Σ_a max(ε, (ε + G_a)/3)^(-2)`. Infinite when some term has a
/// zero denominator (`ε = 0` and a zero gap).
pub fn complexity_h(diag: &InstanceDiagnostics, sigma: f64, epsilon: f64) -> f64 {
    4.0 * sigma
        * sigma
        * diag
            .true_gaps
            .iter()
            .map(|&g| {
                let denom = epsilon.max((epsilon + g) / 3.0);
                if denom > 0.0 {
                    denom.powi(-2)
                } else {
                    f64::INFINITY
                }
            })
            .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn conf() -> ConfidenceConfig {
        ConfidenceConfig::default()
    }

    #[test]
    fn beta_at_initialization() {
        let s = DesignState::new(3, 1.0).unwrap();
        let b = beta(&s, &conf());
        assert_relative_eq!(b, 1.0 + (2.0 * 20f64.ln()).sqrt(), epsilon = 1e-12);
        assert_relative_eq!(b, 3.448, epsilon = 1e-3);
    }

    #[test]
    fn beta_grows_with_updates() {
        let mut s = DesignState::new(3, 1.0).unwrap();
        let b0 = beta(&s, &conf());
        let mut last = b0;
        for i in 0..50 {
            s.rank_one_update(&[1.0, (i as f64).sin(), 0.5], 0.0)
                .unwrap();
            let b = beta(&s, &conf());
            assert!(b >= last - 1e-12);
            last = b;
        }
        assert!(last > b0);
        assert!(last <= conf().beta_upper_bound(50, 3) * 2.0);
    }

    #[test]
    fn widths() {
        let s = DesignState::new(4, 1.0).unwrap();
        let x = [0.3, 0.1, 0.0, 2.0];
        assert_eq!(width(&s, &x, &x, &conf()).unwrap(), 0.0);
        let w = width(&s, &[1.0, 0.0, 0.0, 0.0], &[0.0; 4], &conf()).unwrap();
        assert_relative_eq!(w, 3.448, epsilon = 1e-3);
        assert!(width(&s, &[1.0], &[0.0; 4], &conf()).is_err());
    }

    #[test]
    fn width_norm_factor_shrinks_under_repeated_pulls() {
        let mut s = DesignState::new(3, 1.0).unwrap();
        let xi = [0.9, 0.2, 0.1];
        let xj = [0.1, 0.4, 0.3];
        let mut factors = Vec::new();
        for _ in 0..100 {
            factors.push(s.diff_norm(&xi, &xj).unwrap());
            s.rank_one_update(&xi, 1.0).unwrap();
        }
        assert!(factors.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    }

    #[test]
    fn gap_index_arithmetic() {
        let mut c = ComparisonCounter::new();
        assert_eq!(gap_index(5.0, 5.0, 0.0, &mut c), 0.0);
        assert_eq!(gap_index(2.0, 3.0, 0.5, &mut c), -0.5);
        assert_eq!(c.count(), 2);
        let w = 0.7;
        let s = gap_index(1.3, -0.4, w, &mut c) + gap_index(-0.4, 1.3, w, &mut c);
        assert_relative_eq!(s, 2.0 * w);
        assert_eq!(c.count(), 4);
    }

    #[test]
    fn true_gap_examples() {
        let d = true_gaps(&[3.0, 2.0, 1.0], 1).unwrap();
        assert_eq!(d.true_gaps, vec![1.0, 1.0, 2.0]);
        assert_eq!(d.top_m_set, BTreeSet::from([0]));

        let d = true_gaps(&[2.0; 5], 3).unwrap();
        assert!(d.true_gaps.iter().all(|&g| g == 0.0));
        assert_eq!(d.top_m_set, BTreeSet::from([0, 1, 2]));

        let d = true_gaps(&[5.0, 4.0, 4.0, 1.0], 2).unwrap();
        assert_eq!(d.true_gaps, vec![1.0, 0.0, 0.0, 3.0]);

        assert!(true_gaps(&[1.0, 2.0], 2).is_err());
        assert!(true_gaps(&[1.0, 2.0], 0).is_err());
    }

    #[test]
    fn complexity_examples() {
        let single = InstanceDiagnostics {
            true_gaps: vec![3.0],
            top_m_set: BTreeSet::new(),
            ranking: vec![0],
        };
        assert_relative_eq!(complexity_h(&single, 1.0, 0.0), 4.0);
        let two = InstanceDiagnostics {
            true_gaps: vec![3.0, 3.0],
            ..single.clone()
        };
        assert_relative_eq!(complexity_h(&two, 1.0, 0.0), 8.0);
        assert_relative_eq!(complexity_h(&two, 2.0, 0.0), 32.0);
        let zero = InstanceDiagnostics {
            true_gaps: vec![0.0, 1.0],
            ..single
        };
        assert!(complexity_h(&zero, 1.0, 0.0).is_infinite());
        assert!(complexity_h(&zero, 1.0, 0.1).is_finite());
    }

    proptest! {
        #[test]
        fn true_gap_structure(means in proptest::collection::vec(-10.0f64..10.0, 2..30), m_frac in 0.0f64..1.0) {
            let k = means.len();
            let m = 1 + ((k - 1) as f64 * m_frac) as usize % (k - 1);
            let d = true_gaps(&means, m).unwrap();
            prop_assert_eq!(d.top_m_set.len(), m);
            prop_assert!(d.true_gaps.iter().all(|&g| g >= 0.0));
            let mut sorted = means.clone();
            sorted.sort_by(|a, b| b.total_cmp(a));
            for i in 0..k {
                let expect = if d.top_m_set.contains(&i) { means[i] - sorted[m] } else { sorted[m - 1] - means[i] };
                prop_assert_eq!(d.true_gaps[i], expect);
            }
        }

        #[test]
        fn complexity_matches_direct_formula(
            gaps in proptest::collection::vec(0.01f64..5.0, 1..40),
            sigma in 0.1f64..3.0,
            eps in 0.0f64..0.5,
        ) {
            let diag = InstanceDiagnostics { true_gaps: gaps.clone(), top_m_set: BTreeSet::new(), ranking: vec![] };
            let mut direct = 0.0;
            for g in &gaps {
                let a = eps;
                let b = (eps + g) / 3.0;
                let m = if a > b { a } else { b };
                direct += 1.0 / (m * m);
            }
            direct *= 4.0 * sigma * sigma;
            let h = complexity_h(&diag, sigma, eps);
            prop_assert!(((h - direct) / direct).abs() <= 1e-12);
        }

        #[test]
        fn width_is_symmetric(
            xi in proptest::collection::vec(-2.0f64..2.0, 3),
            xj in proptest::collection::vec(-2.0f64..2.0, 3),
            upd in proptest::collection::vec(proptest::collection::vec(-1.0f64..1.0, 3), 0..10),
        ) {
            let mut s = DesignState::new(3, 1.0).unwrap();
            for u in &upd { s.rank_one_update(u, 0.5).unwrap(); }
            prop_assert_eq!(width(&s, &xi, &xj, &conf()).unwrap(), width(&s, &xj, &xi, &conf()).unwrap());
        }
    }
}
