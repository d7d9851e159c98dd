//! OFDM downlink bandit instances.
//!
//! Each subcarrier is an arm. Its true SNR comes from Rayleigh fading and a
//! fixed link budget, its mean reward is the achievable rate `log2(1 + γ)`, and
//! a pull returns the rate evaluated at an SNR estimate carrying a Gaussian
//! error in dB. Features are the powers `u, u², …, u^d` of the SNR normalized
//! by a reference SNR and clamped to `[0, 1]`.

use std::f64::consts::{LN_10, LN_2};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Thermal noise density in dBm/Hz.
pub const THERMAL_NOISE_DBM_PER_HZ: f64 = -174.0;

/// Lipschitz constant of `ξ ↦ log2(1 + γ·10^(ξ/10))`, uniform over `γ ≥ 0`.
pub const RATE_DB_LIPSCHITZ: f64 = LN_10 / (10.0 * LN_2);

/// Quantile of the unit-mean exponential used for the reference SNR.
const REFERENCE_QUANTILE: f64 = 0.99;

const REWARD_STREAM: u64 = 1;

/// A `d × K` feature matrix; column `a` is the feature vector of arm `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix(DMatrix<f64>);

impl FeatureMatrix {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.ncols() == 0 {
            return Err(invalid(
                "feature matrix must have at least one arm and one dimension",
            ));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(invalid("feature entries must be finite"));
        }
        Ok(Self(matrix))
    }

    /// Builds the matrix from one feature vector per arm.
    pub fn from_arms(arms: &[Vec<f64>]) -> Result<Self> {
        let dim = arms.first().map(Vec::len).unwrap_or(0);
        if arms.iter().any(|a| a.len() != dim) {
            return Err(invalid("all feature vectors must share one dimension"));
        }
        let flat: Vec<f64> = arms.iter().flatten().copied().collect();
        Self::new(DMatrix::from_column_slice(dim, arms.len(), &flat))
    }

    pub fn num_arms(&self) -> usize {
        self.0.ncols()
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn arm(&self, a: usize) -> &[f64] {
        let d = self.dim();
        &self.0.as_slice()[a * d..(a + 1) * d]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }
}

/// Anything the identification algorithms can pull.
pub trait LinearBandit {
    fn features(&self) -> &FeatureMatrix;

    /// Expected reward of every arm. Algorithms never read this; the harness
    /// uses it to score the returned set.
    fn true_means(&self) -> &[f64];

    fn pull(&mut self, arm: usize) -> Result<f64>;

    fn num_arms(&self) -> usize {
        self.features().num_arms()
    }

    fn dim(&self) -> usize {
        self.features().dim()
    }
}

/// Where the features' SNR comes from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSource {
    /// Features from the true per-tone SNR.
    #[default]
    TrueSnr,
    /// Features from one noisy SNR estimate per tone, drawn at construction.
    NoisyPilot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig {
    pub num_tones: usize,
    /// Hz.
    pub subcarrier_spacing: f64,
    pub per_tone_power_dbm: f64,
    pub noise_figure_db: f64,
    pub pathloss_db: f64,
    /// Standard deviation of the dB-domain SNR estimation error.
    pub snr_noise_std_db: f64,
    pub seed: u64,
    pub feature_source: FeatureSource,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            num_tones: 40,
            subcarrier_spacing: 15_000.0,
            per_tone_power_dbm: 2.22,
            noise_figure_db: 5.0,
            pathloss_db: -120.0,
            snr_noise_std_db: 1.0,
            seed: 0,
            feature_source: FeatureSource::TrueSnr,
        }
    }
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_tones == 0 {
            return Err(invalid("num_tones must be at least 1"));
        }
        if !(self.subcarrier_spacing > 0.0 && self.subcarrier_spacing.is_finite()) {
            return Err(invalid("subcarrier_spacing must be positive"));
        }
        if !(self.snr_noise_std_db >= 0.0 && self.snr_noise_std_db.is_finite()) {
            return Err(invalid("snr_noise_std_db must be non-negative"));
        }
        if self.per_tone_power_dbm.is_nan()
            || self.noise_figure_db.is_nan()
            || self.pathloss_db.is_nan()
        {
            return Err(invalid("link budget terms must not be NaN"));
        }
        Ok(())
    }

    /// Per-tone noise power in dBm: `-174 + 10 log10(Δf) + NF`.
    pub fn noise_power_dbm(&self) -> f64 {
        THERMAL_NOISE_DBM_PER_HZ + 10.0 * self.subcarrier_spacing.log10() + self.noise_figure_db
    }

    /// Per-tone noise power in watts.
    pub fn noise_power_watts(&self) -> f64 {
        dbm_to_watts(self.noise_power_dbm())
    }

    /// Total transmit power over all tones, in dBm.
    pub fn total_power_dbm(&self) -> f64 {
        self.per_tone_power_dbm + 10.0 * (self.num_tones as f64).log10()
    }

    /// SNR of a tone with unit fading gain: `P · 10^(PL/10) / σ²`.
    pub fn median_gain_snr(&self) -> f64 {
        dbm_to_watts(self.per_tone_power_dbm) * 10f64.powf(self.pathloss_db / 10.0)
            / self.noise_power_watts()
    }

    /// Normalization SNR for the feature map: the 99th percentile of the
    /// exponential SNR distribution implied by the link budget. Falls back to
    /// 1 when the link budget gives no signal at all.
    pub fn reference_snr(&self) -> f64 {
        let r = self.median_gain_snr() * -(1.0 - REFERENCE_QUANTILE).ln();
        if r > 0.0 && r.is_finite() {
            r
        } else {
            1.0
        }
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Achievable rate `log2(1 + γ)` in bits/s/Hz.
pub fn true_rate(gamma: f64) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(invalid(format!("SNR must be non-negative, got {gamma}")));
    }
    Ok(gamma.ln_1p() / LN_2)
}

/// `γ · 10^(ξ/10)` for a given dB error `ξ`.
pub fn apply_db_error(gamma: f64, xi_db: f64) -> f64 {
    gamma * 10f64.powf(xi_db / 10.0)
}

/// One noisy SNR estimate with a Gaussian dB error of standard deviation `sigma_xi_db`.
pub fn observe_snr<R: Rng + ?Sized>(gamma: f64, sigma_xi_db: f64, rng: &mut R) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    apply_db_error(gamma, sigma_xi_db * z)
}

/// Upper bound on the sub-Gaussian proxy standard deviation of the rate noise.
pub fn lipschitz_noise_bound(sigma_xi_db: f64) -> f64 {
    RATE_DB_LIPSCHITZ * sigma_xi_db
}

/// `(u, u², …, u^dim)` with `u = min(γ̂ / γ_ref, 1)`.
pub fn feature_map(gamma_hat: f64, dim: usize, gamma_ref: f64) -> Result<Vec<f64>> {
    if !(gamma_hat >= 0.0) {
        return Err(invalid("feature SNR must be non-negative"));
    }
    if !(gamma_ref > 0.0) {
        return Err(invalid("reference SNR must be positive"));
    }
    let u = (gamma_hat / gamma_ref).min(1.0);
    let mut out = Vec::with_capacity(dim);
    let mut p = 1.0;
    for _ in 0..dim {
        p *= u;
        out.push(p);
    }
    Ok(out)
}

/// Norm of the ridge fit of `log2(1 + γ_ref·u)` onto the feature map over
/// `u ∈ [0, 1]`. Used as the parameter-norm bound of the confidence radius.
pub fn surrogate_norm_bound(gamma_ref: f64, dim: usize, reg: f64) -> Result<f64> {
    const GRID: usize = 401;
    if !(gamma_ref > 0.0) || dim == 0 || !(reg > 0.0) {
        return Err(invalid(
            "surrogate fit needs positive reference SNR, dimension and regularization",
        ));
    }
    let mut design = DMatrix::<f64>::zeros(GRID, dim);
    let mut target = DVector::<f64>::zeros(GRID);
    for g in 0..GRID {
        let u = g as f64 / (GRID - 1) as f64;
        let row = feature_map(u * gamma_ref, dim, gamma_ref)?;
        for (j, v) in row.into_iter().enumerate() {
            design[(g, j)] = v;
        }
        target[g] = true_rate(u * gamma_ref)?;
    }
    let normal = design.transpose() * &design + DMatrix::<f64>::identity(dim, dim) * reg;
    let rhs = design.transpose() * target;
    let chol = normal.cholesky().ok_or_else(|| {
        Error::Numerical("surrogate normal equations are not positive definite".into())
    })?;
    Ok(chol.solve(&rhs).norm())
}

/// One OFDM channel realization, static for the identification episode.
#[derive(Debug, Clone)]
pub struct BanditEnv {
    config: ChannelConfig,
    true_snr: Vec<f64>,
    true_means: Vec<f64>,
    feature_snr: Vec<f64>,
    features: FeatureMatrix,
    gamma_ref: f64,
    rng: ChaCha8Rng,
}

impl BanditEnv {
    /// Draws fading, means and features; deterministic in `config.seed`.
    pub fn draw(config: &ChannelConfig, feature_dim: usize) -> Result<Self> {
        config.validate()?;
        if feature_dim == 0 {
            return Err(invalid("feature dimension must be at least 1"));
        }
        let k = config.num_tones;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let scale = config.median_gain_snr();

        let mut true_snr = Vec::with_capacity(k);
        for _ in 0..k {
            let h2: f64 = rng.sample(Exp1);
            true_snr.push(h2 * scale);
        }
        let true_means = true_snr
            .iter()
            .map(|&g| true_rate(g))
            .collect::<Result<Vec<_>>>()?;

        let feature_snr: Vec<f64> = match config.feature_source {
            FeatureSource::TrueSnr => true_snr.clone(),
            FeatureSource::NoisyPilot => true_snr
                .iter()
                .map(|&g| observe_snr(g, config.snr_noise_std_db, &mut rng))
                .collect(),
        };
        let gamma_ref = config.reference_snr();
        let arms = feature_snr
            .iter()
            .map(|&g| feature_map(g, feature_dim, gamma_ref))
            .collect::<Result<Vec<_>>>()?;
        let features = FeatureMatrix::from_arms(&arms)?;

        let mut reward_rng = ChaCha8Rng::seed_from_u64(config.seed);
        reward_rng.set_stream(REWARD_STREAM);

        Ok(Self {
            config: config.clone(),
            true_snr,
            true_means,
            feature_snr,
            features,
            gamma_ref,
            rng: reward_rng,
        })
    }

    pub fn config(&self) -> &ChannelConfig {
        &self.config
    }

    pub fn true_snr(&self) -> &[f64] {
        &self.true_snr
    }

    /// SNR values the features were built from.
    pub fn feature_snr(&self) -> &[f64] {
        &self.feature_snr
    }

    pub fn gamma_ref(&self) -> f64 {
        self.gamma_ref
    }

    /// Restarts the reward noise on an independent stream.
    pub fn reseed_rewards(&mut self, stream: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(stream);
        self.rng = rng;
    }
}

impl LinearBandit for BanditEnv {
    fn features(&self) -> &FeatureMatrix {
        &self.features
    }

    fn true_means(&self) -> &[f64] {
        &self.true_means
    }

    fn pull(&mut self, arm: usize) -> Result<f64> {
        let gamma = *self.true_snr.get(arm).ok_or_else(|| {
            invalid(format!(
                "arm {arm} out of range for {} tones",
                self.true_snr.len()
            ))
        })?;
        true_rate(observe_snr(
            gamma,
            self.config.snr_noise_std_db,
            &mut self.rng,
        ))
    }
}

/// A well-specified linear instance: `μ(a) = x_aᵀθ★` with Gaussian reward noise.
#[derive(Debug, Clone)]
pub struct SyntheticLinearEnv {
    features: FeatureMatrix,
    theta: Vec<f64>,
    means: Vec<f64>,
    noise_std: f64,
    rng: ChaCha8Rng,
}

impl SyntheticLinearEnv {
    pub fn new(
        features: FeatureMatrix,
        theta: Vec<f64>,
        noise_std: f64,
        seed: u64,
    ) -> Result<Self> {
        if theta.len() != features.dim() {
            return Err(invalid("parameter dimension does not match features"));
        }
        if !(noise_std >= 0.0) {
            return Err(invalid("noise standard deviation must be non-negative"));
        }
        let means = (0..features.num_arms())
            .map(|a| crate::linalg::dot(features.arm(a), &theta))
            .collect();
        Ok(Self {
            features,
            theta,
            means,
            noise_std,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    /// `num_arms` arms whose means are evenly spaced by `gap`, arm 0 highest.
    ///
    /// `θ★ = (theta_norm, 0, …, 0)`; the first feature coordinate carries the
    /// mean and the remaining coordinates are a random direction, so every
    /// feature vector has norm at most one. The layout depends only on
    /// `layout_seed`.
    pub fn ladder(
        num_arms: usize,
        dim: usize,
        gap: f64,
        theta_norm: f64,
        noise_std: f64,
        layout_seed: u64,
    ) -> Result<Self> {
        if num_arms < 2 || dim < 2 {
            return Err(invalid(
                "ladder instance needs at least two arms and two dimensions",
            ));
        }
        let half_span = gap * (num_arms - 1) as f64 / 2.0;
        if half_span > theta_norm {
            return Err(invalid("theta_norm too small for the requested gap"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(layout_seed);
        let mut arms = Vec::with_capacity(num_arms);
        for a in 0..num_arms {
            let mean = half_span - gap * a as f64;
            let lead = mean / theta_norm;
            let mut rest: Vec<f64> = (1..dim)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect();
            let n = rest
                .iter()
                .map(|v| v * v)
                .sum::<f64>()
                .sqrt()
                .max(f64::MIN_POSITIVE);
            let radius = (1.0 - lead * lead).max(0.0).sqrt() * rng.random::<f64>();
            rest.iter_mut().for_each(|v| *v *= radius / n);
            let mut x = vec![lead];
            x.extend(rest);
            arms.push(x);
        }
        let mut theta = vec![0.0; dim];
        theta[0] = theta_norm;
        Self::new(
            FeatureMatrix::from_arms(&arms)?,
            theta,
            noise_std,
            layout_seed,
        )
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn reseed_rewards(&mut self, seed: u64) {
        self.rng = ChaCha8Rng::seed_from_u64(seed);
    }
}

impl LinearBandit for SyntheticLinearEnv {
    fn features(&self) -> &FeatureMatrix {
        &self.features
    }

    fn true_means(&self) -> &[f64] {
        &self.means
    }

    fn pull(&mut self, arm: usize) -> Result<f64> {
        let mean = *self.means.get(arm).ok_or_else(|| {
            invalid(format!(
                "arm {arm} out of range for {} arms",
                self.means.len()
            ))
        })?;
        let z: f64 = self.rng.sample(StandardNormal);
        Ok(mean + self.noise_std * z)
    }
}
