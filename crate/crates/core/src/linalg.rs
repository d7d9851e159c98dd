//! Regularized least squares with rank-one Gram updates.
//!
//! [`DesignState`] keeps `V = λI + Σ x xᵀ`, its inverse, the response
//! accumulator `Σ y x` and the ridge estimate `θ̂ = V⁻¹ Σ y x`. The inverse is
//! maintained with the Sherman-Morrison identity and periodically rebuilt
//! from a Cholesky factorization of `V`.

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};

/// Number of incremental updates between full refactorizations.
pub const REFACTOR_INTERVAL: u32 = 1024;

/// Sherman-Morrison denominators below this trigger a direct refactorization.
pub const MIN_SM_DENOMINATOR: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct DesignState {
    reg: f64,
    gram: DMatrix<f64>,
    gram_inv: DMatrix<f64>,
    resp: DVector<f64>,
    theta_hat: DVector<f64>,
    log_det: f64,
    pulls: u64,
    since_refactor: u32,
}

impl DesignState {
    /// `V = reg·I`, `θ̂ = 0`.
    pub fn new(dim: usize, reg: f64) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("design dimension must be at least 1"));
        }
        if !(reg > 0.0 && reg.is_finite()) {
            return Err(invalid(format!(
                "regularization must be positive and finite, got {reg}"
            )));
        }
        Ok(Self {
            reg,
            gram: DMatrix::identity(dim, dim) * reg,
            gram_inv: DMatrix::identity(dim, dim) / reg,
            resp: DVector::zeros(dim),
            theta_hat: DVector::zeros(dim),
            log_det: dim as f64 * reg.ln(),
            pulls: 0,
            since_refactor: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.resp.len()
    }

    pub fn reg(&self) -> f64 {
        self.reg
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn gram_inv(&self) -> &DMatrix<f64> {
        &self.gram_inv
    }

    pub fn resp(&self) -> &DVector<f64> {
        &self.resp
    }

    pub fn theta_hat(&self) -> &DVector<f64> {
        &self.theta_hat
    }

    /// Number of rank-one updates applied.
    pub fn pulls(&self) -> u64 {
        self.pulls
    }

    /// `ln det V`, tracked with the matrix determinant lemma.
    pub fn log_det(&self) -> f64 {
        self.log_det
    }

    /// Adds the observation `(x, y)`.
    pub fn rank_one_update(&mut self, x: &[f64], y: f64) -> Result<()> {
        self.check_dim(x)?;
        if !y.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return Err(invalid("rank-one update requires finite inputs"));
        }
        let d = self.dim();
        let z = self.mul_inv(x);
        let denom = 1.0 + dot(x, &z);

        for j in 0..d {
            for i in 0..d {
                self.gram[(i, j)] += x[i] * x[j];
            }
        }
        for i in 0..d {
            self.resp[i] += y * x[i];
        }
        self.pulls += 1;
        self.since_refactor += 1;

        if denom < MIN_SM_DENOMINATOR
            || !denom.is_finite()
            || self.since_refactor >= REFACTOR_INTERVAL
        {
            self.refactor()?;
        } else {
            let scale = 1.0 / denom;
            for j in 0..d {
                let zj = z[j] * scale;
                for i in 0..d {
                    self.gram_inv[(i, j)] -= z[i] * zj;
                }
            }
            self.log_det += denom.ln();
        }
        self.theta_hat = &self.gram_inv * &self.resp;
        Ok(())
    }

    /// Rebuilds the inverse and log-determinant from a Cholesky factor of `V`.
    pub fn refactor(&mut self) -> Result<()> {
        let chol = self
            .gram
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Numerical("Gram matrix lost positive definiteness".into()))?;
        self.log_det = 2.0
            * chol
                .l_dirty()
                .diagonal()
                .iter()
                .map(|v| v.ln())
                .sum::<f64>();
        self.gram_inv = chol.inverse();
        // Keep the cached inverse exactly symmetric.
        let d = self.dim();
        for j in 0..d {
            for i in (j + 1)..d {
                let avg = 0.5 * (self.gram_inv[(i, j)] + self.gram_inv[(j, i)]);
                self.gram_inv[(i, j)] = avg;
                self.gram_inv[(j, i)] = avg;
            }
        }
        self.theta_hat = &self.gram_inv * &self.resp;
        self.since_refactor = 0;
        Ok(())
    }

    /// `sqrt(vᵀ V⁻¹ v)`.
    pub fn mahalanobis_norm(&self, v: &[f64]) -> Result<f64> {
        self.check_dim(v)?;
        Ok(self.quad_form(v).max(0.0).sqrt())
    }

    /// `‖x_i − x_j‖` in the `V⁻¹` metric without materializing the difference.
    pub fn diff_norm(&self, xi: &[f64], xj: &[f64]) -> Result<f64> {
        self.check_dim(xi)?;
        self.check_dim(xj)?;
        let d = self.dim();
        let mut acc = 0.0;
        for j in 0..d {
            let dj = xi[j] - xj[j];
            let col = self.gram_inv.column(j);
            let mut s = 0.0;
            for i in 0..d {
                s += col[i] * (xi[i] - xj[i]);
            }
            acc += s * dj;
        }
        Ok(acc.max(0.0).sqrt())
    }

    /// Norm of `v` in the metric of `(V + x xᵀ)⁻¹`, leaving the state untouched.
    pub fn norm_with_virtual_pull(&self, v: &[f64], x: &[f64]) -> Result<f64> {
        self.check_dim(v)?;
        self.check_dim(x)?;
        let vv = self.quad_form(v);
        let vx = self.bilinear(v, x);
        let xx = self.quad_form(x);
        Ok((vv - vx * vx / (1.0 + xx)).max(0.0).sqrt())
    }

    /// `Xᵀ V⁻¹ X` for a `d × K` feature matrix: entry `(a, b)` is `x_aᵀ V⁻¹ x_b`.
    ///
    /// Pair norms and their virtual-pull updates reduce to scalar arithmetic
    /// on this matrix.
    pub fn cross_metric(&self, features: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if features.nrows() != self.dim() {
            return Err(invalid(format!(
                "feature matrix has {} rows, design has dimension {}",
                features.nrows(),
                self.dim()
            )));
        }
        let projected = &self.gram_inv * features;
        Ok(features.transpose() * projected)
    }

    /// `x_aᵀ θ̂` for every column of a `d × K` feature matrix.
    pub fn predict_all(&self, features: &DMatrix<f64>) -> Vec<f64> {
        (features.transpose() * &self.theta_hat)
            .iter()
            .copied()
            .collect()
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        dot(x, self.theta_hat.as_slice())
    }

    /// Frobenius norm of `V · V⁻¹ − I`.
    pub fn inverse_residual(&self) -> f64 {
        let d = self.dim();
        ((&self.gram * &self.gram_inv) - DMatrix::<f64>::identity(d, d)).norm()
    }

    fn check_dim(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(invalid(format!(
                "vector has length {}, design has dimension {}",
                v.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    fn mul_inv(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim();
        let mut out = vec![0.0; d];
        for j in 0..d {
            let xj = x[j];
            if xj == 0.0 {
                continue;
            }
            let col = self.gram_inv.column(j);
            for i in 0..d {
                out[i] += col[i] * xj;
            }
        }
        out
    }

    fn quad_form(&self, v: &[f64]) -> f64 {
        self.bilinear(v, v)
    }

    fn bilinear(&self, u: &[f64], v: &[f64]) -> f64 {
        let d = self.dim();
        let mut acc = 0.0;
        for j in 0..d {
            let col = self.gram_inv.column(j);
            let mut s = 0.0;
            for i in 0..d {
                s += col[i] * u[i];
            }
            acc += s * v[j];
        }
        acc
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn direct_inverse(m: &DMatrix<f64>) -> DMatrix<f64> {
        m.clone().try_inverse().expect("invertible")
    }

    #[test]
    fn init_identity() {
        let s = DesignState::new(2, 1.0).unwrap();
        assert_eq!(s.gram(), &DMatrix::identity(2, 2));
        assert_eq!(s.theta_hat().as_slice(), &[0.0, 0.0]);
        assert_eq!(s.pulls(), 0);

        let s = DesignState::new(1, 2.0).unwrap();
        assert_eq!(s.gram()[(0, 0)], 2.0);
        assert_eq!(s.gram_inv()[(0, 0)], 0.5);

        let s = DesignState::new(20, 1.0).unwrap();
        assert_eq!(s.gram(), &DMatrix::identity(20, 20));
    }

    #[test]
    fn init_rejects_bad_arguments() {
        assert!(DesignState::new(0, 1.0).is_err());
        assert!(DesignState::new(3, 0.0).is_err());
        assert!(DesignState::new(3, -1.0).is_err());
        assert!(DesignState::new(3, f64::NAN).is_err());
    }

    #[test]
    fn single_update_closed_form() {
        let mut s = DesignState::new(2, 1.0).unwrap();
        s.rank_one_update(&[1.0, 0.0], 1.0).unwrap();
        assert_eq!(
            s.gram(),
            &DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0])
        );
        assert_relative_eq!(s.gram_inv()[(0, 0)], 0.5);
        assert_relative_eq!(s.gram_inv()[(1, 1)], 1.0);
        assert_relative_eq!(s.theta_hat()[0], 0.5);
        assert_relative_eq!(s.theta_hat()[1], 0.0);
        assert_relative_eq!(s.mahalanobis_norm(&[1.0, 0.0]).unwrap(), 0.5f64.sqrt());
    }

    #[test]
    fn zero_vector_update_only_counts() {
        let mut s = DesignState::new(2, 1.0).unwrap();
        let before = s.clone();
        s.rank_one_update(&[0.0, 0.0], 0.0).unwrap();
        assert_eq!(s.pulls(), 1);
        assert_eq!(s.gram(), before.gram());
        assert_eq!(s.gram_inv(), before.gram_inv());
        assert_eq!(s.theta_hat(), before.theta_hat());
    }

    #[test]
    fn update_rejects_non_finite_and_wrong_length() {
        let mut s = DesignState::new(2, 1.0).unwrap();
        assert!(s.rank_one_update(&[f64::NAN, 0.0], 1.0).is_err());
        assert!(s.rank_one_update(&[1.0, 0.0], f64::INFINITY).is_err());
        assert!(s.rank_one_update(&[1.0], 1.0).is_err());
        assert_eq!(s.pulls(), 0);
    }

    #[test]
    fn norms() {
        let s = DesignState::new(2, 1.0).unwrap();
        assert_eq!(s.mahalanobis_norm(&[0.0, 0.0]).unwrap(), 0.0);
        assert_relative_eq!(s.mahalanobis_norm(&[3.0, 4.0]).unwrap(), 5.0);
        assert!(s.mahalanobis_norm(&[1.0, 2.0, 3.0]).is_err());

        assert_eq!(
            s.norm_with_virtual_pull(&[0.0, 0.0], &[1.0, 1.0]).unwrap(),
            0.0
        );
        assert_relative_eq!(
            s.norm_with_virtual_pull(&[1.0, 0.0], &[1.0, 0.0]).unwrap(),
            0.5f64.sqrt()
        );
        assert_relative_eq!(
            s.norm_with_virtual_pull(&[1.0, 0.0], &[0.0, 1.0]).unwrap(),
            1.0
        );
        assert!(s.norm_with_virtual_pull(&[1.0, 0.0], &[0.0]).is_err());
    }

    #[test]
    fn sherman_morrison_tracks_direct_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut s = DesignState::new(6, 1.0).unwrap();
        for _ in 0..500 {
            let x: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
            s.rank_one_update(&x, rng.random_range(-2.0..2.0)).unwrap();
        }
        let direct = direct_inverse(s.gram());
        let max_err = (s.gram_inv() - &direct).abs().max();
        assert!(max_err <= 1e-8, "max elementwise error {max_err}");
        assert!(s.inverse_residual() <= 1e-8);

        let det = s.gram().determinant();
        assert_relative_eq!(s.log_det(), det.ln(), max_relative = 1e-9);
    }

    #[test]
    fn refactor_interval_keeps_theta_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut s = DesignState::new(4, 0.5).unwrap();
        for _ in 0..(REFACTOR_INTERVAL as usize + 10) {
            let x: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
            s.rank_one_update(&x, rng.random_range(-1.0..1.0)).unwrap();
        }
        let expected = direct_inverse(s.gram()) * s.resp();
        assert!((s.theta_hat() - expected).abs().max() < 1e-9);
    }

    #[test]
    fn cross_metric_matches_pairwise_norms() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut s = DesignState::new(3, 1.0).unwrap();
        for _ in 0..20 {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            s.rank_one_update(&x, 0.3).unwrap();
        }
        let feats = DMatrix::from_fn(3, 5, |_, _| rng.random_range(-1.0..1.0));
        let q = s.cross_metric(&feats).unwrap();
        for a in 0..5 {
            for b in 0..5 {
                let xa: Vec<f64> = feats.column(a).iter().copied().collect();
                let xb: Vec<f64> = feats.column(b).iter().copied().collect();
                let n2 = q[(a, a)] + q[(b, b)] - 2.0 * q[(a, b)];
                assert_relative_eq!(
                    n2.max(0.0).sqrt(),
                    s.diff_norm(&xa, &xb).unwrap(),
                    epsilon = 1e-10
                );
            }
        }
    }

    fn finite_vec(d: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-3.0f64..3.0, d)
    }

    proptest! {
        #[test]
        fn virtual_pull_never_increases_norm(
            updates in proptest::collection::vec(finite_vec(4), 0..20),
            v in finite_vec(4),
            x in finite_vec(4),
        ) {
            let mut s = DesignState::new(4, 1.0).unwrap();
            for u in &updates {
                s.rank_one_update(u, 1.0).unwrap();
            }
            let base = s.mahalanobis_norm(&v).unwrap();
            let virt = s.norm_with_virtual_pull(&v, &x).unwrap();
            prop_assert!(virt <= base + 1e-12);
        }

        #[test]
        fn norm_is_monotone_in_updates(
            updates in proptest::collection::vec(finite_vec(3), 1..30),
            v in finite_vec(3),
        ) {
            let mut s = DesignState::new(3, 1.0).unwrap();
            let mut last = s.mahalanobis_norm(&v).unwrap();
            for u in &updates {
                s.rank_one_update(u, 0.0).unwrap();
                let now = s.mahalanobis_norm(&v).unwrap();
                prop_assert!(now <= last + 1e-12);
                last = now;
            }
        }

        #[test]
        fn virtual_pull_matches_real_update(
            v in finite_vec(3),
            x in finite_vec(3),
        ) {
            let s = DesignState::new(3, 1.0).unwrap();
            let virt = s.norm_with_virtual_pull(&v, &x).unwrap();
            let mut real = s.clone();
            real.rank_one_update(&x, 0.0).unwrap();
            let after = real.mahalanobis_norm(&v).unwrap();
            prop_assert!((virt - after).abs() <= 1e-9 * (1.0 + after));
        }
    }
}
