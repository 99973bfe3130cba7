use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::second_moments;
use crate::scm::Dataset;

/// L1 path settings for parent selection by BIC.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ParentSearchConfig {
    /// Number of geometric grid points from `lambda_max` down.
    pub n_lambdas: usize,
    /// Smallest grid value as a fraction of `lambda_max`.
    pub min_ratio: f64,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for ParentSearchConfig {
    fn default() -> Self {
        Self { n_lambdas: 100, min_ratio: 1e-4, max_iter: 1000, tol: 1e-7 }
    }
}

impl ParentSearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_lambdas == 0 || !(self.min_ratio > 0.0 && self.min_ratio < 1.0) || !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(Error::Config(format!("invalid parent search settings {self:?}")));
        }
        Ok(())
    }

    fn grid(&self, lambda_max: f64) -> Vec<f64> {
        if self.n_lambdas == 1 {
            return vec![lambda_max];
        }
        let step = self.min_ratio.ln() / (self.n_lambdas - 1) as f64;
        (0..self.n_lambdas).map(|t| lambda_max * (step * t as f64).exp()).collect()
    }
}

/// Parent weights of `target` among `candidates`.
///
/// Coordinate descent traces an adaptive lasso path, with each candidate's
/// penalty scaled by the inverse magnitude of its least-squares coefficient.
/// The path point minimizing `BIC = n ln(RSS/n) + ln(n) k` is returned;
/// zeros mark non-parents.
pub fn lasso_bic_parents(data: &Dataset, target: usize, candidates: &[usize], cfg: &ParentSearchConfig) -> Result<Vec<f64>> {
    if candidates.contains(&target) {
        return Err(Error::Config(format!("target {target} listed among its own candidates")));
    }
    if data.x().iter().any(|v| !v.is_finite()) {
        return Err(Error::Data("non-finite entry in data".into()));
    }
    if candidates.is_empty() {
        return Ok(Vec::new());
    }
    lasso_bic_from_moments(&second_moments(data.x(), true), data.n(), target, candidates, cfg)
}

/// As [`lasso_bic_parents`], from the centered second-moment matrix `S = XᵀX/n`.
pub(crate) fn lasso_bic_from_moments(
    s: &DMatrix<f64>,
    n: usize,
    target: usize,
    candidates: &[usize],
    cfg: &ParentSearchConfig,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    let p = candidates.len();
    if p == 0 {
        return Ok(Vec::new());
    }
    let syy = s[(target, target)];
    let raw_gram = DMatrix::from_fn(p, p, |a, b| s[(candidates[a], candidates[b])]);
    let raw_c = DVector::from_fn(p, |a, _| s[(candidates[a], target)]);
    if !(syy > 0.0) || !(raw_c.amax() > 0.0) {
        return Ok(vec![0.0; p]);
    }
    // Adaptive weights |beta_ols|: the penalty on candidate a becomes lambda / w_a.
    let weights = match raw_gram.clone().cholesky() {
        Some(ch) => ch.solve(&raw_c).abs(),
        None => {
            log::warn!("collinear candidates for node {target}; falling back to unweighted L1");
            DVector::from_element(p, 1.0)
        }
    };
    let gram = DMatrix::from_fn(p, p, |a, b| weights[a] * raw_gram[(a, b)] * weights[b]);
    let c = raw_c.component_mul(&weights);
    let lambda_max = c.amax();
    if !(lambda_max > 0.0) {
        return Ok(vec![0.0; p]);
    }

    let nf = n as f64;
    let rss_floor = nf * syy * f64::EPSILON;
    let rss_of = |beta: &DVector<f64>| (nf * (syy - 2.0 * beta.dot(&c) + beta.dot(&(&gram * beta)))).max(rss_floor);
    let bic_of = |rss: f64, k: usize| nf * (rss / nf).ln() + nf.ln() * k as f64;

    let mut beta = DVector::<f64>::zeros(p);
    // Gram-form gradient residual r = c - G beta.
    let mut r = c.clone();
    let mut best_beta = beta.clone();
    let mut best_bic = bic_of(rss_of(&beta), 0);
    for lambda in cfg.grid(lambda_max) {
        for _ in 0..cfg.max_iter {
            let mut max_delta: f64 = 0.0;
            for a in 0..p {
                let gaa = gram[(a, a)];
                if gaa <= 0.0 {
                    continue;
                }
                let rho = r[a] + gaa * beta[a];
                let new = soft_threshold(rho, lambda) / gaa;
                let delta = new - beta[a];
                if delta != 0.0 {
                    r.axpy(-delta, &gram.column(a), 1.0);
                    beta[a] = new;
                    max_delta = max_delta.max(delta.abs() * gaa.sqrt());
                }
            }
            if max_delta < cfg.tol * syy.sqrt() {
                break;
            }
        }
        let k = beta.iter().filter(|b| **b != 0.0).count();
        let bic = bic_of(rss_of(&beta), k);
        if bic < best_bic {
            best_bic = bic;
            best_beta.copy_from(&beta);
        }
    }
    Ok(best_beta.component_mul(&weights).iter().copied().collect())
}

fn soft_threshold(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}
