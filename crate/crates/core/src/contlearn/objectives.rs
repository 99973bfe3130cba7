//! Score functions of the continuous learners and their analytic gradients.
//!
//! Data enter through the second-moment matrix `S = XᵀX/n`, so that
//! `‖X − XW‖² = n · tr((I − W)ᵀ S (I − W))`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{expm_minus_identity, second_moments};
use crate::scm::Dataset;

#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub s: DMatrix<f64>,
    pub n: usize,
}

impl Moments {
    /// Second moments of `x`, centering the columns first if `center` is set.
    pub fn from_matrix(x: &DMatrix<f64>, center: bool) -> Self {
        Self { s: second_moments(x, center), n: x.nrows() }
    }

    pub fn from_data(data: &Dataset, center: bool) -> Self {
        Self::from_matrix(data.x(), center)
    }

    pub fn d(&self) -> usize {
        self.s.nrows()
    }

    /// `(I − W)ᵀ S (I − W)`; its diagonal holds the per-node mean squared residuals.
    fn residual_gram(&self, w: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
        let d = self.d();
        let a = DMatrix::identity(d, d) - w;
        let sa = &self.s * &a;
        (a.transpose() * &sa, sa)
    }

    /// Mean squared residual of every node.
    pub fn residual_variances(&self, w: &DMatrix<f64>) -> Vec<f64> {
        self.residual_gram(w).0.diagonal().iter().copied().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GolemVariant {
    Ev,
    Nv,
}

/// `(1/n)‖X − XW‖²`.
pub fn mse(w: &DMatrix<f64>, m: &Moments) -> f64 {
    m.residual_gram(w).0.trace()
}

/// `−(2/n) Xᵀ(X − XW)`.
pub fn mse_grad(w: &DMatrix<f64>, m: &Moments) -> DMatrix<f64> {
    m.residual_gram(w).1 * -2.0
}

/// Negative Gaussian log-likelihood up to constants: the data term
/// `(d/2) log ‖X − XW‖²` (EV) or `½ Σ_j log ‖x_j − X w_j‖²` (NV), minus
/// `log |det(I − W)|`.
pub fn golem_losses(w: &DMatrix<f64>, m: &Moments, variant: GolemVariant) -> Result<f64> {
    Ok(golem_likelihood_and_grad(w, m, variant)?.0 - logdet(w)?)
}

pub fn golem_grads(w: &DMatrix<f64>, m: &Moments, variant: GolemVariant) -> Result<DMatrix<f64>> {
    Ok(golem_likelihood_and_grad(w, m, variant)?.1 - logdet_grad(w)?)
}

fn golem_likelihood_and_grad(w: &DMatrix<f64>, m: &Moments, variant: GolemVariant) -> Result<(f64, DMatrix<f64>)> {
    let d = m.d() as f64;
    let nf = m.n as f64;
    let (rg, sa) = m.residual_gram(w);
    match variant {
        GolemVariant::Ev => {
            let total = rg.trace();
            if !(total > 0.0) {
                return Err(Error::SingularLikelihood("all residuals vanish".into()));
            }
            Ok((0.5 * d * (nf * total).ln(), sa * (-d / total)))
        }
        GolemVariant::Nv => {
            let mut value = 0.0;
            let mut grad = sa;
            for j in 0..m.d() {
                let r = rg[(j, j)];
                if !(r > 0.0) {
                    return Err(Error::SingularLikelihood(format!("residual of node {j} vanishes")));
                }
                value += 0.5 * (nf * r).ln();
                grad.column_mut(j).scale_mut(-1.0 / r);
            }
            Ok((value, grad))
        }
    }
}

/// `log |det(I − W)|`.
pub fn logdet(w: &DMatrix<f64>) -> Result<f64> {
    let d = w.nrows();
    let det = (DMatrix::identity(d, d) - w).determinant();
    if det == 0.0 || !det.is_finite() {
        return Err(Error::Boundary(format!("det(I - W) = {det}")));
    }
    Ok(det.abs().ln())
}

/// `−(I − W)^{-ᵀ}`.
pub fn logdet_grad(w: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let d = w.nrows();
    let inv = (DMatrix::identity(d, d) - w)
        .try_inverse()
        .ok_or_else(|| Error::Boundary("I - W is singular".into()))?;
    Ok(-inv.transpose())
}

/// `h(W) = tr(exp(W ⊙ W)) − d`.
pub fn acyclicity_h(w: &DMatrix<f64>) -> f64 {
    acyclicity_h_and_grad(w).0
}

/// `exp(W ⊙ W)ᵀ ⊙ 2W`.
pub fn acyclicity_h_grad(w: &DMatrix<f64>) -> DMatrix<f64> {
    acyclicity_h_and_grad(w).1
}

pub(crate) fn acyclicity_h_and_grad(w: &DMatrix<f64>) -> (f64, DMatrix<f64>) {
    let f = expm_minus_identity(&w.component_mul(w));
    let h = f.trace();
    let mut g = f.transpose().component_mul(w);
    for i in 0..w.nrows() {
        g[(i, i)] += w[(i, i)];
    }
    g *= 2.0;
    (h, g)
}

/// Full GOLEM score `L̃ − log|det(I − W)| + λ₁‖W‖₁ + λ₂ h(W)` and its
/// (sub)gradient; the L1 subgradient at zero is taken as zero.
pub fn golem_objective(
    w: &DMatrix<f64>,
    m: &Moments,
    variant: GolemVariant,
    lambda1: f64,
    lambda2: f64,
) -> Result<(f64, DMatrix<f64>)> {
    let (lik, mut grad) = golem_likelihood_and_grad(w, m, variant)?;
    let ld = logdet(w)?;
    grad -= logdet_grad(w)?;
    let (h, gh) = acyclicity_h_and_grad(w);
    grad += gh * lambda2;
    grad += w.map(|v| if v == 0.0 { 0.0 } else { v.signum() }) * lambda1;
    let l1: f64 = w.iter().map(|v| v.abs()).sum();
    Ok((lik - ld + lambda1 * l1 + lambda2 * h, grad))
}

pub fn zero_diagonal(g: &mut DMatrix<f64>) {
    g.fill_diagonal(0.0);
}
