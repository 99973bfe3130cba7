//! Dense linear-algebra helpers shared by the learners and metrics.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    expm_minus_identity(a) + DMatrix::<f64>::identity(n, n)
}

/// `exp(A) − I`, computed without forming `exp(A)` so small entries and the
/// trace keep full relative precision.
///
/// The matrix is scaled by `2^-s` until its 1-norm is at most 1/2, the series
/// `Σ_{k≥1} A^k / k!` is summed until the next term is negligible relative to
/// the partial sum, and each squaring applies `F ← F² + 2F`.
pub fn expm_minus_identity(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm = one_norm(a);
    if !norm.is_finite() {
        return DMatrix::from_element(n, n, f64::INFINITY);
    }
    if norm == 0.0 {
        return DMatrix::zeros(n, n);
    }
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    let scaled = a / 2f64.powi(squarings as i32);
    let mut result = scaled.clone();
    let mut term = scaled.clone();
    for k in 2..64 {
        term = &term * &scaled / k as f64;
        result += &term;
        if one_norm(&term) <= f64::EPSILON * one_norm(&result) {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result + &result * 2.0;
    }
    result
}

/// Maximum absolute column sum.
pub fn one_norm(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Column means of an `n x d` matrix.
pub fn column_means(x: &DMatrix<f64>) -> DVector<f64> {
    let n = x.nrows() as f64;
    DVector::from_iterator(x.ncols(), x.column_iter().map(|c| c.sum() / n))
}

/// Copy of `x` with every column shifted to mean zero.
pub fn centered(x: &DMatrix<f64>) -> DMatrix<f64> {
    let means = column_means(x);
    let mut out = x.clone();
    for (j, mut col) in out.column_iter_mut().enumerate() {
        col.add_scalar_mut(-means[j]);
    }
    out
}

/// Second-moment matrix `X^T X / n` of the columns, after centering when asked.
pub fn second_moments(x: &DMatrix<f64>, center: bool) -> DMatrix<f64> {
    let n = x.nrows() as f64;
    if center {
        let xc = centered(x);
        xc.tr_mul(&xc) / n
    } else {
        x.tr_mul(x) / n
    }
}

/// Least-squares regression of `target` on `regressors` from a covariance
/// matrix. Returns the coefficient vector and the residual variance.
pub fn regress_cov(cov: &DMatrix<f64>, target: usize, regressors: &[usize]) -> Result<(DVector<f64>, f64)> {
    let var = cov[(target, target)];
    if regressors.is_empty() {
        return Ok((DVector::zeros(0), var));
    }
    let k = regressors.len();
    let sub = DMatrix::from_fn(k, k, |a, b| cov[(regressors[a], regressors[b])]);
    let rhs = DVector::from_fn(k, |a, _| cov[(regressors[a], target)]);
    let beta = match sub.clone().cholesky() {
        Some(ch) => ch.solve(&rhs),
        None => sub
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::DegenerateData("singular regressor covariance".into()))?,
    };
    let resid = var - beta.dot(&rhs);
    Ok((beta, resid))
}
