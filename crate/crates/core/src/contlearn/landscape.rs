//! Exhaustive score landscape over every DAG on three labeled nodes.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graphs::{enumerate_all_dags, Dag};
use crate::linalg::regress_cov;
use crate::metrics::{shd, sid};
use crate::rng::derive_seed;
use crate::scm::{sample_linear_scm, LinearScm, NoiseLaw, WeightLaw};

const TIE_REL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct LandscapeRecord {
    pub candidate: Dag,
    pub weights: DMatrix<f64>,
    pub loss: f64,
    pub shd: usize,
    pub sid: usize,
    pub is_truth: bool,
    pub is_argmin: bool,
}

/// Scores all 25 candidates against the population covariance of `scm`.
pub fn landscape_3node(scm: &LinearScm, lambda1: f64) -> Result<Vec<LandscapeRecord>> {
    if scm.d() != 3 {
        return Err(Error::Config(format!("landscape needs 3 nodes, got {}", scm.d())));
    }
    landscape_from_covariance(scm.graph(), &scm.population_covariance()?, lambda1)
}

/// Same scan with the covariance rescaled to unit variances.
pub fn landscape_3node_standardized(scm: &LinearScm, lambda1: f64) -> Result<Vec<LandscapeRecord>> {
    if scm.d() != 3 {
        return Err(Error::Config(format!("landscape needs 3 nodes, got {}", scm.d())));
    }
    landscape_from_covariance(scm.graph(), &correlation(&scm.population_covariance()?), lambda1)
}

pub fn correlation(cov: &DMatrix<f64>) -> DMatrix<f64> {
    let sd = cov.diagonal().map(f64::sqrt);
    DMatrix::from_fn(cov.nrows(), cov.ncols(), |i, j| cov[(i, j)] / (sd[i] * sd[j]))
}

/// Each candidate gets its least-squares (Gaussian maximum-likelihood)
/// weights on its own support and is scored by
/// `½ Σ_j log r_j + λ₁‖W‖₁`, with `r_j` the residual variance of node `j`.
pub fn landscape_from_covariance(truth: &Dag, cov: &DMatrix<f64>, lambda1: f64) -> Result<Vec<LandscapeRecord>> {
    let d = truth.n_nodes();
    if cov.nrows() != d {
        return Err(Error::DimensionMismatch { expected: d, got: cov.nrows() });
    }
    let mut records = Vec::new();
    for candidate in enumerate_all_dags(d) {
        let mut weights = DMatrix::zeros(d, d);
        let mut loss = 0.0;
        for j in 0..d {
            let parents = candidate.parents(j);
            let (beta, resid) = regress_cov(cov, j, &parents)?;
            if !(resid > 0.0) {
                return Err(Error::SingularLikelihood(format!("node {j} is deterministic under the covariance")));
            }
            for (p, b) in parents.iter().zip(beta.iter()) {
                weights[(*p, j)] = *b;
            }
            loss += 0.5 * resid.ln() + lambda1 * beta.iter().map(|b| b.abs()).sum::<f64>();
        }
        records.push(LandscapeRecord {
            shd: shd(truth, &candidate)?,
            sid: sid(truth, &candidate)?,
            is_truth: &candidate == truth,
            candidate,
            weights,
            loss,
            is_argmin: false,
        });
    }
    let best = records.iter().map(|r| r.loss).fold(f64::INFINITY, f64::min);
    let tied = |r: &LandscapeRecord| r.loss <= best + TIE_REL * best.abs().max(1.0);
    let winner = records
        .iter()
        .position(|r| r.is_truth && tied(r))
        .or_else(|| records.iter().position(|r| r.loss == best))
        .expect("at least one candidate");
    records[winner].is_argmin = true;
    Ok(records)
}

/// Whether the argmin of a landscape is the ground truth.
pub fn truth_wins(records: &[LandscapeRecord]) -> bool {
    records.iter().any(|r| r.is_truth && r.is_argmin)
}

/// Outcome for one ground truth of [`landscape_study`].
#[derive(Debug, Clone, PartialEq)]
pub struct LandscapeStudyRow {
    pub truth: Dag,
    pub raw: Vec<LandscapeRecord>,
    pub standardized: Vec<LandscapeRecord>,
}

impl LandscapeStudyRow {
    pub fn raw_wins(&self) -> bool {
        truth_wins(&self.raw)
    }

    pub fn standardized_wins(&self) -> bool {
        truth_wins(&self.standardized)
    }
}

/// Draws one SCM for each of the 25 ground truths and scans its raw and
/// standardized landscapes.
pub fn landscape_study(weight_law: &WeightLaw, noise_law: &NoiseLaw, lambda1: f64, seed: u64) -> Result<Vec<LandscapeStudyRow>> {
    enumerate_all_dags(3)
        .into_iter()
        .enumerate()
        .map(|(t, truth)| {
            let scm = sample_linear_scm(&truth, weight_law, noise_law, derive_seed(seed, &[t as u64]))?;
            Ok(LandscapeStudyRow {
                raw: landscape_3node(&scm, lambda1)?,
                standardized: landscape_3node_standardized(&scm, lambda1)?,
                truth,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scm::{sample_linear_scm, NoiseLaw, WeightLaw};

    #[test]
    fn enumerates_25_candidates_with_one_argmin() {
        let g = Dag::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let scm = sample_linear_scm(&g, &WeightLaw::default(), &NoiseLaw::gaussian_ev(), 4).unwrap();
        let rows = landscape_3node(&scm, 0.1).unwrap();
        assert_eq!(rows.len(), 25);
        assert_eq!(rows.iter().filter(|r| r.is_argmin).count(), 1);
        assert_eq!(rows.iter().filter(|r| r.is_truth).count(), 1);
        let t = rows.iter().find(|r| r.is_truth).unwrap();
        assert_eq!((t.shd, t.sid), (0, 0));
    }

    #[test]
    fn empty_truth_independent_data() {
        let cov = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 3.0, 0.5]));
        let rows = landscape_from_covariance(&Dag::empty(3), &cov, 0.0).unwrap();
        let arg = rows.iter().find(|r| r.is_argmin).unwrap();
        assert!(arg.candidate.n_edges() == 0 && arg.is_truth);
    }

    #[test]
    fn population_likelihood_ties_inside_the_class() {
        // Without a penalty every member of the truth's equivalence class and
        // every supergraph reaches the optimum.
        let g = Dag::from_edges(3, &[(0, 1)]).unwrap();
        let scm = sample_linear_scm(&g, &WeightLaw::default(), &NoiseLaw::gaussian_ev(), 9).unwrap();
        let rows = landscape_3node(&scm, 0.0).unwrap();
        let best = rows.iter().map(|r| r.loss).fold(f64::INFINITY, f64::min);
        let reversed = rows.iter().find(|r| r.candidate.edges() == vec![(1, 0)]).unwrap();
        assert!((reversed.loss - best).abs() < 1e-9);
        assert!(truth_wins(&rows));
    }

    #[test]
    fn rejects_wrong_dimension() {
        let g = Dag::empty(2);
        let scm = sample_linear_scm(&g, &WeightLaw::default(), &NoiseLaw::gaussian_ev(), 1).unwrap();
        assert!(landscape_3node(&scm, 0.1).is_err());
    }
}
