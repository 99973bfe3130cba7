use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{regress_cov, second_moments};
use crate::scm::{Dataset, WeightedDag};

/// Stop once the best insertion improves the MSE by less than this fraction.
pub const GDS_TOL_REL: f64 = 1e-3;

/// Greedy forward search over edge insertions minimizing the total residual
/// variance, from data.
pub fn mse_gds(data: &Dataset, max_edges: usize) -> Result<WeightedDag> {
    mse_gds_from_cov(&second_moments(data.x(), true), max_edges, GDS_TOL_REL)
}

/// Greedy forward search from a covariance matrix. Each step inserts the
/// acyclicity-preserving edge with the largest drop in `Σ_j resvar_j`; ties
/// go to the lowest `(source, target)` pair.
pub fn mse_gds_from_cov(cov: &DMatrix<f64>, max_edges: usize, tol_rel: f64) -> Result<WeightedDag> {
    let d = cov.nrows();
    if max_edges > d * d.saturating_sub(1) / 2 {
        return Err(Error::Config(format!("max_edges={max_edges} exceeds d(d-1)/2 for d={d}")));
    }
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); d];
    let mut resvar: Vec<f64> = (0..d).map(|j| cov[(j, j)]).collect();
    let mut reach = vec![vec![false; d]; d];
    // gain[k][j]: residual variance of j after adding k to its parents.
    let mut cand = vec![vec![f64::NAN; d]; d];
    for j in 0..d {
        refresh_candidates(cov, j, &parents[j], &mut cand);
    }
    let mut n_edges = 0;
    while n_edges < max_edges {
        let mut best: Option<(f64, usize, usize)> = None;
        for k in 0..d {
            for j in 0..d {
                if k == j || parents[j].contains(&k) || reach[j][k] || cand[k][j].is_nan() {
                    continue;
                }
                let gain = resvar[j] - cand[k][j];
                if best.is_none_or(|(g, _, _)| gain > g) {
                    best = Some((gain, k, j));
                }
            }
        }
        let Some((gain, k, j)) = best else { break };
        let total: f64 = resvar.iter().sum();
        if gain < tol_rel * total {
            break;
        }
        parents[j].push(k);
        parents[j].sort_unstable();
        resvar[j] = cand[k][j];
        n_edges += 1;
        for a in 0..d {
            if a == k || reach[a][k] {
                for b in 0..d {
                    if b == j || reach[j][b] {
                        reach[a][b] = true;
                    }
                }
            }
        }
        refresh_candidates(cov, j, &parents[j], &mut cand);
    }
    let mut w = DMatrix::zeros(d, d);
    for (j, pa) in parents.iter().enumerate() {
        if !pa.is_empty() {
            let (beta, _) = regress_cov(cov, j, pa)?;
            for (&k, b) in pa.iter().zip(beta.iter()) {
                w[(k, j)] = *b;
            }
        }
    }
    WeightedDag::new(w)
}

fn refresh_candidates(cov: &DMatrix<f64>, j: usize, pa: &[usize], cand: &mut [Vec<f64>]) {
    let d = cov.nrows();
    for k in 0..d {
        cand[k][j] = f64::NAN;
        if k == j || pa.contains(&k) {
            continue;
        }
        let mut regs = pa.to_vec();
        regs.push(k);
        if let Ok((_, r)) = regress_cov(cov, j, &regs) {
            cand[k][j] = r;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_node_cov(w: f64, sa: f64, sb: f64) -> DMatrix<f64> {
        let va = sa * sa;
        DMatrix::from_row_slice(2, 2, &[va, w * va, w * va, w * w * va + sb * sb])
    }

    #[test]
    fn first_edge_points_to_higher_variance() {
        // (1 - w²) V_A < V_B: the causal direction has higher variance at B.
        let w = mse_gds_from_cov(&two_node_cov(0.8, 1.0, 1.0), 1, GDS_TOL_REL).unwrap();
        assert_eq!(w.to_dag().unwrap().edges(), vec![(0, 1)]);
        let w = mse_gds_from_cov(&two_node_cov(0.5, 2.0, 0.5), 1, GDS_TOL_REL).unwrap();
        assert_eq!(w.to_dag().unwrap().edges(), vec![(1, 0)]);
    }

    #[test]
    fn independent_columns_stay_empty() {
        let cov = DMatrix::from_diagonal_element(4, 4, 1.0);
        assert!(mse_gds_from_cov(&cov, 6, GDS_TOL_REL).unwrap().edges().is_empty());
        assert!(mse_gds_from_cov(&cov, 7, GDS_TOL_REL).is_err());
    }

    #[test]
    fn output_is_acyclic_and_bounded() {
        let a = DMatrix::from_fn(4, 4, |i, j| ((i * 7 + j * 3) % 5) as f64 * 0.3 + if i == j { 2.0 } else { 0.0 });
        let cov = &a * a.transpose();
        let w = mse_gds_from_cov(&cov, 3, 0.0).unwrap();
        assert!(w.to_dag().is_ok());
        assert!(w.edges().len() <= 3);
    }
}
