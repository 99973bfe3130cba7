use nalgebra::DMatrix;
use rand::Rng as _;

use crate::error::{ensure_same_dim, Result};
use crate::graphs::Dag;
use crate::linalg::regress_cov;
use crate::rng::{stream_rng, Stream};
use crate::scm::{LinearScm, NoiseKind, NoiseSpec, WeightLaw, WeightedDag};

const EFFECT_TOL: f64 = 1e-8;

/// SID computed from linear-Gaussian parameterizations of `g_true`: a pair
/// `(i, j)` counts as a mistake if, in any of `trials` random models, the
/// coefficient of `x_i` in the population regression of `x_j` on
/// `(x_i, Pa_est(i))` differs from the total causal effect of `i` on `j`.
pub fn sid_oracle_linear(g_true: &Dag, g_est: &Dag, trials: usize, seed: u64) -> Result<usize> {
    let d = g_true.n_nodes();
    ensure_same_dim(d, g_est.n_nodes())?;
    let mut rng = stream_rng(seed, Stream::Oracle);
    let law = WeightLaw::symmetric(0.5, 2.0);
    let mut wrong = vec![false; d * d];
    for _ in 0..trials {
        let mut w = DMatrix::zeros(d, d);
        for (k, j) in g_true.edges() {
            w[(k, j)] = law.sample(&mut rng);
        }
        let sigma: Vec<f64> = (0..d).map(|_| 0.5 + 1.5 * rng.random::<f64>()).collect();
        let m = LinearScm::new(g_true.clone(), WeightedDag::new(w.clone())?, NoiseSpec::new(NoiseKind::Gaussian, sigma)?)?;
        let cov = m.population_covariance()?;
        let total = (DMatrix::identity(d, d) - &w)
            .try_inverse()
            .expect("I - W is unit triangular up to permutation");
        for i in 0..d {
            let z = g_est.parents(i);
            for j in (0..d).filter(|&j| j != i) {
                let est = if z.contains(&j) {
                    0.0
                } else {
                    let mut regs = vec![i];
                    regs.extend_from_slice(&z);
                    regress_cov(&cov, j, &regs)?.0[0]
                };
                let truth = total[(i, j)];
                if (est - truth).abs() > EFFECT_TOL * truth.abs().max(1.0) {
                    wrong[i * d + j] = true;
                }
            }
        }
    }
    Ok(wrong.iter().filter(|&&b| b).count())
}
