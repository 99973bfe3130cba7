use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::centered;
use crate::scm::Dataset;

/// Residual variances after the first gradient step `W = a·XᵀX` from the
/// empty graph, `(1/n)·diag(D − 2aD² + a²D³)` with `D = XᵀX` on centered data.
pub fn first_step_residual_variances(data: &Dataset, a: f64) -> Result<DVector<f64>> {
    if !(a >= 0.0) {
        return Err(Error::Config(format!("step scale must be non-negative, got {a}")));
    }
    let x = centered(data.x());
    let d = x.transpose() * &x;
    let d2 = &d * &d;
    let d3 = &d2 * &d;
    let r = d.diagonal() - d2.diagonal() * (2.0 * a) + d3.diagonal() * (a * a);
    Ok(r / data.n() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{sample_er_dag, GraphSpec};
    use crate::scm::{sample_linear_scm, NoiseLaw, WeightLaw};

    fn data(seed: u64) -> Dataset {
        let g = sample_er_dag(&GraphSpec::er(6, 2), seed).unwrap().dag;
        let scm = sample_linear_scm(&g, &WeightLaw::default(), &NoiseLaw::gaussian_ev(), seed).unwrap();
        scm.simulate(300, seed).unwrap()
    }

    #[test]
    fn zero_step_gives_marginal_variances() {
        let ds = data(1);
        let r = first_step_residual_variances(&ds, 0.0).unwrap();
        for (a, b) in r.iter().zip(ds.variances()) {
            assert!((a - b).abs() < 1e-9 * b.max(1.0));
        }
    }

    #[test]
    fn matches_direct_expansion() {
        let ds = data(2);
        let x = centered(ds.x());
        let dm = x.transpose() * &x;
        for a in [1e-5, 1e-3, 0.1] {
            let resid = &x - &x * &dm * a;
            let direct = (resid.transpose() * &resid).diagonal() / ds.n() as f64;
            let r = first_step_residual_variances(&ds, a).unwrap();
            assert!((r - &direct).amax() < 1e-8 * direct.amax());
        }
    }

    #[test]
    fn small_steps_preserve_variance_order() {
        let ds = data(3);
        let order = |v: &[f64]| {
            let mut idx: Vec<usize> = (0..v.len()).collect();
            idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
            idx
        };
        let base = order(&ds.variances());
        let scale = ds.variances().iter().sum::<f64>() * ds.n() as f64;
        let r = first_step_residual_variances(&ds, 1e-6 / scale).unwrap();
        assert_eq!(order(r.as_slice()), base);
        assert!(first_step_residual_variances(&ds, -1.0).is_err());
    }
}
