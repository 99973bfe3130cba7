//! Augmented-Lagrangian solver for `½ MSE + λ₁‖W‖₁` subject to `h(W) = 0`.

use nalgebra::DMatrix;

use super::lbfgsb::{minimize_box, LbfgsbSettings};
use super::objectives::{acyclicity_h_and_grad, mse, mse_grad, Moments};
use super::settings::{max_abs_diff, FitTrace, OptimizerSettings, TraceRow};
use crate::error::Result;
use crate::scm::{Dataset, WeightedDag};

/// Runs the solver on centered data from `W = 0` and returns the raw
/// (unthresholded) weights.
pub fn notears_fit(data: &Dataset, settings: &OptimizerSettings) -> Result<(WeightedDag, FitTrace)> {
    settings.validate()?;
    let m = Moments::from_data(data, true);
    let (w, trace) = notears_from_moments(&m, settings);
    Ok((WeightedDag::new(w)?, trace))
}

fn unpack(x: &[f64], d: usize) -> DMatrix<f64> {
    let dd = d * d;
    DMatrix::from_fn(d, d, |i, j| x[i * d + j] - x[dd + i * d + j])
}

pub(crate) fn notears_from_moments(m: &Moments, s: &OptimizerSettings) -> (DMatrix<f64>, FitTrace) {
    let d = m.d();
    let dd = d * d;
    let lower = vec![0.0; 2 * dd];
    let mut upper = vec![f64::INFINITY; 2 * dd];
    if s.fix_diagonal {
        for i in 0..d {
            upper[i * d + i] = 0.0;
            upper[dd + i * d + i] = 0.0;
        }
    }
    let cfg = LbfgsbSettings { max_iter: s.max_inner, ..Default::default() };

    let mut x = vec![0.0; 2 * dd];
    let mut w = DMatrix::zeros(d, d);
    let (mut rho, mut alpha, mut h) = (s.rho_init, s.alpha_init, f64::INFINITY);
    let mut rows = Vec::new();

    for outer in 0..s.max_outer {
        let mut candidate = (x.clone(), w.clone(), h, f64::NAN);
        while rho < s.rho_max {
            let objective = |v: &[f64]| {
                let wv = unpack(v, d);
                let (hv, gh) = acyclicity_h_and_grad(&wv);
                let f = 0.5 * mse(&wv, m) + 0.5 * rho * hv * hv + alpha * hv + s.lambda1 * v.iter().sum::<f64>();
                let g_smooth = mse_grad(&wv, m) * 0.5 + gh * (rho * hv + alpha);
                let mut g = vec![s.lambda1; 2 * dd];
                for i in 0..d {
                    for j in 0..d {
                        g[i * d + j] += g_smooth[(i, j)];
                        g[dd + i * d + j] -= g_smooth[(i, j)];
                    }
                }
                (f, g)
            };
            let res = minimize_box(objective, &x, &lower, &upper, &cfg);
            let w_new = unpack(&res.x, d);
            let h_new = acyclicity_h_and_grad(&w_new).0;
            candidate = (res.x, w_new, h_new, res.f);
            if h_new > s.progress_factor * h {
                rho *= 10.0;
            } else {
                break;
            }
        }
        let (x_new, w_new, h_new, f_new) = candidate;
        rows.push(TraceRow {
            outer_iter: outer,
            objective: f_new,
            mse: mse(&w_new, m),
            h: h_new,
            rho: Some(rho),
            alpha: Some(alpha),
            max_delta_w: max_abs_diff(&w_new, &w),
        });
        x = x_new;
        w = w_new;
        h = h_new;
        alpha += rho * h;
        if h <= s.h_tol || rho >= s.rho_max {
            break;
        }
    }
    let converged = h <= s.h_tol;
    if !converged {
        log::warn!("notears stopped with h = {h:e} above tolerance {:e}", s.h_tol);
    }
    (w.clone(), FitTrace { rows, final_w: w, converged })
}
