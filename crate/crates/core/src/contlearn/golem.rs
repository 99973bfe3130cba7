//! Penalized likelihood learner `L̃ − log|det(I − W)| + λ₁‖W‖₁ + λ₂ h(W)`
//! trained by Adam from the empty graph.

use nalgebra::DMatrix;

use super::objectives::{acyclicity_h, golem_objective, mse, GolemVariant, Moments};
use super::settings::{max_abs_diff, FitTrace, OptimizerSettings, TraceRow};
use crate::error::{Error, Result};
use crate::scm::{Dataset, WeightedDag};

const REPORT_EVERY: usize = 1000;
const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const EPS: f64 = 1e-8;

/// Runs `settings.iterations` Adam steps on centered data. There is no
/// stopping rule, so `converged` only reports that every step completed.
pub fn golem_fit(data: &Dataset, variant: GolemVariant, settings: &OptimizerSettings) -> Result<(WeightedDag, FitTrace)> {
    settings.validate()?;
    let m = Moments::from_data(data, true);
    let (w, trace) = golem_from_moments(&m, variant, settings)?;
    Ok((WeightedDag::new(w)?, trace))
}

pub(crate) fn golem_from_moments(
    m: &Moments,
    variant: GolemVariant,
    s: &OptimizerSettings,
) -> Result<(DMatrix<f64>, FitTrace)> {
    let d = m.d();
    let mut w = DMatrix::zeros(d, d);
    let mut first = DMatrix::<f64>::zeros(d, d);
    let mut second = DMatrix::<f64>::zeros(d, d);
    let mut rows = Vec::new();
    let mut last_reported = w.clone();

    for t in 1..=s.iterations {
        let (objective, mut grad) = golem_objective(&w, m, variant, s.lambda1, s.lambda2).map_err(|e| {
            let last = rows.last().map(|r: &TraceRow| format!("; last trace row {r:?}")).unwrap_or_default();
            match e {
                Error::SingularLikelihood(msg) => Error::SingularLikelihood(format!("{msg} at step {t}{last}")),
                Error::Boundary(msg) => Error::Boundary(format!("{msg} at step {t}{last}")),
                other => other,
            }
        })?;
        if s.fix_diagonal {
            grad.fill_diagonal(0.0);
        }
        if t == 1 || t % REPORT_EVERY == 0 {
            rows.push(TraceRow {
                outer_iter: t - 1,
                objective,
                mse: mse(&w, m),
                h: acyclicity_h(&w),
                rho: None,
                alpha: None,
                max_delta_w: max_abs_diff(&w, &last_reported),
            });
            last_reported.copy_from(&w);
        }
        first = first * BETA1 + &grad * (1.0 - BETA1);
        second = second * BETA2 + grad.component_mul(&grad) * (1.0 - BETA2);
        let tf = t as f64;
        let lr = s.step_size * (1.0 - BETA2.powf(tf)).sqrt() / (1.0 - BETA1.powf(tf));
        for (wi, (mi, vi)) in w.iter_mut().zip(first.iter().zip(second.iter())) {
            *wi -= lr * mi / (vi.sqrt() + EPS);
        }
    }
    let (objective, _) = golem_objective(&w, m, variant, s.lambda1, s.lambda2)?;
    rows.push(TraceRow {
        outer_iter: s.iterations,
        objective,
        mse: mse(&w, m),
        h: acyclicity_h(&w),
        rho: None,
        alpha: None,
        max_delta_w: max_abs_diff(&w, &last_reported),
    });
    Ok((w.clone(), FitTrace { rows, final_w: w, converged: true }))
}
