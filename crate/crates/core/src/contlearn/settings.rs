use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hyperparameters shared by the continuous learners. NOTEARS reads the
/// augmented-Lagrangian schedule and `max_inner`; GOLEM reads `lambda2`,
/// `step_size` and `iterations`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerSettings {
    pub lambda1: f64,
    pub lambda2: f64,
    pub rho_init: f64,
    pub rho_max: f64,
    pub alpha_init: f64,
    pub h_tol: f64,
    pub progress_factor: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    pub step_size: f64,
    pub iterations: usize,
    pub omega: f64,
    pub fix_diagonal: bool,
}

impl OptimizerSettings {
    pub fn notears() -> Self {
        Self {
            lambda1: 0.0,
            lambda2: 0.0,
            rho_init: 1.0,
            rho_max: 1e16,
            alpha_init: 0.0,
            h_tol: 1e-8,
            progress_factor: 0.25,
            max_outer: 100,
            max_inner: 15_000,
            step_size: 1e-3,
            iterations: 10_000,
            omega: 0.3,
            fix_diagonal: true,
        }
    }

    pub fn golem_ev() -> Self {
        Self { lambda1: 2e-2, lambda2: 5.0, ..Self::notears() }
    }

    pub fn golem_nv() -> Self {
        Self { lambda1: 2e-3, lambda2: 5.0, ..Self::notears() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(format!("optimizer setting {what}")));
        if !(self.lambda1 >= 0.0 && self.lambda2 >= 0.0 && self.alpha_init >= 0.0) {
            return bad("lambda1, lambda2 and alpha_init must be non-negative");
        }
        if !(self.rho_init > 0.0 && self.rho_max >= self.rho_init) {
            return bad("rho_init must be positive and at most rho_max");
        }
        if !(self.h_tol > 0.0 && self.progress_factor > 0.0 && self.progress_factor < 1.0) {
            return bad("h_tol must be positive and progress_factor in (0, 1)");
        }
        if self.max_outer == 0 || self.max_inner == 0 || self.iterations == 0 {
            return bad("iteration counts must be positive");
        }
        if !(self.step_size > 0.0) {
            return bad("step_size must be positive");
        }
        if !(self.omega >= 0.0) {
            return bad("omega must be non-negative");
        }
        Ok(())
    }
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self::notears()
    }
}

/// One row per outer iteration (NOTEARS) or per reporting interval (GOLEM).
/// `rho` and `alpha` are absent for GOLEM.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub outer_iter: usize,
    pub objective: f64,
    pub mse: f64,
    pub h: f64,
    pub rho: Option<f64>,
    pub alpha: Option<f64>,
    pub max_delta_w: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitTrace {
    pub rows: Vec<TraceRow>,
    pub final_w: DMatrix<f64>,
    pub converged: bool,
}

impl FitTrace {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        for row in &self.rows {
            wtr.serialize(row)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

pub(crate) fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
