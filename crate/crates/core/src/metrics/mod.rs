//! Graph recovery scores.

mod oracle;
mod shd;
mod sid;

use serde::{Deserialize, Serialize};

pub use oracle::sid_oracle_linear;
pub use shd::{shd, shd_cpdag};
pub use sid::sid;

use crate::contlearn::threshold_and_break_cycles;
use crate::error::{Error, Result};
use crate::graphs::{dag_to_cpdag, enumerate_mec, Cpdag, Dag};
use crate::scm::WeightedDag;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub d: usize,
    pub shd: usize,
    pub sid: usize,
    pub shd_cpdag: Option<usize>,
    pub sid_mec_lower: Option<usize>,
    pub sid_mec_upper: Option<usize>,
}

impl MetricRecord {
    /// `d(d-1)`, the largest possible SID.
    pub fn sid_normalizer(&self) -> usize {
        self.d * self.d.saturating_sub(1)
    }
}

/// SHD and SID, plus CPDAG-level SHD and MEC SID bounds when `mec_cap` is set.
/// MEC bounds stay `None` if the enumeration exceeds the cap.
pub fn evaluate(g_true: &Dag, g_est: &Dag, mec_cap: Option<usize>) -> Result<MetricRecord> {
    let mut rec = MetricRecord {
        d: g_true.n_nodes(),
        shd: shd(g_true, g_est)?,
        sid: sid(g_true, g_est)?,
        shd_cpdag: None,
        sid_mec_lower: None,
        sid_mec_upper: None,
    };
    if let Some(cap) = mec_cap {
        let c_est = dag_to_cpdag(g_est);
        rec.shd_cpdag = Some(shd_cpdag(&dag_to_cpdag(g_true), &c_est)?);
        match sid_cpdag_bounds(g_true, &c_est, cap) {
            Ok((lo, hi)) => {
                rec.sid_mec_lower = Some(lo);
                rec.sid_mec_upper = Some(hi);
            }
            Err(Error::EnumerationOverflow { cap }) => log::info!("MEC larger than {cap}; SID bounds unavailable"),
            Err(e) => return Err(e),
        }
    }
    Ok(rec)
}

/// Smallest and largest SID over all members of the estimated class.
pub fn sid_cpdag_bounds(g_true: &Dag, c_est: &Cpdag, cap: usize) -> Result<(usize, usize)> {
    let mut lo = usize::MAX;
    let mut hi = 0;
    for h in enumerate_mec(c_est, cap)? {
        let s = sid(g_true, &h)?;
        lo = lo.min(s);
        hi = hi.max(s);
    }
    Ok((lo, hi))
}

/// Threshold candidates for a raw weight matrix: 0, the midpoints between
/// consecutive distinct off-diagonal magnitudes, and one value above the largest.
pub fn threshold_candidates(w: &WeightedDag) -> Vec<f64> {
    let mut mags: Vec<f64> = w.edges().iter().map(|e| e.2.abs()).collect();
    mags.sort_by(f64::total_cmp);
    mags.dedup();
    let mut out = vec![0.0];
    out.extend(mags.windows(2).map(|p| 0.5 * (p[0] + p[1])));
    if let Some(&max) = mags.last() {
        out.push(max * 2.0 + 1.0);
    }
    out
}

/// Per-instance threshold with the lowest SHD to the truth; ties go to the
/// smallest threshold.
pub fn favorable_threshold_shd(w_est: &WeightedDag, g_true: &Dag) -> Result<(f64, usize)> {
    let mut best = (f64::NAN, usize::MAX);
    for omega in threshold_candidates(w_est) {
        let s = shd(g_true, &threshold_and_break_cycles(w_est, omega))?;
        if s < best.1 {
            best = (omega, s);
        }
    }
    Ok(best)
}
