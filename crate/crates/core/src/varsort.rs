//! Varsortability: the fraction of directed paths along which marginal
//! variance strictly increases.
//!
//! Paths are counted once per `(length, source, target)` triple, i.e. the
//! entries of the boolean powers `E^1, ..., E^(d-1)` of the adjacency matrix.
//! A pair whose variances agree up to a relative tolerance scores ½.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graphs::{sample_dag, Dag, GraphSpec};
use crate::rng::{derive_seed, stream_rng, Stream};
use crate::scm::{sample_linear_scm, Dataset, LinearScm, NoiseLaw, SigmaLaw, WeightLaw};

pub const DEFAULT_TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarianceSource {
    Empirical,
    Population,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarsortReport {
    pub v: f64,
    /// `(sortable score, number of connected pairs)` for path lengths `1, 2, ...`.
    pub per_path_length: Vec<(f64, usize)>,
    pub variance_source: VarianceSource,
}

/// Scores `1`, `½` or `0` for whether `b` exceeds `a`.
pub fn increasing(a: f64, b: f64, tol: f64) -> f64 {
    if (b - a).abs() <= tol * a.abs().max(b.abs()) {
        0.5
    } else if b > a {
        1.0
    } else {
        0.0
    }
}

pub fn varsortability(g: &Dag, variances: &[f64]) -> Result<VarsortReport> {
    varsortability_with(g, variances, DEFAULT_TIE_TOL, VarianceSource::Empirical)
}

pub fn varsortability_with(g: &Dag, variances: &[f64], tol: f64, source: VarianceSource) -> Result<VarsortReport> {
    crate::error::ensure_same_dim(g.n_nodes(), variances.len())?;
    if g.n_edges() == 0 {
        return Err(Error::UndefinedVarsortability);
    }
    let mut per_path_length = Vec::new();
    for power in g.path_powers() {
        let mut score = 0.0;
        let mut count = 0;
        for (i, j) in power.iter_true() {
            score += increasing(variances[i], variances[j], tol);
            count += 1;
        }
        per_path_length.push((score, count));
    }
    let num: f64 = per_path_length.iter().map(|p| p.0).sum();
    let den: usize = per_path_length.iter().map(|p| p.1).sum();
    Ok(VarsortReport { v: num / den as f64, per_path_length, variance_source: source })
}

/// Per-column sample variance (denominator `n`).
pub fn empirical_variances(data: &Dataset) -> Vec<f64> {
    data.variances()
}

pub fn population_varsortability(m: &LinearScm) -> Result<VarsortReport> {
    varsortability_with(m.graph(), &m.population_variances()?, DEFAULT_TIE_TOL, VarianceSource::Population)
}

const MC_BATCH: usize = 50_000;

/// Monte Carlo estimate of `P[s_A² < w² s_A² + s_B²]` for iid `w ~ weight_law`
/// and `s_A, s_B ~ sigma_law`: the probability that a root-to-child edge is
/// varsortable.
pub fn pairwise_bound_mc(weight_law: &WeightLaw, sigma_law: &SigmaLaw, reps: usize, seed: u64, exec: Execution) -> Result<f64> {
    bound_mc(weight_law, sigma_law, sigma_law, reps, seed, exec)
}

fn bound_mc(
    weight_law: &WeightLaw,
    sigma_a: &SigmaLaw,
    sigma_b: &SigmaLaw,
    reps: usize,
    seed: u64,
    exec: Execution,
) -> Result<f64> {
    if reps == 0 {
        return Err(Error::Config("reps must be at least 1".into()));
    }
    weight_law.validate()?;
    sigma_a.validate()?;
    sigma_b.validate()?;
    let batches = reps.div_ceil(MC_BATCH);
    let hits = exec.map(batches, |b| {
        let mut rng = stream_rng(derive_seed(seed, &[b as u64]), Stream::MonteCarlo);
        let size = MC_BATCH.min(reps - b * MC_BATCH);
        (0..size)
            .filter(|_| {
                let w = weight_law.sample(&mut rng);
                let sa = sigma_a.sample(&mut rng);
                let sb = sigma_b.sample(&mut rng);
                let va = sa * sa;
                va < w * w * va + sb * sb
            })
            .count()
    });
    Ok(hits.iter().sum::<usize>() as f64 / reps as f64)
}

/// Mean population marginal variance by position in the generative causal
/// order, over `reps` random SCMs. Returns the first `n_positions` positions.
pub fn variance_profile(
    spec: &GraphSpec,
    weight_law: &WeightLaw,
    noise_law: &NoiseLaw,
    reps: usize,
    n_positions: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<f64>> {
    if reps == 0 {
        return Err(Error::Config("reps must be at least 1".into()));
    }
    spec.validate()?;
    profile_over(reps, n_positions.min(spec.d), seed, exec, |s| {
        let sampled = sample_dag(spec, s)?;
        Ok((sampled.dag, sampled.order))
    }, weight_law, noise_law)
}

fn profile_over<F>(
    reps: usize,
    len: usize,
    seed: u64,
    exec: Execution,
    graph: F,
    weight_law: &WeightLaw,
    noise_law: &NoiseLaw,
) -> Result<Vec<f64>>
where
    F: Fn(u64) -> Result<(Dag, Vec<usize>)> + Sync,
{
    let runs = exec.map(reps, |r| -> Result<Vec<f64>> {
        let s = derive_seed(seed, &[r as u64]);
        let (dag, order) = graph(s)?;
        let m = sample_linear_scm(&dag, weight_law, noise_law, s)?;
        let var = m.population_variances()?;
        Ok(order[..len].iter().map(|&v| var[v]).collect())
    });
    let mut mean = vec![0.0; len];
    for run in runs {
        for (acc, v) in mean.iter_mut().zip(run?) {
            *acc += v;
        }
    }
    Ok(mean.into_iter().map(|s| s / reps as f64).collect())
}
