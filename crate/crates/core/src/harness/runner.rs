use std::path::Path;
use std::time::Instant;

use super::config::{ExperimentConfig, ScaleRegime};
use super::learner::LearnerSpec;
use super::record::{write_records_csv, write_records_json, EstimateRecord, RunRecord, SCHEMA_VERSION};
use crate::error::Result;
use crate::exec::Execution;
use crate::graphs::{sample_dag, Dag};
use crate::metrics::{evaluate, favorable_threshold_shd};
use crate::rng::derive_seed;
use crate::scm::{sample_linear_scm, Dataset};
use crate::varsort::varsortability;

const LEARNER_SALT: u64 = 0x1ea5;

#[derive(Debug, Clone, Default)]
pub struct BenchmarkOutput {
    pub records: Vec<RunRecord>,
    pub estimates: Vec<EstimateRecord>,
}

impl BenchmarkOutput {
    fn extend(&mut self, other: BenchmarkOutput) {
        self.records.extend(other.records);
        self.estimates.extend(other.estimates);
    }
}

/// Identifies one data instance in the output.
pub(crate) struct InstanceMeta<'a> {
    pub config_hash: &'a str,
    pub setting: usize,
    pub graph: String,
    pub noise: String,
    pub repetition: usize,
    pub seed: u64,
}

pub fn run_benchmark(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    Ok(run_benchmark_with(cfg, Execution::default())?.records)
}

/// Runs every (graph, noise, repetition) instance, in parallel if `exec`
/// allows; output order is (setting, repetition, regime, learner, omega).
pub fn run_benchmark_with(cfg: &ExperimentConfig, exec: Execution) -> Result<BenchmarkOutput> {
    cfg.validate()?;
    let hash = cfg.hash();
    let n_settings = cfg.graphs.len() * cfg.noises.len();
    let jobs = n_settings * cfg.repetitions;
    let results = exec.map(jobs, |job| -> Result<BenchmarkOutput> {
        let (setting, rep) = (job / cfg.repetitions, job % cfg.repetitions);
        let spec = &cfg.graphs[setting / cfg.noises.len()];
        let noise = &cfg.noises[setting % cfg.noises.len()];
        let seed = derive_seed(cfg.master_seed, &[setting as u64, rep as u64]);
        let truth = sample_dag(spec, seed)?.dag;
        let scm = sample_linear_scm(&truth, &cfg.weight_law, noise, seed)?;
        let data = scm.simulate(cfg.n, seed)?;
        let meta = InstanceMeta {
            config_hash: &hash,
            setting,
            graph: spec.label(),
            noise: noise.label(),
            repetition: rep,
            seed,
        };
        Ok(score_instance(cfg, &meta, &truth, &data, false))
    });
    let mut out = BenchmarkOutput::default();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

/// Runs all learners (and optionally the empty-graph baseline) on `data` and
/// its standardized copy. Failures become error rows.
pub(crate) fn score_instance(
    cfg: &ExperimentConfig,
    meta: &InstanceMeta<'_>,
    truth: &Dag,
    data: &Dataset,
    empty_baseline: bool,
) -> BenchmarkOutput {
    let mut out = BenchmarkOutput::default();
    let learner_seed = derive_seed(meta.seed, &[LEARNER_SALT]);
    let mec_cap = (cfg.mec_metrics && truth.n_nodes() <= 10).then_some(cfg.mec_cap);
    let mut entries: Vec<Option<&LearnerSpec>> = cfg.learners.iter().map(Some).collect();
    if empty_baseline {
        entries.push(None);
    }
    for &regime in &cfg.regimes {
        let copy = match regime {
            ScaleRegime::Raw => Ok(data.clone()),
            ScaleRegime::Standardized => data.standardize(),
        };
        let v = copy.as_ref().ok().and_then(|c| varsortability(truth, &c.variances()).ok()).map(|r| r.v);
        for entry in &entries {
            let name = entry.map_or("empty", |l| l.label());
            let base = RunRecord {
                schema_version: SCHEMA_VERSION,
                config_hash: meta.config_hash.to_string(),
                setting: meta.setting,
                graph: meta.graph.clone(),
                d: truth.n_nodes(),
                noise: meta.noise.clone(),
                repetition: meta.repetition,
                seed: meta.seed,
                learner: name.to_string(),
                regime: regime.name().to_string(),
                omega: None,
                varsortability: v,
                true_edges: truth.n_edges(),
                est_edges: None,
                shd: None,
                sid: None,
                sid_norm: None,
                shd_cpdag: None,
                sid_mec_lower: None,
                sid_mec_upper: None,
                favorable_omega: None,
                favorable_shd: None,
                error: None,
                wall_seconds: 0.0,
            };
            let fail = |msg: String, out: &mut BenchmarkOutput| {
                log::warn!("{name} on {} rep {} ({}): {msg}", meta.graph, meta.repetition, regime.name());
                for &omega in &cfg.thresholds.omegas {
                    out.records.push(RunRecord { omega: Some(omega), error: Some(msg.clone()), ..base.clone() });
                }
            };
            let copy = match &copy {
                Ok(c) => c,
                Err(e) => {
                    fail(e.to_string(), &mut out);
                    continue;
                }
            };
            let Some(spec) = entry else {
                match evaluate(truth, &Dag::empty(truth.n_nodes()), mec_cap) {
                    Ok(m) => out.records.push(RunRecord {
                        est_edges: Some(0),
                        shd: Some(m.shd),
                        sid: Some(m.sid),
                        sid_norm: Some(m.sid as f64 / m.sid_normalizer().max(1) as f64),
                        shd_cpdag: m.shd_cpdag,
                        sid_mec_lower: m.sid_mec_lower,
                        sid_mec_upper: m.sid_mec_upper,
                        ..base.clone()
                    }),
                    Err(e) => fail(e.to_string(), &mut out),
                }
                continue;
            };
            let kind = spec.kind().expect("validated learner name");
            let start = Instant::now();
            let fit = match spec.fit(copy, learner_seed) {
                Ok(f) => f,
                Err(e) => {
                    fail(e.to_string(), &mut out);
                    continue;
                }
            };
            let wall = start.elapsed().as_secs_f64();
            let favorable = match (&fit.weights, kind.is_continuous() && cfg.thresholds.favorable) {
                (Some(w), true) => favorable_threshold_shd(w, truth).ok(),
                _ => None,
            };
            for (i, &omega) in cfg.thresholds.omegas.iter().enumerate() {
                let g = fit.graph_at(kind, omega);
                if i == 0 {
                    out.estimates.push(EstimateRecord {
                        setting: meta.setting,
                        repetition: meta.repetition,
                        learner: name.to_string(),
                        regime: regime.name().to_string(),
                        d: truth.n_nodes(),
                        truth: truth.edges(),
                        weights: fit.weights.as_ref().map(|w| {
                            let m = w.matrix();
                            (0..m.nrows()).map(|r| m.row(r).iter().copied().collect()).collect()
                        }),
                        support: g.edges(),
                    });
                }
                match evaluate(truth, &g, mec_cap) {
                    Ok(m) => out.records.push(RunRecord {
                        omega: Some(omega),
                        est_edges: Some(g.n_edges()),
                        shd: Some(m.shd),
                        sid: Some(m.sid),
                        sid_norm: Some(m.sid as f64 / m.sid_normalizer().max(1) as f64),
                        shd_cpdag: m.shd_cpdag,
                        sid_mec_lower: m.sid_mec_lower,
                        sid_mec_upper: m.sid_mec_upper,
                        favorable_omega: favorable.map(|f| f.0),
                        favorable_shd: favorable.map(|f| f.1),
                        wall_seconds: wall,
                        ..base.clone()
                    }),
                    Err(e) => fail(e.to_string(), &mut out),
                }
            }
        }
    }
    out
}

/// Writes `config.json`, `records.csv`, `records.json` and one JSON file per
/// estimate under `estimates/`.
pub fn write_benchmark_outputs(dir: impl AsRef<Path>, cfg: &ExperimentConfig, out: &BenchmarkOutput) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir.join("estimates"))?;
    std::fs::write(dir.join("config.json"), cfg.to_json()?)?;
    write_records_csv(&out.records, std::fs::File::create(dir.join("records.csv"))?)?;
    write_records_json(&out.records, std::io::BufWriter::new(std::fs::File::create(dir.join("records.json"))?))?;
    for e in &out.estimates {
        std::fs::write(dir.join("estimates").join(e.file_name()), serde_json::to_vec_pretty(e)?)?;
    }
    Ok(())
}
