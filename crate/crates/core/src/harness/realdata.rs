use std::path::Path;

use rand::Rng as _;

use super::config::ExperimentConfig;
use super::record::RunRecord;
use super::runner::{score_instance, InstanceMeta};
use crate::error::{Error, Result};
use crate::graphs::edgelist::read_edge_list;
use crate::graphs::Dag;
use crate::rng::{derive_seed, stream_rng, Stream};
use crate::scm::Dataset;
use crate::stats::{mean, std_dev};

const BOOTSTRAP_SALT: u64 = 0xb007;

pub fn load_dataset_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    Dataset::load_csv(path)
}

/// `n` rows drawn with replacement.
pub fn bootstrap(data: &Dataset, seed: u64) -> Dataset {
    let n = data.n();
    let mut rng = stream_rng(seed, Stream::Bootstrap);
    let rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
    data.select_rows(&rows)
}

/// Scores every configured learner and the empty graph on
/// `cfg.repetitions` bootstrap samples of `data`, raw and standardized.
pub fn realdata_records(data: &Dataset, truth: &Dag, cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    if truth.n_nodes() != data.d() {
        return Err(Error::Config(format!(
            "truth has {} nodes but the data has {} columns",
            truth.n_nodes(),
            data.d()
        )));
    }
    if truth.n_edges() == 0 {
        return Err(Error::Config("the ground truth has no edges".into()));
    }
    let hash = cfg.hash();
    let mut records = Vec::new();
    for rep in 0..cfg.repetitions {
        let seed = derive_seed(cfg.master_seed, &[BOOTSTRAP_SALT, rep as u64]);
        let sample = bootstrap(data, seed);
        let meta = InstanceMeta {
            config_hash: &hash,
            setting: 0,
            graph: "real".into(),
            noise: String::new(),
            repetition: rep,
            seed,
        };
        records.extend(score_instance(cfg, &meta, truth, &sample, true).records);
    }
    Ok(records)
}

pub fn realdata_study(data_path: impl AsRef<Path>, truth_path: impl AsRef<Path>, cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    let data = load_dataset_csv(data_path)?;
    let truth = read_edge_list(truth_path, Some(data.d()))?;
    realdata_records(&data, &truth, cfg)
}

/// Mean and standard deviation of raw-data varsortability over the
/// bootstrap samples in `records`.
pub fn varsortability_summary(records: &[RunRecord]) -> Option<(f64, f64)> {
    let mut seen = std::collections::BTreeMap::new();
    for r in records.iter().filter(|r| r.regime == "raw") {
        if let Some(v) = r.varsortability {
            seen.entry(r.repetition).or_insert(v);
        }
    }
    let vs: Vec<f64> = seen.into_values().collect();
    (!vs.is_empty()).then(|| (mean(&vs), if vs.len() > 1 { std_dev(&vs) } else { 0.0 }))
}
