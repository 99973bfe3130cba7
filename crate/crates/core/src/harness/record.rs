use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;

/// One scored learner run. Wall time is kept out of the CSV so that reruns
/// produce identical files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub config_hash: String,
    pub setting: usize,
    pub graph: String,
    pub d: usize,
    pub noise: String,
    pub repetition: usize,
    pub seed: u64,
    pub learner: String,
    pub regime: String,
    pub omega: Option<f64>,
    pub varsortability: Option<f64>,
    pub true_edges: usize,
    pub est_edges: Option<usize>,
    pub shd: Option<usize>,
    pub sid: Option<usize>,
    pub sid_norm: Option<f64>,
    pub shd_cpdag: Option<usize>,
    pub sid_mec_lower: Option<usize>,
    pub sid_mec_upper: Option<usize>,
    pub favorable_omega: Option<f64>,
    pub favorable_shd: Option<usize>,
    pub error: Option<String>,
    pub wall_seconds: f64,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    schema_version: u32,
    config_hash: &'a str,
    setting: usize,
    graph: &'a str,
    d: usize,
    noise: &'a str,
    repetition: usize,
    seed: u64,
    learner: &'a str,
    regime: &'a str,
    omega: Option<f64>,
    varsortability: Option<f64>,
    true_edges: usize,
    est_edges: Option<usize>,
    shd: Option<usize>,
    sid: Option<usize>,
    sid_norm: Option<f64>,
    shd_cpdag: Option<usize>,
    sid_mec_lower: Option<usize>,
    sid_mec_upper: Option<usize>,
    favorable_omega: Option<f64>,
    favorable_shd: Option<usize>,
    error: Option<&'a str>,
}

impl<'a> From<&'a RunRecord> for CsvRow<'a> {
    fn from(r: &'a RunRecord) -> Self {
        CsvRow {
            schema_version: r.schema_version,
            config_hash: &r.config_hash,
            setting: r.setting,
            graph: &r.graph,
            d: r.d,
            noise: &r.noise,
            repetition: r.repetition,
            seed: r.seed,
            learner: &r.learner,
            regime: &r.regime,
            omega: r.omega,
            varsortability: r.varsortability,
            true_edges: r.true_edges,
            est_edges: r.est_edges,
            shd: r.shd,
            sid: r.sid,
            sid_norm: r.sid_norm,
            shd_cpdag: r.shd_cpdag,
            sid_mec_lower: r.sid_mec_lower,
            sid_mec_upper: r.sid_mec_upper,
            favorable_omega: r.favorable_omega,
            favorable_shd: r.favorable_shd,
            error: r.error.as_deref(),
        }
    }
}

pub fn write_records_csv<W: Write>(records: &[RunRecord], out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    for r in records {
        wtr.serialize(CsvRow::from(r))?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_records_json<W: Write>(records: &[RunRecord], out: W) -> Result<()> {
    serde_json::to_writer_pretty(out, records)?;
    Ok(())
}

pub fn read_records_json(path: impl AsRef<Path>) -> Result<Vec<RunRecord>> {
    Ok(serde_json::from_reader(std::io::BufReader::new(std::fs::File::open(path)?))?)
}

/// Raw learner output kept next to the records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub setting: usize,
    pub repetition: usize,
    pub learner: String,
    pub regime: String,
    pub d: usize,
    pub truth: Vec<(usize, usize)>,
    /// Row-major weights; entry `[k][j]` is the weight of `k -> j`.
    pub weights: Option<Vec<Vec<f64>>>,
    pub support: Vec<(usize, usize)>,
}

impl EstimateRecord {
    pub fn file_name(&self) -> String {
        format!("s{:03}_r{:03}_{}_{}.json", self.setting, self.repetition, self.learner, self.regime)
    }
}
