//! Experiment orchestration: configuration, the benchmark matrix, real-data
//! bootstrap studies and result files.

mod config;
mod learner;
mod realdata;
mod record;
mod runner;

pub use config::{default_noises, ExperimentConfig, ScaleRegime, ThresholdConfig};
pub use learner::{LearnerFit, LearnerKind, LearnerSpec};
pub use realdata::{bootstrap, load_dataset_csv, realdata_records, realdata_study, varsortability_summary};
pub use record::{read_records_json, write_records_csv, write_records_json, EstimateRecord, RunRecord, SCHEMA_VERSION};
pub use runner::{run_benchmark, run_benchmark_with, write_benchmark_outputs, BenchmarkOutput};
