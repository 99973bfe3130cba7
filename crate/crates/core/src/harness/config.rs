use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::learner::LearnerSpec;
use crate::error::{Error, Result};
use crate::graphs::GraphSpec;
use crate::scm::{NoiseKind, NoiseLaw, SigmaLaw, WeightLaw};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScaleRegime {
    Raw,
    Standardized,
}

impl ScaleRegime {
    pub fn name(self) -> &'static str {
        match self {
            ScaleRegime::Raw => "raw",
            ScaleRegime::Standardized => "standardized",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ThresholdConfig {
    /// Fixed thresholds; every learner gets one record per entry.
    pub omegas: Vec<f64>,
    /// Also report the SHD-optimal threshold for continuous learners.
    pub favorable: bool,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        Self { omegas: vec![0.3], favorable: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub graphs: Vec<GraphSpec>,
    pub noises: Vec<NoiseLaw>,
    pub weight_law: WeightLaw,
    pub n: usize,
    pub repetitions: usize,
    pub learners: Vec<LearnerSpec>,
    pub regimes: Vec<ScaleRegime>,
    pub thresholds: ThresholdConfig,
    pub mec_metrics: bool,
    pub mec_cap: usize,
    pub master_seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// Gaussian noise with unit scale, then exponential and Gumbel noise with
/// scales drawn from `Unif(0.5, 2)`.
pub fn default_noises() -> Vec<NoiseLaw> {
    vec![
        NoiseLaw::gaussian_ev(),
        NoiseLaw::new(NoiseKind::Exponential, SigmaLaw::default()),
        NoiseLaw::new(NoiseKind::Gumbel, SigmaLaw::default()),
    ]
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let mut graphs = Vec::new();
        for d in [10, 30, 50] {
            graphs.extend([GraphSpec::er(d, 2), GraphSpec::sf(d, 2), GraphSpec::sf(d, 4)]);
        }
        Self {
            graphs,
            noises: default_noises(),
            weight_law: WeightLaw::default(),
            n: 1000,
            repetitions: 10,
            learners: ["sortnregress", "randomregress"].iter().map(|n| LearnerSpec::named(n)).collect(),
            regimes: vec![ScaleRegime::Raw, ScaleRegime::Standardized],
            thresholds: ThresholdConfig::default(),
            mec_metrics: false,
            mec_cap: crate::graphs::DEFAULT_MEC_CAP,
            master_seed: 0,
            output: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.repetitions == 0 {
            return fail("repetitions must be at least 1".into());
        }
        if self.n < 2 {
            return fail(format!("n must be at least 2, got {}", self.n));
        }
        if self.graphs.is_empty() || self.noises.is_empty() || self.learners.is_empty() || self.regimes.is_empty() {
            return fail("graphs, noises, learners and regimes must be non-empty".into());
        }
        for g in &self.graphs {
            g.validate()?;
            if self.mec_metrics && g.d > 10 {
                return fail(format!("MEC metrics are limited to d <= 10, got {}", g.label()));
            }
        }
        for noise in &self.noises {
            noise.sigma.validate()?;
        }
        self.weight_law.validate()?;
        for l in &self.learners {
            l.validate()?;
        }
        if self.thresholds.omegas.is_empty() || self.thresholds.omegas.iter().any(|w| !(*w >= 0.0)) {
            return fail("thresholds.omegas must be a non-empty list of non-negative values".into());
        }
        if self.mec_cap == 0 {
            return fail("mec_cap must be positive".into());
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON form, ignoring the output path.
    pub fn hash(&self) -> String {
        let canonical = Self { output: None, ..self.clone() };
        let bytes = serde_json::to_vec(&canonical).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))[..16].to_string()
    }
}
