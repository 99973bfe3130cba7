use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::contlearn::{golem_fit, notears_fit, threshold_and_break_cycles, FitTrace, GolemVariant, OptimizerSettings};
use crate::error::{Error, Result};
use crate::graphs::Dag;
use crate::learners::{mse_gds, randomregress, sortnregress, variance_sort_full, ParentSearchConfig};
use crate::scm::{Dataset, WeightedDag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LearnerKind {
    SortnRegress,
    RandomRegress,
    VarSortFull,
    MseGds,
    Notears,
    GolemEv,
    GolemNv,
}

impl LearnerKind {
    pub const ALL: [LearnerKind; 7] = [
        LearnerKind::SortnRegress,
        LearnerKind::RandomRegress,
        LearnerKind::VarSortFull,
        LearnerKind::MseGds,
        LearnerKind::Notears,
        LearnerKind::GolemEv,
        LearnerKind::GolemNv,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LearnerKind::SortnRegress => "sortnregress",
            LearnerKind::RandomRegress => "randomregress",
            LearnerKind::VarSortFull => "varsort-full",
            LearnerKind::MseGds => "mse-gds",
            LearnerKind::Notears => "notears",
            LearnerKind::GolemEv => "golem-ev",
            LearnerKind::GolemNv => "golem-nv",
        }
    }

    /// Continuous learners return dense weights that are thresholded; the
    /// others are scored on their own support.
    pub fn is_continuous(self) -> bool {
        matches!(self, LearnerKind::Notears | LearnerKind::GolemEv | LearnerKind::GolemNv)
    }

    /// Settings from a possibly partial JSON object; missing fields keep
    /// this learner's preset.
    pub fn settings_from_json(self, patch: &serde_json::Value) -> Result<OptimizerSettings> {
        let base = self.default_settings().ok_or_else(|| Error::Config(format!("{self} takes no optimizer settings")))?;
        let mut merged = serde_json::to_value(base)?;
        let (Some(fields), Some(patch)) = (merged.as_object_mut(), patch.as_object()) else {
            return Err(Error::Config("optimizer settings must be a JSON object".into()));
        };
        for (k, v) in patch {
            fields.insert(k.clone(), v.clone());
        }
        Ok(serde_json::from_value(merged)?)
    }

    pub fn default_settings(self) -> Option<OptimizerSettings> {
        match self {
            LearnerKind::Notears => Some(OptimizerSettings::notears()),
            LearnerKind::GolemEv => Some(OptimizerSettings::golem_ev()),
            LearnerKind::GolemNv => Some(OptimizerSettings::golem_nv()),
            _ => None,
        }
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LearnerKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let known: Vec<_> = LearnerKind::ALL.iter().map(|k| k.name()).collect();
                Error::Config(format!("unknown learner {s:?}; known: {}", known.join(", ")))
            })
    }
}

/// A learner entry of the experiment configuration. In JSON either a bare
/// name or an object with optional overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LearnerEntry")]
pub struct LearnerSpec {
    pub name: String,
    /// Distinguishes several entries of the same learner in the output.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub settings: Option<OptimizerSettings>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parent_search: Option<ParentSearchConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_edges: Option<usize>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum LearnerEntry {
    Name(String),
    Full {
        name: String,
        #[serde(default)]
        label: Option<String>,
        #[serde(default)]
        settings: Option<serde_json::Value>,
        #[serde(default)]
        parent_search: Option<ParentSearchConfig>,
        #[serde(default)]
        max_edges: Option<usize>,
    },
}

impl TryFrom<LearnerEntry> for LearnerSpec {
    type Error = Error;

    fn try_from(e: LearnerEntry) -> Result<Self> {
        Ok(match e {
            LearnerEntry::Name(name) => LearnerSpec::named(&name),
            LearnerEntry::Full { name, label, settings, parent_search, max_edges } => {
                let settings = match settings {
                    Some(patch) => Some(name.parse::<LearnerKind>()?.settings_from_json(&patch)?),
                    None => None,
                };
                LearnerSpec { name, label, settings, parent_search, max_edges }
            }
        })
    }
}

/// Output of one fit: raw weights when the learner produces them, and the
/// graph used for scoring when no threshold applies.
#[derive(Debug, Clone)]
pub struct LearnerFit {
    pub weights: Option<WeightedDag>,
    pub support: Dag,
    pub trace: Option<FitTrace>,
}

impl LearnerSpec {
    pub fn named(name: &str) -> Self {
        Self { name: name.to_string(), label: None, settings: None, parent_search: None, max_edges: None }
    }

    pub fn kind(&self) -> Result<LearnerKind> {
        self.name.parse()
    }

    pub fn label(&self) -> &str {
        self.label.as_deref().unwrap_or(&self.name)
    }

    pub fn validate(&self) -> Result<()> {
        let kind = self.kind()?;
        if let Some(s) = &self.settings {
            if !kind.is_continuous() {
                return Err(Error::Config(format!("{} takes no optimizer settings", self.name)));
            }
            s.validate()?;
        }
        if let Some(p) = &self.parent_search {
            p.validate()?;
        }
        Ok(())
    }

    pub fn optimizer_settings(&self) -> Option<OptimizerSettings> {
        self.settings.clone().or_else(|| self.kind().ok()?.default_settings())
    }

    /// Fits the learner. `seed` only drives randomregress.
    pub fn fit(&self, data: &Dataset, seed: u64) -> Result<LearnerFit> {
        let kind = self.kind()?;
        let ps = self.parent_search.clone().unwrap_or_default();
        let weighted = |w: WeightedDag| -> Result<LearnerFit> {
            Ok(LearnerFit { support: w.to_dag()?, weights: Some(w), trace: None })
        };
        match kind {
            LearnerKind::SortnRegress => weighted(sortnregress(data, &ps)?),
            LearnerKind::RandomRegress => weighted(randomregress(data, &ps, seed)?),
            LearnerKind::VarSortFull => Ok(LearnerFit { weights: None, support: variance_sort_full(data), trace: None }),
            LearnerKind::MseGds => {
                let d = data.d();
                weighted(mse_gds(data, self.max_edges.unwrap_or(d * d.saturating_sub(1) / 2))?)
            }
            LearnerKind::Notears | LearnerKind::GolemEv | LearnerKind::GolemNv => {
                let s = self.optimizer_settings().expect("continuous learners have settings");
                let (w, trace) = match kind {
                    LearnerKind::Notears => notears_fit(data, &s)?,
                    LearnerKind::GolemEv => golem_fit(data, GolemVariant::Ev, &s)?,
                    _ => golem_fit(data, GolemVariant::Nv, &s)?,
                };
                Ok(LearnerFit { support: threshold_and_break_cycles(&w, s.omega), weights: Some(w), trace: Some(trace) })
            }
        }
    }
}

impl LearnerFit {
    /// Graph scored at threshold `omega`; only continuous learners are
    /// thresholded.
    pub fn graph_at(&self, kind: LearnerKind, omega: f64) -> Dag {
        match (&self.weights, kind.is_continuous()) {
            (Some(w), true) => threshold_and_break_cycles(w, omega),
            _ => self.support.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_roundtrip() {
        for k in LearnerKind::ALL {
            assert_eq!(k.name().parse::<LearnerKind>().unwrap(), k);
        }
        assert!("ges".parse::<LearnerKind>().is_err());
    }

    #[test]
    fn partial_settings_keep_the_learner_preset() {
        let cfg: Vec<LearnerSpec> = serde_json::from_str(r#"[{"name": "golem-ev", "settings": {"iterations": 50}}]"#).unwrap();
        let s = cfg[0].optimizer_settings().unwrap();
        assert_eq!(s.iterations, 50);
        assert_eq!(s.lambda1, OptimizerSettings::golem_ev().lambda1);
        assert!(serde_json::from_str::<Vec<LearnerSpec>>(r#"[{"name": "golem-ev", "settings": {"iteratons": 5}}]"#).is_err());
        assert!(serde_json::from_str::<Vec<LearnerSpec>>(r#"[{"name": "sortnregress", "settings": {}}]"#).is_err());
    }

    #[test]
    fn settings_only_for_continuous() {
        let mut spec = LearnerSpec::named("sortnregress");
        spec.settings = Some(OptimizerSettings::notears());
        assert!(spec.validate().is_err());
        assert_eq!(LearnerSpec::named("golem-nv").optimizer_settings().unwrap().lambda1, 2e-3);
    }

    #[test]
    fn every_learner_fits_small_data() {
        let x = nalgebra::DMatrix::from_fn(60, 3, |i, j| ((i * (j + 3)) % 7) as f64 + if j == 2 { i as f64 * 0.1 } else { 0.0 });
        let data = Dataset::from_matrix(x).unwrap();
        for k in LearnerKind::ALL {
            let mut spec = LearnerSpec::named(k.name());
            if k.is_continuous() {
                spec.settings = Some(OptimizerSettings { iterations: 200, ..k.default_settings().unwrap() });
            }
            let fit = spec.fit(&data, 1).unwrap();
            assert_eq!(fit.support.n_nodes(), 3);
            assert_eq!(fit.trace.is_some(), k.is_continuous());
        }
    }
}
