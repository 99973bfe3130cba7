use std::fmt;

use rand::Rng as _;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Rng;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Uniform law on a finite union of intervals, each excluding zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightLaw {
    pub intervals: Vec<(f64, f64)>,
}

impl WeightLaw {
    /// `Unif((-hi, -lo) ∪ (lo, hi))`.
    pub fn symmetric(lo: f64, hi: f64) -> Self {
        Self { intervals: vec![(-hi, -lo), (lo, hi)] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.intervals.is_empty() {
            return Err(Error::Config("weight law needs at least one interval".into()));
        }
        for &(lo, hi) in &self.intervals {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::Config(format!("invalid weight interval ({lo}, {hi})")));
            }
            if lo < 0.0 && hi > 0.0 {
                return Err(Error::Config(format!("weight interval ({lo}, {hi}) contains zero")));
            }
        }
        Ok(())
    }

    pub fn sample(&self, rng: &mut Rng) -> f64 {
        let total: f64 = self.intervals.iter().map(|(lo, hi)| hi - lo).sum();
        let mut u = rng.random::<f64>() * total;
        for &(lo, hi) in &self.intervals {
            let len = hi - lo;
            if u < len {
                return lo + u;
            }
            u -= len;
        }
        let (lo, hi) = *self.intervals.last().expect("validated law");
        lo + rng.random::<f64>() * (hi - lo)
    }
}

impl Default for WeightLaw {
    fn default() -> Self {
        Self::symmetric(0.5, 2.0)
    }
}

impl fmt::Display for WeightLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let [(a, b), (c, e)] = self.intervals[..] {
            if a == -e && b == -c {
                return write!(f, "±({c},{e})");
            }
        }
        let parts: Vec<String> = self.intervals.iter().map(|(lo, hi)| format!("({lo},{hi})")).collect();
        write!(f, "{}", parts.join("∪"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "law")]
pub enum SigmaLaw {
    Fixed { value: f64 },
    Uniform { lo: f64, hi: f64 },
}

impl SigmaLaw {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            SigmaLaw::Fixed { value } => value > 0.0 && value.is_finite(),
            SigmaLaw::Uniform { lo, hi } => lo > 0.0 && lo <= hi && hi.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid noise scale law {self:?}")))
        }
    }

    pub fn sample(&self, rng: &mut Rng) -> f64 {
        match *self {
            SigmaLaw::Fixed { value } => value,
            SigmaLaw::Uniform { lo, hi } => lo + rng.random::<f64>() * (hi - lo),
        }
    }
}

impl Default for SigmaLaw {
    fn default() -> Self {
        SigmaLaw::Uniform { lo: 0.5, hi: 2.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    Gaussian,
    Exponential,
    Gumbel,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 3] = [NoiseKind::Gaussian, NoiseKind::Exponential, NoiseKind::Gumbel];

    /// One draw with mean 0 and unit variance.
    pub fn standard_draw(self, rng: &mut Rng) -> f64 {
        match self {
            NoiseKind::Gaussian => StandardNormal.sample(rng),
            NoiseKind::Exponential => {
                let e: f64 = Exp1.sample(rng);
                e - 1.0
            }
            NoiseKind::Gumbel => {
                // 1 - u lies in (0, 1], keeping the double log finite.
                let u: f64 = 1.0 - rng.random::<f64>();
                let g = -(-u.ln()).ln();
                (g - EULER_GAMMA) * 6f64.sqrt() / std::f64::consts::PI
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NoiseKind::Gaussian => "gaussian",
            NoiseKind::Exponential => "exponential",
            NoiseKind::Gumbel => "gumbel",
        }
    }
}

/// Noise distribution family together with the law of per-node scales.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseLaw {
    pub kind: NoiseKind,
    pub sigma: SigmaLaw,
}

impl NoiseLaw {
    pub fn new(kind: NoiseKind, sigma: SigmaLaw) -> Self {
        Self { kind, sigma }
    }

    /// Gaussian noise with unit standard deviation on every node.
    pub fn gaussian_ev() -> Self {
        Self::new(NoiseKind::Gaussian, SigmaLaw::Fixed { value: 1.0 })
    }

    /// Short name such as `gaussian-ev` (fixed scale) or `gumbel-nv` (drawn scales).
    pub fn label(&self) -> String {
        let scales = match self.sigma {
            SigmaLaw::Fixed { .. } => "ev",
            SigmaLaw::Uniform { .. } => "nv",
        };
        format!("{}-{scales}", self.kind.name())
    }

    pub fn realize(&self, d: usize, rng: &mut Rng) -> NoiseSpec {
        NoiseSpec { kind: self.kind, sigma: (0..d).map(|_| self.sigma.sample(rng)).collect() }
    }
}

/// Realized noise: kind and per-node standard deviations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub sigma: Vec<f64>,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, sigma: Vec<f64>) -> Result<Self> {
        if let Some(s) = sigma.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
            return Err(Error::Config(format!("noise standard deviation must be positive, got {s}")));
        }
        Ok(Self { kind, sigma })
    }

    pub fn variances(&self) -> Vec<f64> {
        self.sigma.iter().map(|s| s * s).collect()
    }
}
