//! Orientation of causal chains `A₁ → … → A_d` from pairwise regression
//! coefficients or marginal variances, under raw, standardized and
//! scale-harmonized parameterizations.

use std::fmt;
use std::io::Write;

use nalgebra::DMatrix;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graphs::Dag;
use crate::linalg::second_moments;
use crate::rng::{derive_seed, stream_rng, Stream};
use crate::scm::{Dataset, LinearScm, NoiseKind, NoiseSpec, SigmaLaw, WeightLaw, WeightedDag};
use crate::varsort::DEFAULT_TIE_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn flipped(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Raw,
    Standardized,
    Harmonized,
}

impl Regime {
    pub const ALL: [Regime; 3] = [Regime::Raw, Regime::Standardized, Regime::Harmonized];
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Raw => "raw",
            Regime::Standardized => "standardized",
            Regime::Harmonized => "harmonized",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainRule {
    Coefficients,
    Variance,
}

impl fmt::Display for ChainRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChainRule::Coefficients => "coefficients",
            ChainRule::Variance => "variance",
        })
    }
}

/// A chain observed in index order `X₁, …, X_d`. For a forward chain
/// `X_i = A_i`; for a backward chain the labels are reversed.
#[derive(Debug, Clone)]
pub struct ChainInstance {
    pub d: usize,
    pub direction: Direction,
    pub regime: Regime,
    /// Sampled weights `β_{A_i → A_{i+1}}` before any regime transformation.
    pub weights: Vec<f64>,
    /// Sampled noise standard deviations of `A₁, …, A_d`.
    pub sigmas: Vec<f64>,
    /// Population covariance, or the sample covariance when `data` is set,
    /// in observed labeling and after the regime transformation.
    pub covariance: DMatrix<f64>,
    pub data: Option<Dataset>,
    seed: u64,
}

/// Coin-flip aware outcome of an orientation rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decision {
    pub direction: Direction,
    pub coinflip: bool,
}

fn chain_scm(d: usize, weight_law: &WeightLaw, sigma_law: &SigmaLaw, kind: NoiseKind, seed: u64) -> Result<LinearScm> {
    if d < 3 {
        return Err(Error::Config(format!("chains need at least 3 nodes, got {d}")));
    }
    weight_law.validate()?;
    sigma_law.validate()?;
    let mut wrng = stream_rng(seed, Stream::Weights);
    let mut srng = stream_rng(seed, Stream::NoiseScale);
    let mut w = DMatrix::zeros(d, d);
    for i in 0..d - 1 {
        w[(i, i + 1)] = weight_law.sample(&mut wrng);
    }
    let sigmas = (0..d).map(|_| sigma_law.sample(&mut srng)).collect();
    let edges: Vec<(usize, usize)> = (0..d - 1).map(|i| (i, i + 1)).collect();
    LinearScm::new(Dag::from_edges(d, &edges)?, WeightedDag::new(w)?, NoiseSpec::new(kind, sigmas)?)
}

fn reversal(d: usize) -> Vec<usize> {
    (0..d).rev().collect()
}

fn shell(scm: &LinearScm, regime: Regime, direction: Direction, seed: u64) -> ChainInstance {
    let d = scm.d();
    ChainInstance {
        d,
        direction,
        regime,
        weights: (0..d - 1).map(|i| scm.weights().weight(i, i + 1)).collect(),
        sigmas: scm.noise().sigma.clone(),
        covariance: DMatrix::zeros(d, d),
        data: None,
        seed,
    }
}

/// Population instance: the covariance is exact.
pub fn make_chain(
    d: usize,
    weight_law: &WeightLaw,
    sigma_law: &SigmaLaw,
    regime: Regime,
    direction: Direction,
    seed: u64,
) -> Result<ChainInstance> {
    let scm = chain_scm(d, weight_law, sigma_law, NoiseKind::Gaussian, seed)?;
    let mut inst = shell(&scm, regime, direction, seed);
    let model = if regime == Regime::Harmonized { scm.harmonize_scales() } else { scm };
    let mut cov = model.population_covariance()?;
    if direction == Direction::Backward {
        let p = reversal(d);
        cov = DMatrix::from_fn(d, d, |i, j| cov[(p[i], p[j])]);
    }
    if regime == Regime::Standardized {
        cov = crate::contlearn::correlation(&cov);
    }
    inst.covariance = cov;
    Ok(inst)
}

/// Finite-sample instance with `n` simulated rows of the given noise kind.
#[allow(clippy::too_many_arguments)]
pub fn make_chain_sample(
    d: usize,
    weight_law: &WeightLaw,
    sigma_law: &SigmaLaw,
    kind: NoiseKind,
    regime: Regime,
    direction: Direction,
    n: usize,
    seed: u64,
) -> Result<ChainInstance> {
    let scm = chain_scm(d, weight_law, sigma_law, kind, seed)?;
    let mut inst = shell(&scm, regime, direction, seed);
    let model = if regime == Regime::Harmonized { scm.harmonize_scales() } else { scm };
    let mut data = model.simulate(n, seed)?;
    if direction == Direction::Backward {
        data = data.select_columns(&reversal(d));
    }
    if regime == Regime::Standardized {
        data = data.standardize()?;
    }
    inst.covariance = second_moments(data.x(), true);
    inst.data = Some(data);
    Ok(inst)
}

/// Absolute simple-regression coefficients `|Cov(X,Y)/Var(X)|` of each
/// neighbour on its predecessor, sweeping left to right and right to left.
pub fn pairwise_coefficients(inst: &ChainInstance) -> Result<(Vec<f64>, Vec<f64>)> {
    let c = &inst.covariance;
    let d = inst.d;
    let coef = |from: usize, to: usize| {
        let v = c[(from, from)];
        if !(v > 0.0) {
            return Err(Error::DegenerateData(format!("variable {from} has zero variance")));
        }
        Ok((c[(from, to)] / v).abs())
    };
    let l2r = (0..d - 1).map(|i| coef(i, i + 1)).collect::<Result<Vec<_>>>()?;
    let r2l = (0..d - 1).rev().map(|i| coef(i + 1, i)).collect::<Result<Vec<_>>>()?;
    Ok((l2r, r2l))
}

/// Concordant minus discordant pairs: `Σ_{p<q} sign(seq_q − seq_p)`.
pub fn increasingness(seq: &[f64]) -> i64 {
    increasingness_with(seq, 0.0)
}

/// As [`increasingness`], treating values within relative tolerance `tol`
/// as tied.
pub fn increasingness_with(seq: &[f64], tol: f64) -> i64 {
    let mut total = 0;
    for p in 0..seq.len() {
        for q in p + 1..seq.len() {
            let (a, b) = (seq[p], seq[q]);
            if (b - a).abs() <= tol * a.abs().max(b.abs()) {
                continue;
            }
            total += if b > a { 1 } else { -1 };
        }
    }
    total
}

fn decide(score: i64, inst: &ChainInstance, salt: u64) -> Decision {
    match score.signum() {
        1 => Decision { direction: Direction::Forward, coinflip: false },
        -1 => Decision { direction: Direction::Backward, coinflip: false },
        _ => {
            let heads = stream_rng(derive_seed(inst.seed, &[salt]), Stream::Coin).random_bool(0.5);
            Decision { direction: if heads { Direction::Forward } else { Direction::Backward }, coinflip: true }
        }
    }
}

/// Forward if the left-to-right coefficients are more increasing than the
/// right-to-left ones, backward if less, a fair coin otherwise.
pub fn orient_by_coefficients(inst: &ChainInstance) -> Result<Decision> {
    let (l2r, r2l) = pairwise_coefficients(inst)?;
    let score = increasingness_with(&l2r, DEFAULT_TIE_TOL) - increasingness_with(&r2l, DEFAULT_TIE_TOL);
    Ok(decide(score, inst, 0))
}

/// Forward if marginal variances increase along the index order.
pub fn orient_by_variance(inst: &ChainInstance) -> Decision {
    let var: Vec<f64> = inst.covariance.diagonal().iter().copied().collect();
    decide(increasingness_with(&var, DEFAULT_TIE_TOL), inst, 1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainStudy {
    pub d: usize,
    pub weight_law: WeightLaw,
    pub sigma_law: SigmaLaw,
    pub noise: NoiseKind,
    pub regime: Regime,
    pub rule: ChainRule,
    pub reps: usize,
    /// Rows per instance; `None` uses the population covariance.
    pub n: Option<usize>,
}

impl ChainStudy {
    pub fn population(d: usize, weight_law: WeightLaw, regime: Regime, rule: ChainRule, reps: usize) -> Self {
        Self { d, weight_law, sigma_law: SigmaLaw::default(), noise: NoiseKind::Gaussian, regime, rule, reps, n: None }
    }

    pub fn with_samples(self, n: usize) -> Self {
        Self { n: Some(n), ..self }
    }

    pub fn mode(&self) -> &'static str {
        if self.n.is_some() {
            "sample"
        } else {
            "population"
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainStudyRow {
    pub d: usize,
    pub weight_law: String,
    pub regime: String,
    pub mode: String,
    pub rule: String,
    pub reps: usize,
    pub n: Option<usize>,
    pub accuracy: f64,
    pub ties: usize,
}

/// Accuracy of the study's rule over `reps` instances alternating between
/// forward and backward chains, each with its own derived seed.
pub fn chain_accuracy_study(study: &ChainStudy, seed: u64, exec: Execution) -> Result<ChainStudyRow> {
    if study.reps == 0 {
        return Err(Error::Config("reps must be at least 1".into()));
    }
    let outcomes = exec.map(study.reps, |r| -> Result<(bool, bool)> {
        let direction = if r % 2 == 0 { Direction::Forward } else { Direction::Backward };
        let s = derive_seed(seed, &[r as u64]);
        let inst = match study.n {
            None => make_chain(study.d, &study.weight_law, &study.sigma_law, study.regime, direction, s)?,
            Some(n) => make_chain_sample(
                study.d,
                &study.weight_law,
                &study.sigma_law,
                study.noise,
                study.regime,
                direction,
                n,
                s,
            )?,
        };
        let decision = match study.rule {
            ChainRule::Coefficients => orient_by_coefficients(&inst)?,
            ChainRule::Variance => orient_by_variance(&inst),
        };
        Ok((decision.direction == direction, decision.coinflip))
    });
    let mut correct = 0;
    let mut ties = 0;
    for o in outcomes {
        let (ok, tie) = o?;
        correct += ok as usize;
        ties += tie as usize;
    }
    Ok(ChainStudyRow {
        d: study.d,
        weight_law: study.weight_law.to_string(),
        regime: study.regime.to_string(),
        mode: study.mode().to_string(),
        rule: study.rule.to_string(),
        reps: study.reps,
        n: study.n,
        accuracy: correct as f64 / study.reps as f64,
        ties,
    })
}

pub fn write_chain_rows<W: Write>(rows: &[ChainStudyRow], out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn law() -> WeightLaw {
        WeightLaw::default()
    }

    #[test]
    fn increasingness_examples() {
        assert_eq!(increasingness(&[1.0, 2.0, 3.0]), 3);
        assert_eq!(increasingness(&[3.0, 2.0, 1.0]), -3);
        assert_eq!(increasingness(&[2.0, 2.0]), 0);
    }

    #[test]
    fn raw_pair_coefficients() {
        // w = 1, unit noise: Cov = 1, Var = (1, 2)
        let inst = ChainInstance {
            d: 2,
            direction: Direction::Forward,
            regime: Regime::Raw,
            weights: vec![1.0],
            sigmas: vec![1.0, 1.0],
            covariance: DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 2.0]),
            data: None,
            seed: 0,
        };
        assert_eq!(pairwise_coefficients(&inst).unwrap(), (vec![1.0], vec![0.5]));
    }

    #[test]
    fn standardized_chain_has_unit_variances_and_mirrored_coefficients() {
        let inst = make_chain(4, &law(), &SigmaLaw::default(), Regime::Standardized, Direction::Forward, 3).unwrap();
        for i in 0..4 {
            assert!((inst.covariance[(i, i)] - 1.0).abs() < 1e-12);
        }
        let (l2r, r2l) = pairwise_coefficients(&inst).unwrap();
        let mut rev = r2l.clone();
        rev.reverse();
        for (a, b) in l2r.iter().zip(&rev) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(orient_by_variance(&inst).coinflip);
    }

    #[test]
    fn harmonized_coefficients_match_closed_form() {
        let inst = make_chain(3, &law(), &SigmaLaw::default(), Regime::Harmonized, Direction::Forward, 8).unwrap();
        let (ab, bc) = (inst.weights[0], inst.weights[1]);
        let (sa, sb, sc) = (inst.sigmas[0].powi(2), inst.sigmas[1].powi(2), inst.sigmas[2].powi(2));
        let (l2r, r2l) = pairwise_coefficients(&inst).unwrap();
        assert!((l2r[0] - (ab / (ab * ab + 1.0).sqrt()).abs()).abs() < 1e-12);
        assert!((l2r[1] - (bc / (bc * bc + 1.0).sqrt()).abs()).abs() < 1e-12);
        let (a2, b2) = (ab * ab, bc * bc);
        let cb = bc * (b2 + 1.0).powf(1.5) * (a2 * sa + sb * (a2 + 1.0))
            / (a2 * b2 * sa * (b2 + 1.0) + b2 * sb * (a2 + 1.0) * (b2 + 1.0) + sc * (a2 + 1.0) * (b2 + 1.0).powi(2));
        let ba = ab * sa * (a2 + 1.0).sqrt() / (a2 * sa + sb * (a2 + 1.0));
        assert!((r2l[0] - cb.abs()).abs() < 1e-12);
        assert!((r2l[1] - ba.abs()).abs() < 1e-12);
    }

    #[test]
    fn raw_population_coefficients_match_closed_form() {
        let inst = make_chain(3, &law(), &SigmaLaw::default(), Regime::Raw, Direction::Forward, 21).unwrap();
        let (ab, bc) = (inst.weights[0], inst.weights[1]);
        let (sa, sb, sc) = (inst.sigmas[0].powi(2), inst.sigmas[1].powi(2), inst.sigmas[2].powi(2));
        let (l2r, r2l) = pairwise_coefficients(&inst).unwrap();
        assert!((l2r[0] - ab.abs()).abs() < 1e-12 && (l2r[1] - bc.abs()).abs() < 1e-12);
        let cb = bc * (ab * ab * sa + sb) / (ab * ab * bc * bc * sa + bc * bc * sb + sc);
        assert!((r2l[0] - cb.abs()).abs() < 1e-12);
        assert!((r2l[1] - (ab * sa / (ab * ab * sa + sb)).abs()).abs() < 1e-12);
    }

    #[test]
    fn reversal_flips_decisions() {
        for seed in 0..50 {
            let f = make_chain(5, &law(), &SigmaLaw::default(), Regime::Raw, Direction::Forward, seed).unwrap();
            let b = make_chain(5, &law(), &SigmaLaw::default(), Regime::Raw, Direction::Backward, seed).unwrap();
            for (x, y) in [(orient_by_coefficients(&f).unwrap(), orient_by_coefficients(&b).unwrap()), (orient_by_variance(&f), orient_by_variance(&b))] {
                if !x.coinflip && !y.coinflip {
                    assert_eq!(x.direction, y.direction.flipped());
                }
            }
        }
    }

    #[test]
    fn sample_coefficients_converge_to_population() {
        let pop = make_chain(3, &law(), &SigmaLaw::default(), Regime::Raw, Direction::Forward, 5).unwrap();
        let smp = make_chain_sample(3, &law(), &SigmaLaw::default(), NoiseKind::Gaussian, Regime::Raw, Direction::Forward, 1_000_000, 5).unwrap();
        let (a, b) = pairwise_coefficients(&pop).unwrap();
        let (c, e) = pairwise_coefficients(&smp).unwrap();
        for (x, y) in a.iter().chain(&b).zip(c.iter().chain(&e)) {
            assert!((x - y).abs() < 1e-2, "{x} vs {y}");
        }
    }

    #[test]
    fn reproducible_and_rejects_short_chains() {
        let a = make_chain(3, &law(), &SigmaLaw::default(), Regime::Raw, Direction::Forward, 9).unwrap();
        let b = make_chain(3, &law(), &SigmaLaw::default(), Regime::Raw, Direction::Forward, 9).unwrap();
        assert_eq!(a.covariance, b.covariance);
        assert!(make_chain(2, &law(), &SigmaLaw::default(), Regime::Raw, Direction::Forward, 9).is_err());
    }

    #[test]
    fn study_is_execution_independent() {
        let s = ChainStudy::population(3, law(), Regime::Raw, ChainRule::Coefficients, 2000);
        let a = chain_accuracy_study(&s, 1, Execution::Sequential).unwrap();
        let b = chain_accuracy_study(&s, 1, Execution::default()).unwrap();
        assert_eq!(a, b);
        assert!(a.accuracy > 0.55 && a.accuracy < 0.69);
    }
}
