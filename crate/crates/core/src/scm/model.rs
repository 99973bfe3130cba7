use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::dataset::{default_names, Dataset};
use super::laws::{NoiseLaw, NoiseSpec, WeightLaw};
use crate::error::{Error, Result};
use crate::graphs::{BoolMatrix, Dag};
use crate::rng::{stream_rng, Stream};

/// Real weight matrix; entry `(k, j)` is the weight of `k -> j`, so column
/// `j` holds the incoming weights of node `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedDag {
    w: DMatrix<f64>,
}

impl WeightedDag {
    pub fn new(w: DMatrix<f64>) -> Result<Self> {
        if w.nrows() != w.ncols() {
            return Err(Error::DimensionMismatch { expected: w.nrows(), got: w.ncols() });
        }
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("non-finite weight".into()));
        }
        Ok(Self { w })
    }

    pub fn zeros(d: usize) -> Self {
        Self { w: DMatrix::zeros(d, d) }
    }

    pub fn d(&self) -> usize {
        self.w.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.w
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.w
    }

    pub fn weight(&self, k: usize, j: usize) -> f64 {
        self.w[(k, j)]
    }

    /// Off-diagonal nonzero pattern.
    pub fn support(&self) -> BoolMatrix {
        let d = self.d();
        let mut s = BoolMatrix::new(d);
        for j in 0..d {
            for k in 0..d {
                if k != j && self.w[(k, j)] != 0.0 {
                    s.set(k, j, true);
                }
            }
        }
        s
    }

    /// Support as a DAG; fails if the support is cyclic.
    pub fn to_dag(&self) -> Result<Dag> {
        Dag::from_adjacency(self.support())
    }

    /// Nonzero off-diagonal entries as `(source, target, weight)`.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let d = self.d();
        let mut out = Vec::new();
        for k in 0..d {
            for j in 0..d {
                if k != j && self.w[(k, j)] != 0.0 {
                    out.push((k, j, self.w[(k, j)]));
                }
            }
        }
        out
    }

    pub fn to_export(&self, noise: Option<NoiseSpec>) -> ScmExport {
        ScmExport { d: self.d(), edges: self.edges(), noise }
    }

    pub fn from_export(e: &ScmExport) -> Result<Self> {
        let mut w = DMatrix::zeros(e.d, e.d);
        for &(k, j, v) in &e.edges {
            if k >= e.d || j >= e.d {
                return Err(Error::Config(format!("edge {k}->{j} out of range for {} nodes", e.d)));
            }
            w[(k, j)] = v;
        }
        Self::new(w)
    }
}

/// JSON exchange format for weighted graphs and SCMs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScmExport {
    pub d: usize,
    pub edges: Vec<(usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearScm {
    graph: Dag,
    weights: WeightedDag,
    noise: NoiseSpec,
}

impl LinearScm {
    pub fn new(graph: Dag, weights: WeightedDag, noise: NoiseSpec) -> Result<Self> {
        let d = graph.n_nodes();
        crate::error::ensure_same_dim(d, weights.d())?;
        crate::error::ensure_same_dim(d, noise.sigma.len())?;
        if weights.support() != *graph.adjacency() {
            return Err(Error::Integrity("weights must be nonzero exactly on graph edges".into()));
        }
        Ok(Self { graph, weights, noise })
    }

    /// SCM on the support of `weights`.
    pub fn from_weights(weights: WeightedDag, noise: NoiseSpec) -> Result<Self> {
        let graph = weights.to_dag()?;
        Self::new(graph, weights, noise)
    }

    pub fn graph(&self) -> &Dag {
        &self.graph
    }

    pub fn weights(&self) -> &WeightedDag {
        &self.weights
    }

    pub fn noise(&self) -> &NoiseSpec {
        &self.noise
    }

    pub fn d(&self) -> usize {
        self.graph.n_nodes()
    }

    /// Forward sampling in topological order, `x_j = X w_j + sigma_j * eps_j`.
    pub fn simulate(&self, n: usize, seed: u64) -> Result<Dataset> {
        if n == 0 {
            return Err(Error::Config("number of samples must be positive".into()));
        }
        let d = self.d();
        let mut rng = stream_rng(seed, Stream::Sample);
        let mut x = DMatrix::<f64>::zeros(n, d);
        for j in 0..d {
            let s = self.noise.sigma[j];
            for i in 0..n {
                x[(i, j)] = s * self.noise.kind.standard_draw(&mut rng);
            }
        }
        for j in self.graph.topological_order()? {
            for k in self.graph.parents(j) {
                let w = self.weights.weight(k, j);
                let parent = x.column(k).clone_owned();
                x.column_mut(j).axpy(w, &parent, 1.0);
            }
        }
        Dataset::new(x, default_names(d))
    }

    /// `Σ = M D Mᵀ` with `M = (I - Wᵀ)⁻¹` and `D = diag(sigma²)`.
    pub fn population_covariance(&self) -> Result<DMatrix<f64>> {
        let d = self.d();
        let a = DMatrix::<f64>::identity(d, d) - self.weights.matrix().transpose();
        let m = a.try_inverse().ok_or_else(|| Error::Integrity("I - Wᵀ is singular".into()))?;
        let dvec = DVector::from_vec(self.noise.variances());
        Ok(&m * DMatrix::from_diagonal(&dvec) * m.transpose())
    }

    pub fn population_variances(&self) -> Result<Vec<f64>> {
        Ok(self.population_covariance()?.diagonal().iter().copied().collect())
    }

    /// Divides every weight column `w_j` by `sqrt(‖w_j‖² + 1)`.
    pub fn harmonize_scales(&self) -> LinearScm {
        let mut w = self.weights.matrix().clone();
        for mut col in w.column_iter_mut() {
            let f = (col.norm_squared() + 1.0).sqrt();
            col /= f;
        }
        LinearScm { graph: self.graph.clone(), weights: WeightedDag { w }, noise: self.noise.clone() }
    }

    pub fn export(&self) -> ScmExport {
        self.weights.to_export(Some(self.noise.clone()))
    }

    pub fn from_export(e: &ScmExport) -> Result<Self> {
        let noise = e.noise.clone().ok_or_else(|| Error::Config("SCM export lacks a noise specification".into()))?;
        Self::from_weights(WeightedDag::from_export(e)?, NoiseSpec::new(noise.kind, noise.sigma)?)
    }
}

/// Draws one weight per edge of `g` and one noise scale per node.
pub fn sample_linear_scm(g: &Dag, weight_law: &WeightLaw, noise_law: &NoiseLaw, seed: u64) -> Result<LinearScm> {
    weight_law.validate()?;
    noise_law.sigma.validate()?;
    let d = g.n_nodes();
    let mut wrng = stream_rng(seed, Stream::Weights);
    let mut w = DMatrix::zeros(d, d);
    for (k, j) in g.edges() {
        let mut v = weight_law.sample(&mut wrng);
        while v == 0.0 {
            v = weight_law.sample(&mut wrng);
        }
        w[(k, j)] = v;
    }
    let mut srng = stream_rng(seed, Stream::NoiseScale);
    let noise = noise_law.realize(d, &mut srng);
    LinearScm::new(g.clone(), WeightedDag { w }, noise)
}
