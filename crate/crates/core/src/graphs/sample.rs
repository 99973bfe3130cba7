use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::dag::{BoolMatrix, Dag};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GraphModel {
    #[serde(rename = "ER")]
    Er,
    #[serde(rename = "SF")]
    Sf,
}

/// Random graph specification "ER-k" / "SF-k" on `d` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GraphSpec {
    pub model: GraphModel,
    pub d: usize,
    pub k: usize,
}

impl GraphSpec {
    pub fn er(d: usize, k: usize) -> Self {
        Self { model: GraphModel::Er, d, k }
    }

    pub fn sf(d: usize, k: usize) -> Self {
        Self { model: GraphModel::Sf, d, k }
    }

    /// Checks `d >= 2`, `1 <= k < d`.
    ///
    /// For ER graphs the edge probability `2k/(d-1)` is clipped at 1, so a
    /// spec asking for more edges than fit yields the complete DAG.
    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::Config(format!("graph needs at least 2 nodes, got {}", self.d)));
        }
        if self.k < 1 || self.k >= self.d {
            return Err(Error::Config(format!("edges per node k={} must lie in [1, {})", self.k, self.d)));
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        let m = match self.model {
            GraphModel::Er => "ER",
            GraphModel::Sf => "SF",
        };
        format!("{m}-{}", self.k)
    }
}

/// A sampled DAG together with the order in which its nodes were generated.
/// The generative order is always a valid causal order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledDag {
    pub dag: Dag,
    pub order: Vec<usize>,
}

pub fn sample_dag(spec: &GraphSpec, seed: u64) -> Result<SampledDag> {
    match spec.model {
        GraphModel::Er => sample_er_dag(spec, seed),
        GraphModel::Sf => sample_sf_dag(spec, seed),
    }
}

/// Erdős–Rényi DAG: each pair of a random node permutation is joined with
/// probability `min(1, 2k/(d-1))`, oriented along the permutation.
pub fn sample_er_dag(spec: &GraphSpec, seed: u64) -> Result<SampledDag> {
    if spec.model != GraphModel::Er {
        return Err(Error::Config("sample_er_dag needs an ER spec".into()));
    }
    spec.validate()?;
    let d = spec.d;
    let p = (2.0 * spec.k as f64 / (d - 1) as f64).min(1.0);
    let mut rng = stream_rng(seed, Stream::Graph);
    let mut order: Vec<usize> = (0..d).collect();
    order.shuffle(&mut rng);
    let mut adj = BoolMatrix::new(d);
    for a in 0..d {
        for b in a + 1..d {
            if rng.random::<f64>() < p {
                adj.set(order[a], order[b], true);
            }
        }
    }
    Ok(SampledDag { dag: Dag::from_adjacency_unchecked(adj), order })
}

/// Barabási–Albert DAG with `k` attachments per new node.
///
/// The first `k` generated nodes form a complete DAG along generation order;
/// every later node links to `k` distinct earlier nodes chosen with
/// probability proportional to their current degree. Edges point from the
/// earlier to the later node. Labels are shuffled at the end.
pub fn sample_sf_dag(spec: &GraphSpec, seed: u64) -> Result<SampledDag> {
    if spec.model != GraphModel::Sf {
        return Err(Error::Config("sample_sf_dag needs an SF spec".into()));
    }
    spec.validate()?;
    let (d, k) = (spec.d, spec.k);
    let mut rng = stream_rng(seed, Stream::Graph);
    let mut edges = Vec::with_capacity(k * d);
    let mut degree = vec![0usize; d];
    for a in 0..k {
        for b in a + 1..k {
            edges.push((a, b));
            degree[a] += 1;
            degree[b] += 1;
        }
    }
    for new in k..d {
        for t in preferential_targets(&degree[..new], k, &mut rng) {
            edges.push((t, new));
            degree[t] += 1;
            degree[new] += 1;
        }
    }
    let mut label: Vec<usize> = (0..d).collect();
    label.shuffle(&mut rng);
    let mut adj = BoolMatrix::new(d);
    for (a, b) in edges {
        adj.set(label[a], label[b], true);
    }
    Ok(SampledDag { dag: Dag::from_adjacency_unchecked(adj), order: label })
}

/// Draws `k` distinct indices with probability proportional to `degree`
/// (uniform while all degrees are zero).
fn preferential_targets(degree: &[usize], k: usize, rng: &mut Rng) -> Vec<usize> {
    let mut weight: Vec<f64> = degree.iter().map(|&g| g as f64).collect();
    let mut chosen = Vec::with_capacity(k);
    for _ in 0..k {
        let mut total: f64 = weight.iter().sum();
        if total <= 0.0 {
            for (i, w) in weight.iter_mut().enumerate() {
                if !chosen.contains(&i) {
                    *w = 1.0;
                }
            }
            total = weight.iter().sum();
        }
        let mut u = rng.random::<f64>() * total;
        let mut pick = weight.len() - 1;
        for (i, &w) in weight.iter().enumerate() {
            if w > 0.0 {
                pick = i;
                if u < w {
                    break;
                }
                u -= w;
            }
        }
        chosen.push(pick);
        weight[pick] = 0.0;
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_node_er_always_has_its_edge() {
        for seed in 0..50 {
            let s = sample_er_dag(&GraphSpec::er(2, 1), seed).unwrap();
            assert_eq!(s.dag.n_edges(), 1);
        }
    }

    #[test]
    fn er_mean_edge_count() {
        let spec = GraphSpec::er(10, 2);
        let total: usize = (0..1000).map(|s| sample_er_dag(&spec, s).unwrap().dag.n_edges()).sum();
        let mean = total as f64 / 1000.0;
        assert!((mean - 20.0).abs() < 2.0, "mean {mean}");
    }

    #[test]
    fn sf_edge_count_and_late_in_degree() {
        let spec = GraphSpec::sf(50, 4);
        for seed in 0..20 {
            let s = sample_sf_dag(&spec, seed).unwrap();
            assert_eq!(s.dag.n_edges(), 4 * 50 - 4 * 5 / 2);
            for &v in &s.order[4..] {
                assert_eq!(s.dag.parents(v).len(), 4);
            }
        }
        let small = sample_sf_dag(&GraphSpec::sf(3, 1), 3).unwrap();
        assert_eq!(small.dag.n_edges(), 2);
    }

    #[test]
    fn sf_hubs_emerge() {
        let spec = GraphSpec::sf(50, 4);
        let hubs = (0..100)
            .filter(|&s| {
                let g = sample_sf_dag(&spec, s).unwrap().dag;
                (0..50).map(|v| g.parents(v).len() + g.children(v).len()).max().unwrap() >= 20
            })
            .count();
        assert!(hubs >= 90, "{hubs}");
    }

    #[test]
    fn generative_order_is_causal() {
        for seed in 0..30 {
            for spec in [GraphSpec::er(12, 3), GraphSpec::sf(12, 2)] {
                let s = sample_dag(&spec, seed).unwrap();
                let mut pos = [0; 12];
                for (r, &v) in s.order.iter().enumerate() {
                    pos[v] = r;
                }
                for (a, b) in s.dag.edges() {
                    assert!(pos[a] < pos[b]);
                }
                assert!(s.dag.topological_order().is_ok());
            }
        }
    }

    #[test]
    fn invalid_specs() {
        assert!(sample_sf_dag(&GraphSpec::sf(3, 3), 0).is_err());
        assert!(sample_er_dag(&GraphSpec::er(1, 1), 0).is_err());
        assert!(sample_er_dag(&GraphSpec::sf(5, 1), 0).is_err());
    }
}
