use nalgebra::DMatrix;
use rand::seq::SliceRandom;

use super::lasso::{lasso_bic_from_moments, ParentSearchConfig};
use crate::error::Result;
use crate::graphs::{BoolMatrix, Dag};
use crate::linalg::second_moments;
use crate::rng::{stream_rng, Stream};
use crate::scm::{Dataset, WeightedDag};

/// Node indices sorted by ascending sample variance; ties keep index order.
pub fn ascending_variance_order(data: &Dataset) -> Vec<usize> {
    let var = data.variances();
    let mut order: Vec<usize> = (0..data.d()).collect();
    order.sort_by(|&a, &b| var[a].total_cmp(&var[b]));
    order
}

/// Regresses each node on all of its predecessors in `order` with
/// BIC-selected lasso.
pub fn regress_along_order(data: &Dataset, order: &[usize], cfg: &ParentSearchConfig) -> Result<WeightedDag> {
    let d = data.d();
    if data.n() <= d {
        log::warn!("only {} samples for {} variables; parent search is poorly conditioned", data.n(), d);
    }
    let s = second_moments(data.x(), true);
    let mut w = DMatrix::zeros(d, d);
    for r in 1..order.len() {
        let preds = &order[..r];
        let beta = lasso_bic_from_moments(&s, data.n(), order[r], preds, cfg)?;
        for (&k, b) in preds.iter().zip(beta) {
            w[(k, order[r])] = b;
        }
    }
    WeightedDag::new(w)
}

/// Variance-ordered parent regression.
pub fn sortnregress(data: &Dataset, cfg: &ParentSearchConfig) -> Result<WeightedDag> {
    regress_along_order(data, &ascending_variance_order(data), cfg)
}

/// Parent regression along a uniformly random order.
pub fn randomregress(data: &Dataset, cfg: &ParentSearchConfig, seed: u64) -> Result<WeightedDag> {
    let mut order: Vec<usize> = (0..data.d()).collect();
    order.shuffle(&mut stream_rng(seed, Stream::Order));
    regress_along_order(data, &order, cfg)
}

/// Complete DAG from every lower-variance node to every higher-variance node.
pub fn variance_sort_full(data: &Dataset) -> Dag {
    let order = ascending_variance_order(data);
    let mut adj = BoolMatrix::new(data.d());
    for (r, &a) in order.iter().enumerate() {
        for &b in &order[r + 1..] {
            adj.set(a, b, true);
        }
    }
    Dag::from_adjacency(adj).expect("edges follow a total order")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scm::{LinearScm, NoiseKind, NoiseSpec};

    fn two_node(w: f64, sigma: (f64, f64), n: usize, seed: u64) -> Dataset {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = w;
        let scm = LinearScm::from_weights(
            WeightedDag::new(m).unwrap(),
            NoiseSpec::new(NoiseKind::Gaussian, vec![sigma.0, sigma.1]).unwrap(),
        )
        .unwrap();
        scm.simulate(n, seed).unwrap()
    }

    #[test]
    fn two_node_order_is_forced() {
        let data = two_node(1.0, (1.0, 1.0), 500, 3);
        let w = sortnregress(&data, &ParentSearchConfig::default()).unwrap();
        assert_eq!(w.to_dag().unwrap().edges(), vec![(0, 1)]);
        assert_eq!(variance_sort_full(&data).edges(), vec![(0, 1)]);
        // Swapping the columns swaps the estimate.
        let swapped = data.select_columns(&[1, 0]);
        let ws = sortnregress(&swapped, &ParentSearchConfig::default()).unwrap();
        assert_eq!(ws.to_dag().unwrap().edges(), vec![(1, 0)]);
    }

    #[test]
    fn randomregress_is_seeded() {
        let data = two_node(1.0, (1.0, 1.0), 200, 6);
        let cfg = ParentSearchConfig::default();
        assert_eq!(randomregress(&data, &cfg, 4).unwrap(), randomregress(&data, &cfg, 4).unwrap());
        let one = data.select_columns(&[0]);
        assert!(randomregress(&one, &cfg, 1).unwrap().edges().is_empty());
    }

    #[test]
    fn complete_dag_edge_count() {
        let data = two_node(0.3, (1.0, 2.0), 100, 1);
        let wide = data.select_columns(&[0, 1, 0, 1, 1]);
        assert_eq!(variance_sort_full(&wide).n_edges(), 10);
    }
}
