use nalgebra::DMatrix;

use crate::graphs::{BoolMatrix, Dag};
use crate::scm::WeightedDag;

/// Zeroes weights with `|w| < omega` (and the diagonal), then removes the
/// smallest-magnitude edge lying on a directed cycle until the support is
/// acyclic. Ties go to the lowest `(source, target)` pair.
pub fn threshold_and_break_cycles(w: &WeightedDag, omega: f64) -> Dag {
    let pruned = threshold_weights(w.matrix(), omega);
    let d = pruned.nrows();
    let mut adj = BoolMatrix::new(d);
    for k in 0..d {
        for j in 0..d {
            if pruned[(k, j)] != 0.0 {
                adj.set(k, j, true);
            }
        }
    }
    loop {
        let reach = reachability(&adj);
        let mut worst: Option<(f64, usize, usize)> = None;
        for (k, j) in adj.iter_true() {
            if reach[j][k] {
                let a = pruned[(k, j)].abs();
                if worst.is_none_or(|(b, _, _)| a < b) {
                    worst = Some((a, k, j));
                }
            }
        }
        match worst {
            Some((_, k, j)) => adj.set(k, j, false),
            None => return Dag::from_adjacency(adj).expect("no edge lies on a cycle"),
        }
    }
}

/// Weight matrix with `|w| < omega` entries and the diagonal set to zero.
pub fn threshold_weights(w: &DMatrix<f64>, omega: f64) -> DMatrix<f64> {
    let mut out = w.clone();
    for j in 0..out.ncols() {
        for k in 0..out.nrows() {
            if k == j || out[(k, j)].abs() < omega {
                out[(k, j)] = 0.0;
            }
        }
    }
    out
}

/// `reach[a][b]`: a directed path `a -> ... -> b` of length >= 1 exists.
fn reachability(adj: &BoolMatrix) -> Vec<Vec<bool>> {
    let d = adj.dim();
    let succ: Vec<Vec<usize>> = (0..d).map(|a| (0..d).filter(|&b| adj.get(a, b)).collect()).collect();
    (0..d)
        .map(|s| {
            let mut seen = vec![false; d];
            let mut stack: Vec<usize> = succ[s].clone();
            while let Some(v) = stack.pop() {
                if !seen[v] {
                    seen[v] = true;
                    stack.extend(succ[v].iter().copied().filter(|&u| !seen[u]));
                }
            }
            seen
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wd(d: usize, entries: &[(usize, usize, f64)]) -> WeightedDag {
        let mut w = DMatrix::zeros(d, d);
        for &(k, j, v) in entries {
            w[(k, j)] = v;
        }
        WeightedDag::new(w).unwrap()
    }

    #[test]
    fn acyclic_support_is_kept() {
        let w = wd(3, &[(0, 1, 0.9), (1, 2, -1.2)]);
        assert_eq!(threshold_and_break_cycles(&w, 0.3).edges(), vec![(0, 1), (1, 2)]);
        let small = wd(3, &[(0, 1, 0.01), (1, 2, -0.2)]);
        assert_eq!(threshold_and_break_cycles(&small, 0.0).edges(), vec![(0, 1), (1, 2)]);
        assert_eq!(threshold_and_break_cycles(&small, 0.3).n_edges(), 0);
    }

    #[test]
    fn two_cycle_keeps_larger_edge() {
        let w = wd(2, &[(0, 1, 0.5), (1, 0, 0.4)]);
        assert_eq!(threshold_and_break_cycles(&w, 0.3).edges(), vec![(0, 1)]);
    }

    #[test]
    fn only_cycle_edges_are_removed() {
        // 0 -> 1 -> 2 -> 0 cycle plus a weak edge 3 -> 0 off the cycle.
        let w = wd(4, &[(0, 1, 1.0), (1, 2, 0.8), (2, 0, 0.6), (3, 0, 0.35)]);
        assert_eq!(threshold_and_break_cycles(&w, 0.3).edges(), vec![(0, 1), (1, 2), (3, 0)]);
    }

    #[test]
    fn diagonal_is_ignored() {
        let w = wd(2, &[(0, 0, 3.0), (0, 1, 1.0)]);
        assert_eq!(threshold_and_break_cycles(&w, 0.3).edges(), vec![(0, 1)]);
    }
}
