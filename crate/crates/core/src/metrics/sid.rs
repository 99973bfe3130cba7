use crate::error::{ensure_same_dim, Result};
use crate::graphs::{d_separated, Dag};

/// Structural intervention distance: ordered pairs `(i, j)` for which
/// adjusting for the estimated parents of `i` gives a wrong interventional
/// distribution of `j` under the true graph.
pub fn sid(g_true: &Dag, g_est: &Dag) -> Result<usize> {
    let d = g_true.n_nodes();
    ensure_same_dim(d, g_est.n_nodes())?;
    let reach = g_true.descendant_matrix();
    let mut mistakes = 0;
    for i in 0..d {
        let z = g_est.parents(i);
        for j in (0..d).filter(|&j| j != i) {
            if !adjustment_is_valid(g_true, &reach, i, j, &z) {
                mistakes += 1;
            }
        }
    }
    Ok(mistakes)
}

fn adjustment_is_valid(g: &Dag, reach: &crate::graphs::BoolMatrix, i: usize, j: usize, z: &[usize]) -> bool {
    let d = g.n_nodes();
    if z.contains(&j) {
        // The parent-adjusted estimate claims j is unaffected by i.
        return !reach.get(i, j);
    }
    if !reach.get(i, j) {
        return d_separated(g, i, j, z);
    }
    // Nodes other than i on directed paths from i to j.
    let on_path: Vec<usize> = (0..d).filter(|&c| c != i && reach.get(i, c) && (c == j || reach.get(c, j))).collect();
    let forbidden = |v: usize| on_path.iter().any(|&c| c == v || reach.get(c, v));
    if z.iter().any(|&v| forbidden(v)) {
        return false;
    }
    let first_edges: Vec<(usize, usize)> = on_path.iter().filter(|&&c| g.has_edge(i, c)).map(|&c| (i, c)).collect();
    d_separated(&g.without_edges(&first_edges), i, j, z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_and_reversed() {
        let g = Dag::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(sid(&g, &g).unwrap(), 0);
        let ab = Dag::from_edges(2, &[(0, 1)]).unwrap();
        assert_eq!(sid(&ab, &ab.reversed()).unwrap(), 2);
    }

    #[test]
    fn chain_against_empty_estimate() {
        // Downstream effects are identified without adjustment; every
        // upstream pair is falsely inferred as a nonzero effect.
        let chain = Dag::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(sid(&chain, &Dag::empty(3)).unwrap(), 3);
        // In a triangle the confounded pair (1, 2) adds a fourth mistake.
        let tri = Dag::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        assert_eq!(sid(&tri, &Dag::empty(3)).unwrap(), 4);
    }
}
