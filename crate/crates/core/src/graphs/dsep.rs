use std::collections::VecDeque;

use super::dag::Dag;

/// d-separation of `i` and `j` given `z`, via reachability in the moralized
/// ancestral graph of `{i, j} ∪ z`.
pub fn d_separated(g: &Dag, i: usize, j: usize, z: &[usize]) -> bool {
    let d = g.n_nodes();
    let mut seed = vec![false; d];
    seed[i] = true;
    seed[j] = true;
    let mut blocked = vec![false; d];
    for &v in z {
        seed[v] = true;
        blocked[v] = true;
    }
    let anc = g.ancestral_closure(&seed);

    let mut nbr = vec![vec![false; d]; d];
    for c in (0..d).filter(|&c| anc[c]) {
        let pa: Vec<usize> = g.parents(c);
        for (x, &a) in pa.iter().enumerate() {
            nbr[a][c] = true;
            nbr[c][a] = true;
            for &b in &pa[x + 1..] {
                nbr[a][b] = true;
                nbr[b][a] = true;
            }
        }
    }

    let mut seen = vec![false; d];
    seen[i] = true;
    let mut queue = VecDeque::from([i]);
    while let Some(v) = queue.pop_front() {
        if v == j {
            return false;
        }
        for u in 0..d {
            if nbr[v][u] && anc[u] && !blocked[u] && !seen[u] {
                seen[u] = true;
                queue.push_back(u);
            }
        }
    }
    true
}
