use crate::error::{ensure_same_dim, Result};
use crate::graphs::{Cpdag, Dag};

/// Structural Hamming distance; a reversed edge counts once.
pub fn shd(g_true: &Dag, g_est: &Dag) -> Result<usize> {
    let d = g_true.n_nodes();
    ensure_same_dim(d, g_est.n_nodes())?;
    let mut count = 0;
    for a in 0..d {
        for b in a + 1..d {
            let t = (g_true.has_edge(a, b), g_true.has_edge(b, a));
            let e = (g_est.has_edge(a, b), g_est.has_edge(b, a));
            if t != e {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// SHD between CPDAGs: pairs whose status (absent, undirected, forward,
/// backward) differs.
pub fn shd_cpdag(c_true: &Cpdag, c_est: &Cpdag) -> Result<usize> {
    let d = c_true.n_nodes();
    ensure_same_dim(d, c_est.n_nodes())?;
    let mut count = 0;
    for a in 0..d {
        for b in a + 1..d {
            if c_true.pair_status(a, b) != c_est.pair_status(a, b) {
                count += 1;
            }
        }
    }
    Ok(count)
}
