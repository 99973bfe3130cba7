use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};

/// Square boolean matrix stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BoolMatrix {
    d: usize,
    data: Vec<bool>,
}

impl BoolMatrix {
    pub fn new(d: usize) -> Self {
        Self { d, data: vec![false; d * d] }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.d + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.data[i * self.d + j] = v;
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.data.iter().any(|&b| b)
    }

    /// Boolean product: `(A*B)[i][j] = OR_k A[i][k] AND B[k][j]`.
    pub fn bool_mul(&self, other: &BoolMatrix) -> BoolMatrix {
        let d = self.d;
        let mut out = BoolMatrix::new(d);
        for i in 0..d {
            for k in 0..d {
                if self.get(i, k) {
                    for j in 0..d {
                        if other.get(k, j) {
                            out.data[i * d + j] = true;
                        }
                    }
                }
            }
        }
        out
    }

    pub fn or_assign(&mut self, other: &BoolMatrix) {
        for (a, b) in self.data.iter_mut().zip(other.data.iter()) {
            *a |= *b;
        }
    }

    pub fn iter_true(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let d = self.d;
        self.data.iter().enumerate().filter(|(_, &b)| b).map(move |(k, _)| (k / d, k % d))
    }
}

impl fmt::Debug for BoolMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.d {
            let row: String = (0..self.d).map(|j| if self.get(i, j) { '1' } else { '.' }).collect();
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

/// Kahn's algorithm with smallest-index tie-breaking; `None` on a cycle.
fn kahn(adj: &BoolMatrix) -> Option<Vec<usize>> {
    let d = adj.dim();
    let mut indeg: Vec<usize> = (0..d).map(|j| (0..d).filter(|&i| adj.get(i, j)).count()).collect();
    let mut ready: std::collections::BTreeSet<usize> = (0..d).filter(|&j| indeg[j] == 0).collect();
    let mut order = Vec::with_capacity(d);
    while let Some(&v) = ready.iter().next() {
        ready.remove(&v);
        order.push(v);
        for j in 0..d {
            if adj.get(v, j) {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    ready.insert(j);
                }
            }
        }
    }
    (order.len() == d).then_some(order)
}

/// Whether a (possibly self-looped) directed adjacency matrix is acyclic.
pub fn is_acyclic(adj: &BoolMatrix) -> bool {
    kahn(adj).is_some()
}

/// Directed acyclic graph over nodes `0..d`; entry `(k, j)` is the edge `k -> j`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dag {
    adj: BoolMatrix,
}

impl fmt::Debug for Dag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dag({}; {:?})", self.n_nodes(), self.edges())
    }
}

impl Dag {
    pub fn empty(d: usize) -> Self {
        Self { adj: BoolMatrix::new(d) }
    }

    pub fn from_adjacency(adj: BoolMatrix) -> Result<Self> {
        if (0..adj.dim()).any(|i| adj.get(i, i)) {
            return Err(Error::Integrity("self-loop in DAG adjacency".into()));
        }
        if !is_acyclic(&adj) {
            return Err(Error::Integrity("adjacency contains a directed cycle".into()));
        }
        Ok(Self { adj })
    }

    pub fn from_edges(d: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = BoolMatrix::new(d);
        for &(k, j) in edges {
            if k >= d || j >= d {
                return Err(Error::Config(format!("edge {k}->{j} out of range for {d} nodes")));
            }
            adj.set(k, j, true);
        }
        Self::from_adjacency(adj)
    }

    pub(crate) fn from_adjacency_unchecked(adj: BoolMatrix) -> Self {
        debug_assert!(is_acyclic(&adj));
        Self { adj }
    }

    pub fn n_nodes(&self) -> usize {
        self.adj.dim()
    }

    pub fn adjacency(&self) -> &BoolMatrix {
        &self.adj
    }

    #[inline]
    pub fn has_edge(&self, k: usize, j: usize) -> bool {
        self.adj.get(k, j)
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj.get(a, b) || self.adj.get(b, a)
    }

    pub fn n_edges(&self) -> usize {
        self.adj.count()
    }

    /// Edges as `(source, target)` pairs in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adj.iter_true().collect()
    }

    pub fn parents(&self, j: usize) -> Vec<usize> {
        (0..self.n_nodes()).filter(|&k| self.adj.get(k, j)).collect()
    }

    pub fn children(&self, k: usize) -> Vec<usize> {
        (0..self.n_nodes()).filter(|&j| self.adj.get(k, j)).collect()
    }

    /// Topological order by Kahn's method, smallest index first among ready nodes.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        kahn(&self.adj).ok_or_else(|| Error::Integrity("cycle detected in topological sort".into()))
    }

    /// `E^1, ..., E^(d-1)` as boolean matrices: entry `(i, j)` of the `l`-th
    /// power is set iff a directed path of length `l` from `i` to `j` exists.
    /// Trailing all-zero powers are dropped.
    pub fn path_powers(&self) -> Vec<BoolMatrix> {
        let d = self.n_nodes();
        let mut out = Vec::new();
        if d < 2 {
            return out;
        }
        let mut power = self.adj.clone();
        for _ in 1..d {
            if power.is_empty() {
                break;
            }
            let next = power.bool_mul(&self.adj);
            out.push(power);
            power = next;
        }
        out
    }

    /// Entry `(i, j)` set iff there is a directed path `i -> ... -> j` of length >= 1.
    pub fn descendant_matrix(&self) -> BoolMatrix {
        let mut reach = BoolMatrix::new(self.n_nodes());
        for p in self.path_powers() {
            reach.or_assign(&p);
        }
        reach
    }

    /// Nodes reachable from `start` (excluding `start` unless on a cycle, which cannot happen).
    pub fn descendants_of(&self, start: usize) -> Vec<bool> {
        let d = self.n_nodes();
        let mut seen = vec![false; d];
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for c in 0..d {
                if self.adj.get(v, c) && !seen[c] {
                    seen[c] = true;
                    queue.push_back(c);
                }
            }
        }
        seen
    }

    /// Ancestors of a node set, including the set itself.
    pub fn ancestral_closure(&self, nodes: &[bool]) -> Vec<bool> {
        let d = self.n_nodes();
        let mut inside = nodes.to_vec();
        let mut queue: VecDeque<usize> = (0..d).filter(|&v| nodes[v]).collect();
        while let Some(v) = queue.pop_front() {
            for p in 0..d {
                if self.adj.get(p, v) && !inside[p] {
                    inside[p] = true;
                    queue.push_back(p);
                }
            }
        }
        inside
    }

    /// Graph with every edge reversed.
    pub fn reversed(&self) -> Dag {
        let d = self.n_nodes();
        let mut adj = BoolMatrix::new(d);
        for (k, j) in self.adj.iter_true() {
            adj.set(j, k, true);
        }
        Dag { adj }
    }

    /// Relabels node `v` as `perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> Dag {
        let d = self.n_nodes();
        let mut adj = BoolMatrix::new(d);
        for (k, j) in self.adj.iter_true() {
            adj.set(perm[k], perm[j], true);
        }
        Dag { adj }
    }

    /// Copy without the listed edges.
    pub fn without_edges(&self, edges: &[(usize, usize)]) -> Dag {
        let mut adj = self.adj.clone();
        for &(k, j) in edges {
            adj.set(k, j, false);
        }
        Dag { adj }
    }
}

/// All DAGs on `d` labeled nodes (feasible for `d <= 4`).
pub fn enumerate_all_dags(d: usize) -> Vec<Dag> {
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|a| (a + 1..d).map(move |b| (a, b))).collect();
    let total = 3usize.pow(pairs.len() as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let mut adj = BoolMatrix::new(d);
        for &(a, b) in &pairs {
            match c % 3 {
                1 => adj.set(a, b, true),
                2 => adj.set(b, a, true),
                _ => {}
            }
            c /= 3;
        }
        if is_acyclic(&adj) {
            out.push(Dag { adj });
        }
    }
    out
}
