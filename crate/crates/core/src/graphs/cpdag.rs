use super::dag::{is_acyclic, BoolMatrix, Dag};
use crate::error::{Error, Result};

pub const DEFAULT_MEC_CAP: usize = 10_000;

/// Completed partially directed acyclic graph.
///
/// `directed(k, j)` marks `k -> j`; `undirected` is symmetric and disjoint from
/// the directed part.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cpdag {
    directed: BoolMatrix,
    undirected: BoolMatrix,
}

/// Status of an unordered pair `(a, b)` with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairStatus {
    Absent,
    Undirected,
    Forward,
    Backward,
}

impl Cpdag {
    pub fn new(directed: BoolMatrix, undirected: BoolMatrix) -> Result<Self> {
        let d = directed.dim();
        if undirected.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: undirected.dim() });
        }
        for a in 0..d {
            if directed.get(a, a) || undirected.get(a, a) {
                return Err(Error::Integrity("self-loop in CPDAG".into()));
            }
            for b in 0..d {
                if undirected.get(a, b) != undirected.get(b, a) {
                    return Err(Error::Integrity("undirected part is not symmetric".into()));
                }
                if undirected.get(a, b) && (directed.get(a, b) || directed.get(b, a)) {
                    return Err(Error::Integrity("edge is both directed and undirected".into()));
                }
            }
        }
        if !is_acyclic(&directed) {
            return Err(Error::Integrity("directed part of CPDAG is cyclic".into()));
        }
        Ok(Self { directed, undirected })
    }

    pub fn n_nodes(&self) -> usize {
        self.directed.dim()
    }

    pub fn directed(&self) -> &BoolMatrix {
        &self.directed
    }

    pub fn undirected(&self) -> &BoolMatrix {
        &self.undirected
    }

    pub fn pair_status(&self, a: usize, b: usize) -> PairStatus {
        if self.undirected.get(a, b) {
            PairStatus::Undirected
        } else if self.directed.get(a, b) {
            PairStatus::Forward
        } else if self.directed.get(b, a) {
            PairStatus::Backward
        } else {
            PairStatus::Absent
        }
    }

    pub fn n_undirected(&self) -> usize {
        self.undirected.count() / 2
    }
}

/// Working partially directed graph used by the Meek closure.
#[derive(Clone)]
struct Pdag {
    dir: BoolMatrix,
    und: BoolMatrix,
}

impl Pdag {
    fn d(&self) -> usize {
        self.dir.dim()
    }

    fn adjacent(&self, a: usize, b: usize) -> bool {
        self.dir.get(a, b) || self.dir.get(b, a) || self.und.get(a, b)
    }

    fn orient(&mut self, a: usize, b: usize) {
        self.und.set(a, b, false);
        self.und.set(b, a, false);
        self.dir.set(a, b, true);
    }

    /// Applies Meek rules R1–R4 until no rule fires, scanning candidate edges
    /// `a -- b` in row-major order and restarting after every orientation.
    fn meek_closure(&mut self) {
        while let Some((a, b)) = self.find_meek_orientation() {
            self.orient(a, b);
        }
    }

    fn find_meek_orientation(&self) -> Option<(usize, usize)> {
        let d = self.d();
        for a in 0..d {
            for b in 0..d {
                if a != b && self.und.get(a, b) && self.meek_fires(a, b) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// Whether some rule orients the undirected edge `a -- b` as `a -> b`.
    fn meek_fires(&self, a: usize, b: usize) -> bool {
        let d = self.d();
        // R1: c -> a -- b, c and b nonadjacent.
        if (0..d).any(|c| self.dir.get(c, a) && c != b && !self.adjacent(c, b)) {
            return true;
        }
        // R2: a -> c -> b.
        if (0..d).any(|c| self.dir.get(a, c) && self.dir.get(c, b)) {
            return true;
        }
        // R3: a -- c1 -> b, a -- c2 -> b, c1 and c2 nonadjacent.
        let mids: Vec<usize> = (0..d).filter(|&c| self.und.get(a, c) && self.dir.get(c, b)).collect();
        for (x, &c1) in mids.iter().enumerate() {
            for &c2 in &mids[x + 1..] {
                if !self.adjacent(c1, c2) {
                    return true;
                }
            }
        }
        // R4: a -- c -> e -> b, c and b nonadjacent, a and e adjacent.
        for c in 0..d {
            if !self.und.get(a, c) || c == b || self.adjacent(c, b) {
                continue;
            }
            if (0..d).any(|e| self.dir.get(c, e) && self.dir.get(e, b) && self.adjacent(a, e)) {
                return true;
            }
        }
        false
    }

    fn has_v_structure_outside(&self, reference: &BoolMatrix) -> bool {
        let d = self.d();
        for c in 0..d {
            for a in 0..d {
                if !self.dir.get(a, c) {
                    continue;
                }
                for b in a + 1..d {
                    if self.dir.get(b, c) && !self.adjacent(a, b) && !(reference.get(a, c) && reference.get(b, c)) {
                        return true;
                    }
                }
            }
        }
        false
    }
}

/// CPDAG of the Markov equivalence class of `g`: v-structures directed, Meek
/// rules applied to closure, all other edges undirected.
pub fn dag_to_cpdag(g: &Dag) -> Cpdag {
    let d = g.n_nodes();
    let mut dir = BoolMatrix::new(d);
    for c in 0..d {
        let pa = g.parents(c);
        for (x, &a) in pa.iter().enumerate() {
            for &b in &pa[x + 1..] {
                if !g.adjacent(a, b) {
                    dir.set(a, c, true);
                    dir.set(b, c, true);
                }
            }
        }
    }
    let mut und = BoolMatrix::new(d);
    for (a, b) in g.edges() {
        if !dir.get(a, b) {
            und.set(a, b, true);
            und.set(b, a, true);
        }
    }
    let mut p = Pdag { dir, und };
    p.meek_closure();
    Cpdag { directed: p.dir, undirected: p.und }
}

/// All DAGs in the equivalence class represented by `c`, in a deterministic order.
///
/// Fails with [`Error::EnumerationOverflow`] once more than `cap` members are found.
pub fn enumerate_mec(c: &Cpdag, cap: usize) -> Result<Vec<Dag>> {
    if cap == 0 {
        return Err(Error::Config("MEC enumeration cap must be at least 1".into()));
    }
    let start = Pdag { dir: c.directed.clone(), und: c.undirected.clone() };
    let mut out = Vec::new();
    extend(start, c, cap, &mut out)?;
    Ok(out)
}

fn extend(p: Pdag, c: &Cpdag, cap: usize, out: &mut Vec<Dag>) -> Result<()> {
    let d = p.d();
    let next = (0..d).flat_map(|a| (a + 1..d).map(move |b| (a, b))).find(|&(a, b)| p.und.get(a, b));
    let Some((a, b)) = next else {
        let dag = Dag::from_adjacency_unchecked(p.dir);
        if dag_to_cpdag(&dag) == *c {
            if out.len() == cap {
                return Err(Error::EnumerationOverflow { cap });
            }
            out.push(dag);
        }
        return Ok(());
    };
    for (x, y) in [(a, b), (b, a)] {
        let mut q = p.clone();
        q.orient(x, y);
        q.meek_closure();
        if is_acyclic(&q.dir) && !q.has_v_structure_outside(&c.directed) {
            extend(q, c, cap, out)?;
        }
    }
    Ok(())
}
