//! Small directed graphs, Johnson's elementary-circuit enumeration and the
//! two-disjoint-cycles test.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::semiring::Semiring;

/// Largest graph the cycle routines accept; node sets are `u64` masks.
pub const NODE_CAP: usize = 64;
/// Default limit on the number of enumerated cycles.
pub const CYCLE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    succ: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn new(n: usize) -> Self {
        Digraph { succ: vec![Vec::new(); n] }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Digraph::new(n);
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    /// The graph with an edge `i -> j` wherever `m[i][j]` is nonzero.
    pub fn support<S: Semiring>(m: &Matrix<S>) -> Self {
        let n = m.rows();
        Digraph::from_edges(
            n,
            (0..n).flat_map(|i| (0..m.cols()).map(move |j| (i, j))).filter(|&(i, j)| !m.get(i, j).is_zero()),
        )
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.len() && v < self.len(), "edge ({u}, {v}) out of range");
        if let Err(pos) = self.succ[u].binary_search(&v) {
            self.succ[u].insert(pos, v);
        }
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn successors(&self, u: usize) -> &[usize] {
        &self.succ[u]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.succ[u].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }
}

/// Bit mask of the nodes on a cycle.
pub fn node_mask(cycle: &[usize]) -> u64 {
    cycle.iter().fold(0, |m, &v| m | 1 << v)
}

fn check_nodes(g: &Digraph) -> Result<()> {
    if g.len() > NODE_CAP {
        return Err(Error::Resource(format!(
            "graph has {} nodes; cycle enumeration supports at most {NODE_CAP}",
            g.len()
        )));
    }
    Ok(())
}

/// Strongly connected component of `s` in the subgraph induced by `allowed`.
fn component_of(g: &Digraph, s: usize, allowed: u64) -> u64 {
    let reach = |forward: bool| {
        let mut seen = 1u64 << s;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for v in 0..g.len() {
                let edge = if forward { g.has_edge(u, v) } else { g.has_edge(v, u) };
                if edge && allowed >> v & 1 == 1 && seen >> v & 1 == 0 {
                    seen |= 1 << v;
                    stack.push(v);
                }
            }
        }
        seen
    };
    reach(true) & reach(false)
}

struct Johnson<'a> {
    g: &'a Digraph,
    start: usize,
    scc: u64,
    blocked: u64,
    block_map: Vec<u64>,
    stack: Vec<usize>,
    out: Vec<Vec<usize>>,
    cap: usize,
}

impl Johnson<'_> {
    fn unblock(&mut self, u: usize) {
        self.blocked &= !(1 << u);
        let waiting = std::mem::take(&mut self.block_map[u]);
        let mut rest = waiting;
        while rest != 0 {
            let w = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if self.blocked >> w & 1 == 1 {
                self.unblock(w);
            }
        }
    }

    fn circuit(&mut self, v: usize) -> Result<bool> {
        let mut found = false;
        self.stack.push(v);
        self.blocked |= 1 << v;
        for &w in self.g.successors(v) {
            if self.scc >> w & 1 == 0 {
                continue;
            }
            if w == self.start {
                if self.out.len() >= self.cap {
                    return Err(Error::Resource(format!("more than {} simple cycles", self.cap)));
                }
                self.out.push(self.stack.clone());
                found = true;
            } else if self.blocked >> w & 1 == 0 && self.circuit(w)? {
                found = true;
            }
        }
        if found {
            self.unblock(v);
        } else {
            for &w in self.g.successors(v) {
                if self.scc >> w & 1 == 1 {
                    self.block_map[w] |= 1 << v;
                }
            }
        }
        self.stack.pop();
        Ok(found)
    }
}

/// Every elementary cycle exactly once, each listed from its smallest node.
pub fn simple_cycles(g: &Digraph) -> Result<Vec<Vec<usize>>> {
    simple_cycles_capped(g, CYCLE_CAP)
}

pub fn simple_cycles_capped(g: &Digraph, cap: usize) -> Result<Vec<Vec<usize>>> {
    check_nodes(g)?;
    let n = g.len();
    let mut j = Johnson {
        g,
        start: 0,
        scc: 0,
        blocked: 0,
        block_map: vec![0; n],
        stack: Vec::new(),
        out: Vec::new(),
        cap,
    };
    for s in 0..n {
        let allowed = (!0u64 << s) & full_mask(n);
        j.start = s;
        j.scc = component_of(g, s, allowed);
        j.blocked = 0;
        j.block_map.iter_mut().for_each(|b| *b = 0);
        j.circuit(s)?;
    }
    Ok(j.out)
}

fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        !0
    } else {
        (1u64 << n) - 1
    }
}

/// Whether some two simple cycles share no node.
pub fn has_two_node_disjoint_cycles(g: &Digraph) -> Result<bool> {
    let masks: Vec<u64> = simple_cycles(g)?.iter().map(|c| node_mask(c)).collect();
    Ok(cycle_masks_have_disjoint_pair(&masks))
}

pub(crate) fn cycle_masks_have_disjoint_pair(masks: &[u64]) -> bool {
    masks
        .iter()
        .enumerate()
        .any(|(i, a)| masks[i + 1..].iter().any(|b| a & b == 0))
}

/// A `k`-node graph with `2^(k-1)` simple cycles, all through node 0:
/// node 0 has a self-loop and edges to and from every other node, and
/// every node `j > 0` has an edge to each `i` with `0 < i < j`.
pub fn make_thomassen_graph(k: usize) -> Digraph {
    assert!(k >= 1, "graph needs at least one node");
    let mut g = Digraph::new(k);
    g.add_edge(0, 0);
    for j in 1..k {
        g.add_edge(0, j);
        g.add_edge(j, 0);
        for i in 1..j {
            g.add_edge(j, i);
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    /// Brute force: every node sequence without repeats that closes up,
    /// rotated to start at its minimum.
    fn brute_cycles(g: &Digraph) -> BTreeSet<Vec<usize>> {
        fn extend(g: &Digraph, path: &mut Vec<usize>, out: &mut BTreeSet<Vec<usize>>) {
            let last = *path.last().unwrap();
            for &v in g.successors(last) {
                if v == path[0] {
                    out.insert(path.clone());
                } else if v > path[0] && !path.contains(&v) {
                    path.push(v);
                    extend(g, path, out);
                    path.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        for s in 0..g.len() {
            extend(g, &mut vec![s], &mut out);
        }
        out
    }

    #[test]
    fn basic_counts() {
        assert_eq!(simple_cycles(&Digraph::from_edges(1, [(0, 0)])).unwrap(), vec![vec![0]]);
        let k3 = Digraph::from_edges(3, [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)]);
        let cycles = simple_cycles(&k3).unwrap();
        assert_eq!(cycles.len(), 5);
        assert_eq!(cycles.iter().filter(|c| c.len() == 2).count(), 3);
        assert!(simple_cycles(&Digraph::from_edges(3, [(0, 1), (1, 2)])).unwrap().is_empty());
    }

    #[test]
    fn thomassen_family() {
        for k in 1..=10 {
            let g = make_thomassen_graph(k);
            assert_eq!(simple_cycles(&g).unwrap().len(), 1 << (k - 1), "k = {k}");
            assert!(!has_two_node_disjoint_cycles(&g).unwrap());
        }
        assert_eq!(make_thomassen_graph(1), Digraph::from_edges(1, [(0, 0)]));
    }

    #[test]
    fn disjoint_cycles() {
        assert!(has_two_node_disjoint_cycles(&Digraph::from_edges(2, [(0, 0), (1, 1)])).unwrap());
        let through_hub = Digraph::from_edges(3, [(1, 1), (0, 1), (1, 0), (1, 2), (2, 1)]);
        assert!(!has_two_node_disjoint_cycles(&through_hub).unwrap());
    }

    #[test]
    fn caps() {
        let g = make_thomassen_graph(12);
        assert!(matches!(simple_cycles_capped(&g, 100), Err(Error::Resource(_))));
        assert!(matches!(simple_cycles(&Digraph::new(65)), Err(Error::Resource(_))));
    }

    proptest! {
        #[test]
        fn matches_brute_force(n in 1usize..7, bits in proptest::collection::vec(any::<bool>(), 49)) {
            let g = Digraph::from_edges(n, (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| bits[i * 7 + j]));
            let got: Vec<Vec<usize>> = simple_cycles(&g).unwrap();
            let set: BTreeSet<Vec<usize>> = got.iter().cloned().collect();
            prop_assert_eq!(set.len(), got.len());
            prop_assert_eq!(set, brute_cycles(&g));
        }
    }
}
