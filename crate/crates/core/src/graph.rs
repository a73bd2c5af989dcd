//! Simple undirected graphs in compressed sparse row form.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};

/// Sentinel returned by reindexing maps for nodes dropped from a subgraph.
pub const UNMAPPED: usize = usize::MAX;

/// How [`SparseGraph::from_edge_list`] treats self-loops and repeated edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgePolicy {
    /// Reject self-loops, duplicates and out-of-range indices.
    #[default]
    Strict,
    /// Drop self-loops and duplicates; grow `n` to fit out-of-range indices.
    Lenient,
}

/// Counts of what lenient construction discarded.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Cleanup {
    pub self_loops: usize,
    pub duplicates: usize,
}

/// Immutable simple undirected graph.
///
/// Neighbor lists are sorted, so `neighbors(i)` is deterministic and
/// `has_edge` is a binary search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseGraph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    m: usize,
}

impl SparseGraph {
    /// Builds a graph from undirected pairs.
    ///
    /// With `n = None` the node count is one past the largest index seen.
    pub fn from_edge_list(
        edges: &[(usize, usize)],
        n: Option<usize>,
        policy: EdgePolicy,
    ) -> Result<Self> {
        Self::from_edge_list_with_cleanup(edges, n, policy).map(|(g, _)| g)
    }

    pub fn from_edge_list_with_cleanup(
        edges: &[(usize, usize)],
        n: Option<usize>,
        policy: EdgePolicy,
    ) -> Result<(Self, Cleanup)> {
        let max_index = edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0);
        let n = match n {
            Some(n) if max_index > n => {
                if policy == EdgePolicy::Strict {
                    let bad = edges.iter().map(|&(a, b)| a.max(b)).find(|&x| x >= n);
                    return Err(Error::IndexOutOfRange { index: bad.unwrap_or(n), n });
                }
                max_index
            }
            Some(n) => n,
            None => max_index,
        };

        let mut cleanup = Cleanup::default();
        let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == b {
                if policy == EdgePolicy::Strict {
                    return Err(Error::SelfLoop(a));
                }
                cleanup.self_loops += 1;
                continue;
            }
            pairs.push((a.min(b), a.max(b)));
        }
        pairs.sort_unstable();
        let before = pairs.len();
        if policy == EdgePolicy::Strict {
            if let Some(w) = pairs.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::DuplicateEdge(w[0].0, w[0].1));
            }
        }
        pairs.dedup();
        cleanup.duplicates = before - pairs.len();

        Ok((Self::from_canonical_pairs(n, &pairs), cleanup))
    }

    /// `pairs` must be sorted, deduplicated, with `a < b < n`.
    pub(crate) fn from_canonical_pairs(n: usize, pairs: &[(usize, usize)]) -> Self {
        let mut degree = vec![0usize; n];
        for &(a, b) in pairs {
            degree[a] += 1;
            degree[b] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut targets = vec![0usize; 2 * pairs.len()];
        for &(a, b) in pairs {
            targets[cursor[a]] = b;
            cursor[a] += 1;
            targets[cursor[b]] = a;
            cursor[b] += 1;
        }
        for i in 0..n {
            targets[offsets[i]..offsets[i + 1]].sort_unstable();
        }
        Self { offsets, targets, m: pairs.len() }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n()).map(|i| self.degree(i)).collect()
    }

    pub fn degrees_f64(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.degree(i) as f64).collect()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n()).map(|i| self.degree(i)).max().unwrap_or(0)
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors(i).binary_search(&j).is_ok()
    }

    /// Canonical edge list: `(a, b)` with `a < b`, sorted.
    pub fn to_edge_list(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.m);
        for a in 0..self.n() {
            for &b in self.neighbors(a) {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// `out = A x`.
    pub fn adjacency_mul(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.neighbors(i).iter().map(|&j| x[j]).sum();
        }
    }

    /// Subgraph induced on `nodes`, which are renumbered in the given order.
    /// The returned map sends old ids to new ids, or [`UNMAPPED`].
    pub fn induced_subgraph(&self, nodes: &[usize]) -> (SparseGraph, Vec<usize>) {
        let mut map = vec![UNMAPPED; self.n()];
        for (new, &old) in nodes.iter().enumerate() {
            map[old] = new;
        }
        let mut pairs = Vec::new();
        for &old in nodes {
            let a = map[old];
            for &nb in self.neighbors(old) {
                let b = map[nb];
                if b != UNMAPPED && a < b {
                    pairs.push((a, b));
                }
            }
        }
        pairs.sort_unstable();
        (SparseGraph::from_canonical_pairs(nodes.len(), &pairs), map)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentLabeling {
    pub component_id: Vec<usize>,
    pub sizes: Vec<usize>,
    pub giant_index: usize,
}

impl ComponentLabeling {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }
}

/// BFS labeling. Components are numbered by their smallest node.
pub fn connected_components(g: &SparseGraph) -> ComponentLabeling {
    let n = g.n();
    let mut component_id = vec![UNMAPPED; n];
    let mut sizes = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if component_id[start] != UNMAPPED {
            continue;
        }
        let id = sizes.len();
        component_id[start] = id;
        queue.push_back(start);
        let mut size = 0;
        while let Some(u) = queue.pop_front() {
            size += 1;
            for &v in g.neighbors(u) {
                if component_id[v] == UNMAPPED {
                    component_id[v] = id;
                    queue.push_back(v);
                }
            }
        }
        sizes.push(size);
    }
    // max_by_key returns the last maximum; scan manually to keep the lowest id.
    let mut giant_index = 0;
    for (i, &s) in sizes.iter().enumerate() {
        if s > sizes[giant_index] {
            giant_index = i;
        }
    }
    ComponentLabeling { component_id, sizes, giant_index }
}

/// Induced subgraph on the giant component plus the old→new map
/// ([`UNMAPPED`] for dropped nodes).
pub fn largest_component(g: &SparseGraph) -> Result<(SparseGraph, Vec<usize>)> {
    if g.n() == 0 {
        return Err(Error::EmptyGraph);
    }
    let cc = connected_components(g);
    let nodes: Vec<usize> =
        (0..g.n()).filter(|&i| cc.component_id[i] == cc.giant_index).collect();
    Ok(g.induced_subgraph(&nodes))
}

/// The 2-core: repeatedly strip nodes of degree below two.
pub fn two_core(g: &SparseGraph) -> (SparseGraph, Vec<usize>) {
    let n = g.n();
    let mut degree = g.degrees();
    let mut removed = vec![false; n];
    let mut stack: Vec<usize> = (0..n).filter(|&i| degree[i] < 2).collect();
    while let Some(u) = stack.pop() {
        if removed[u] {
            continue;
        }
        removed[u] = true;
        for &v in g.neighbors(u) {
            if !removed[v] {
                degree[v] -= 1;
                if degree[v] == 1 {
                    stack.push(v);
                }
            }
        }
    }
    let nodes: Vec<usize> = (0..n).filter(|&i| !removed[i]).collect();
    g.induced_subgraph(&nodes)
}

/// Degree moments used as diagnostics for the mean degree `c` and `cΦ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GraphStats {
    pub c_hat: f64,
    pub phi_hat: f64,
    pub cphi_hat: f64,
}

pub fn graph_stats(g: &SparseGraph) -> Result<GraphStats> {
    if g.m() == 0 {
        return Err(Error::EdgelessGraph);
    }
    let n = g.n() as f64;
    let (sum, sum_sq) = (0..g.n()).fold((0.0, 0.0), |(s, s2), i| {
        let d = g.degree(i) as f64;
        (s + d, s2 + d * d)
    });
    let c_hat = sum / n;
    Ok(GraphStats {
        c_hat,
        phi_hat: sum_sq / (n * c_hat * c_hat),
        cphi_hat: sum_sq / sum - 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> SparseGraph {
        SparseGraph::from_edge_list(&[(0, 1), (1, 2), (2, 0)], None, EdgePolicy::Strict).unwrap()
    }

    #[test]
    fn triangle_degrees() {
        let g = triangle();
        assert_eq!(g.degrees(), vec![2, 2, 2]);
        assert_eq!(g.m(), 3);
        assert_eq!(g.to_edge_list(), vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn strict_rejects_self_loop_and_duplicates() {
        assert!(matches!(
            SparseGraph::from_edge_list(&[(0, 0)], None, EdgePolicy::Strict),
            Err(Error::SelfLoop(0))
        ));
        assert!(matches!(
            SparseGraph::from_edge_list(&[(0, 1), (1, 0)], None, EdgePolicy::Strict),
            Err(Error::DuplicateEdge(0, 1))
        ));
        assert!(matches!(
            SparseGraph::from_edge_list(&[(0, 5)], Some(3), EdgePolicy::Strict),
            Err(Error::IndexOutOfRange { index: 5, n: 3 })
        ));
    }

    #[test]
    fn lenient_cleans_up() {
        let (g, c) = SparseGraph::from_edge_list_with_cleanup(
            &[(0, 0), (0, 1), (1, 0), (1, 2)],
            Some(5),
            EdgePolicy::Lenient,
        )
        .unwrap();
        assert_eq!(c, Cleanup { self_loops: 1, duplicates: 1 });
        assert_eq!(g.n(), 5);
        assert_eq!(g.m(), 2);
        assert_eq!(g.degree(4), 0);
    }

    #[test]
    fn components_tie_break() {
        let g = SparseGraph::from_edge_list(
            &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)],
            None,
            EdgePolicy::Strict,
        )
        .unwrap();
        let cc = connected_components(&g);
        assert_eq!(cc.sizes, vec![3, 3]);
        assert_eq!(cc.giant_index, 0);
    }

    #[test]
    fn path_is_one_component() {
        let g = SparseGraph::from_edge_list(&[(0, 1), (1, 2), (2, 3)], None, EdgePolicy::Strict)
            .unwrap();
        let cc = connected_components(&g);
        assert_eq!(cc.sizes, vec![4]);
    }

    #[test]
    fn largest_component_drops_isolated() {
        let g = SparseGraph::from_edge_list(&[(0, 1), (1, 2), (2, 0)], Some(4), EdgePolicy::Strict)
            .unwrap();
        let (sub, map) = largest_component(&g).unwrap();
        assert_eq!(sub, triangle());
        assert_eq!(map, vec![0, 1, 2, UNMAPPED]);

        let (same, ident) = largest_component(&triangle()).unwrap();
        assert_eq!(same, triangle());
        assert_eq!(ident, vec![0, 1, 2]);
    }

    #[test]
    fn stats_regular_and_triangle() {
        let s = graph_stats(&triangle()).unwrap();
        assert_eq!(s.c_hat, 2.0);
        assert_eq!(s.cphi_hat, 1.0);
        // 4-cycle is 2-regular
        let g = SparseGraph::from_edge_list(&[(0, 1), (1, 2), (2, 3), (3, 0)], None, EdgePolicy::Strict)
            .unwrap();
        let s = graph_stats(&g).unwrap();
        assert_eq!(s.c_hat, 2.0);
        assert_eq!(s.cphi_hat, 1.0);
        let empty = SparseGraph::from_edge_list(&[], Some(3), EdgePolicy::Strict).unwrap();
        assert!(matches!(graph_stats(&empty), Err(Error::EdgelessGraph)));
    }

    #[test]
    fn two_core_strips_trees() {
        // triangle with a pendant path 2-3-4
        let g = SparseGraph::from_edge_list(
            &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)],
            None,
            EdgePolicy::Strict,
        )
        .unwrap();
        let (core, map) = two_core(&g);
        assert_eq!(core.n(), 3);
        assert_eq!(core.m(), 3);
        assert_eq!(map[3], UNMAPPED);
        let path = SparseGraph::from_edge_list(&[(0, 1), (1, 2)], None, EdgePolicy::Strict).unwrap();
        assert_eq!(two_core(&path).0.n(), 0);
    }
}
