//! Forests of graph edges and exact tree distances.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Edge, WeightedGraph};
use crate::weight::Weight;

/// Subset of graph edges forming a forest rooted at a portal set. A
/// universal Steiner tree is the case of a single portal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SteinerForest<W> {
    pub n: usize,
    /// Sorted by `(u, v)`.
    pub edges: Vec<Edge<W>>,
    pub portals: Vec<usize>,
}

impl<W: Weight> SteinerForest<W> {
    pub fn new(n: usize, mut edges: Vec<Edge<W>>, mut portals: Vec<usize>) -> Self {
        edges.sort_unstable_by_key(|e| e.key());
        edges.dedup_by_key(|e| e.key());
        portals.sort_unstable();
        portals.dedup();
        SteinerForest { n, edges, portals }
    }

    pub fn cost(&self) -> u128 {
        self.edges.iter().map(|e| e.w.widen()).sum()
    }

    /// Roots every component at its smallest portal (or smallest vertex when
    /// it holds none). Fails on cycles.
    pub fn rooted(&self) -> Result<RootedForest<W>> {
        RootedForest::new(self.n, &self.edges, &self.portals)
    }

    /// Checks that the edges exist in `g` with matching weights, form a
    /// forest, and that every component holds exactly one portal.
    pub fn validate(&self, g: &WeightedGraph<W>) -> Result<RootedForest<W>> {
        if self.n != g.n() {
            return Err(Error::NotSpanningTree(format!("forest on {} vertices, graph on {}", self.n, g.n())));
        }
        for e in &self.edges {
            if g.weight(e.u, e.v) != Some(e.w) {
                return Err(Error::NotSpanningTree(format!("edge ({}, {}) is not a graph edge", e.u, e.v)));
            }
        }
        let f = self.rooted()?;
        let mut count = vec![0usize; self.n];
        for &s in &self.portals {
            count[f.root[s]] += 1;
        }
        for (v, &c) in count.iter().enumerate() {
            if f.root[v] == v && c != 1 {
                return Err(Error::NotSpanningTree(format!("component of vertex {v} holds {c} portals")));
            }
        }
        Ok(f)
    }

    /// Tree edges as an adjacency-backed graph.
    pub fn to_graph(&self) -> WeightedGraph<W> {
        WeightedGraph::new(self.n, self.edges.iter().map(|e| (e.u, e.v, e.w))).expect("forest edges are simple")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedForest<W> {
    pub parent: Vec<Option<(usize, W)>>,
    /// Root of the component of each vertex.
    pub root: Vec<usize>,
    /// Weighted depth.
    pub depth: Vec<u128>,
    pub hops: Vec<usize>,
    adj: Vec<Vec<(usize, W)>>,
}

impl<W: Weight> RootedForest<W> {
    pub fn new(n: usize, edges: &[Edge<W>], preferred_roots: &[usize]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for e in edges {
            if e.u >= n || e.v >= n {
                return Err(Error::VertexOutOfRange { vertex: e.u.max(e.v), n });
            }
            adj[e.u].push((e.v, e.w));
            adj[e.v].push((e.u, e.w));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let mut parent = vec![None; n];
        let mut root = vec![usize::MAX; n];
        let mut depth = vec![0u128; n];
        let mut hops = vec![0usize; n];
        let mut seen_edges = 0usize;
        let mut starts: Vec<usize> = preferred_roots.iter().copied().filter(|&r| r < n).collect();
        starts.sort_unstable();
        starts.extend(0..n);
        for s in starts {
            if root[s] != usize::MAX {
                continue;
            }
            root[s] = s;
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                for &(y, w) in &adj[x] {
                    if parent[x].map(|(p, _)| p) == Some(y) {
                        continue;
                    }
                    if root[y] != usize::MAX {
                        return Err(Error::NotSpanningTree(format!("cycle through edge ({x}, {y})")));
                    }
                    root[y] = s;
                    parent[y] = Some((x, w));
                    depth[y] = depth[x] + w.widen();
                    hops[y] = hops[x] + 1;
                    seen_edges += 1;
                    stack.push(y);
                }
            }
        }
        debug_assert_eq!(seen_edges, edges.len());
        Ok(RootedForest {
            parent,
            root,
            depth,
            hops,
            adj,
        })
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn components(&self) -> usize {
        (0..self.n()).filter(|&v| self.root[v] == v).count()
    }

    pub fn lca(&self, mut u: usize, mut v: usize) -> Option<usize> {
        if self.root[u] != self.root[v] {
            return None;
        }
        while self.hops[u] > self.hops[v] {
            u = self.parent[u].expect("non-root").0;
        }
        while self.hops[v] > self.hops[u] {
            v = self.parent[v].expect("non-root").0;
        }
        while u != v {
            u = self.parent[u].expect("non-root").0;
            v = self.parent[v].expect("non-root").0;
        }
        Some(u)
    }

    /// Tree distance; `None` across components.
    pub fn dist(&self, u: usize, v: usize) -> Option<u128> {
        let a = self.lca(u, v)?;
        Some(self.depth[u] + self.depth[v] - 2 * self.depth[a])
    }

    /// Tree distances from `sources` to every vertex.
    pub fn dist_from(&self, sources: &[usize]) -> Vec<Option<u128>> {
        let n = self.n();
        let mut dist: Vec<Option<u128>> = vec![None; n];
        let mut heap = std::collections::BinaryHeap::new();
        for &s in sources {
            dist[s] = Some(0);
            heap.push(std::cmp::Reverse((0u128, s)));
        }
        while let Some(std::cmp::Reverse((d, x))) = heap.pop() {
            if dist[x] != Some(d) {
                continue;
            }
            for &(y, w) in &self.adj[x] {
                let nd = d + w.widen();
                if dist[y].is_none_or(|dy| nd < dy) {
                    dist[y] = Some(nd);
                    heap.push(std::cmp::Reverse((nd, y)));
                }
            }
        }
        dist
    }

    pub fn all_pairs(&self) -> Vec<Vec<Option<u128>>> {
        (0..self.n()).map(|v| self.dist_from(&[v])).collect()
    }

    /// Vertices from `v` up to its root, inclusive.
    pub fn path_to_root(&self, v: usize) -> Vec<usize> {
        let mut out = vec![v];
        let mut x = v;
        while let Some((p, _)) = self.parent[x] {
            out.push(p);
            x = p;
        }
        out
    }

    /// Cost of the union of root paths of `x`: the minimal subtree holding
    /// every vertex of `x` together with the roots of their components.
    pub fn projection_cost(&self, x: &[usize]) -> u128 {
        let mut used = vec![false; self.n()];
        let mut cost = 0u128;
        for &v in x {
            let mut y = v;
            while let Some((p, w)) = self.parent[y] {
                if used[y] {
                    break;
                }
                used[y] = true;
                cost += w.widen();
                y = p;
            }
        }
        cost
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(u: usize, v: usize, w: u64) -> Edge<u64> {
        Edge::new(u, v, w)
    }

    #[test]
    fn distances_on_a_path() {
        let f = RootedForest::new(4, &[e(0, 1, 1), e(1, 2, 2), e(2, 3, 3)], &[0]).unwrap();
        assert_eq!(f.dist(0, 3), Some(6));
        assert_eq!(f.dist(3, 1), Some(5));
        assert_eq!(f.lca(3, 1), Some(1));
        assert_eq!(f.dist_from(&[3])[0], Some(6));
    }

    #[test]
    fn detects_cycles() {
        assert!(RootedForest::new(3, &[e(0, 1, 1), e(1, 2, 1), e(0, 2, 1)], &[0]).is_err());
    }

    #[test]
    fn forest_components_are_separate() {
        let f = RootedForest::new(4, &[e(0, 1, 1), e(2, 3, 1)], &[0, 3]).unwrap();
        assert_eq!(f.components(), 2);
        assert_eq!(f.root, vec![0, 0, 3, 3]);
        assert_eq!(f.dist(0, 2), None);
    }

    #[test]
    fn projection_costs() {
        let star = RootedForest::new(4, &[e(0, 1, 1), e(0, 2, 1), e(0, 3, 1)], &[0]).unwrap();
        assert_eq!(star.projection_cost(&[0]), 0);
        assert_eq!(star.projection_cost(&[1, 2]), 2);
        let path = RootedForest::new(4, &[e(0, 1, 1), e(1, 2, 1), e(2, 3, 1)], &[0]).unwrap();
        assert_eq!(path.projection_cost(&[3]), 3);
        assert_eq!(path.projection_cost(&[3, 2, 1]), 3);
    }

    #[test]
    fn validate_requires_one_portal_per_tree() {
        let g = WeightedGraph::<u64>::new(3, [(0, 1, 1), (1, 2, 1)]).unwrap();
        let f = SteinerForest::new(3, vec![e(0, 1, 1)], vec![0]);
        assert!(f.validate(&g).is_err());
        let f = SteinerForest::new(3, vec![e(0, 1, 1), e(1, 2, 1)], vec![2]);
        assert!(f.validate(&g).is_ok());
        let f = SteinerForest::new(3, vec![e(0, 1, 5)], vec![0, 2]);
        assert!(f.validate(&g).is_err());
    }
}
