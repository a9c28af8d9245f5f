//! Weighted undirected graphs with exact integer distances.
//!
//! Tie-breaking is global and deterministic: a vertex settled by Dijkstra
//! takes as parent the smallest-index neighbour that was settled before it
//! and lies on a shortest path. Witness edges of quotient graphs are the
//! minimum-weight crossing edges, ties broken by `(min endpoint, max endpoint)`.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::weight::Weight;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct Edge<W> {
    /// Smaller endpoint.
    pub u: usize,
    /// Larger endpoint.
    pub v: usize,
    pub w: W,
}

impl<W: Weight> Edge<W> {
    pub fn new(a: usize, b: usize, w: W) -> Self {
        Edge {
            u: a.min(b),
            v: a.max(b),
            w,
        }
    }

    pub fn key(&self) -> (usize, usize) {
        (self.u, self.v)
    }

    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Strong diameter of a vertex set: finite, or infinite when the induced
/// subgraph is disconnected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Diameter<W> {
    Finite(W),
    Infinite,
}

impl<W: Weight> Diameter<W> {
    pub fn finite(self) -> Option<W> {
        match self {
            Diameter::Finite(d) => Some(d),
            Diameter::Infinite => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph<W> {
    n: usize,
    adj: Vec<Vec<(usize, W)>>,
    edges: Vec<Edge<W>>,
}

impl<W: Weight> WeightedGraph<W> {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, W)>) -> Result<Self> {
        let mut map: BTreeMap<(usize, usize), W> = BTreeMap::new();
        for (a, b, w) in edges {
            for x in [a, b] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            let e = Edge::new(a, b, w);
            if map.insert(e.key(), w).is_some() {
                return Err(Error::ParallelEdge(e.u, e.v));
            }
        }
        let edges: Vec<Edge<W>> = map.into_iter().map(|((u, v), w)| Edge { u, v, w }).collect();
        let mut adj = vec![Vec::new(); n];
        for e in &edges {
            adj[e.u].push((e.v, e.w));
            adj[e.v].push((e.u, e.w));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(WeightedGraph { n, adj, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges sorted by `(u, v)` with `u < v`.
    pub fn edges(&self) -> &[Edge<W>] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, W)] {
        &self.adj[v]
    }

    pub fn adjacency(&self) -> &[Vec<(usize, W)>] {
        &self.adj
    }

    pub fn weight(&self, a: usize, b: usize) -> Option<W> {
        let list = self.adj.get(a)?;
        list.binary_search_by_key(&b, |&(x, _)| x)
            .ok()
            .map(|i| list[i].1)
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components_within(&vec![true; self.n]).len() == 1
    }

    /// Rejects disconnected inputs for top-level constructions.
    pub fn require_connected(&self) -> Result<()> {
        if self.is_connected() {
            Ok(())
        } else {
            Err(Error::Disconnected)
        }
    }

    /// Induced subgraph on `vertices`, relabelled `0..len` in ascending
    /// order of the original ids. Returns the graph and the local-to-global map.
    pub fn induced(&self, vertices: &[usize]) -> (WeightedGraph<W>, Vec<usize>) {
        let mut map: Vec<usize> = vertices.to_vec();
        map.sort_unstable();
        map.dedup();
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in map.iter().enumerate() {
            local[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| local[e.u] != usize::MAX && local[e.v] != usize::MAX)
            .map(|e| (local[e.u], local[e.v], e.w));
        let g = WeightedGraph::new(map.len(), edges).expect("induced subgraph is simple");
        (g, map)
    }

    pub fn mask(&self, vertices: &[usize]) -> Vec<bool> {
        let mut m = vec![false; self.n];
        for &v in vertices {
            m[v] = true;
        }
        m
    }

    pub fn shortest_path_forest(&self, sources: &[usize]) -> ShortestPathForest<W> {
        dijkstra(&self.adj, sources, None, None)
    }

    /// Shortest-path forest of the subgraph induced by `mask`.
    pub fn shortest_path_forest_within(&self, sources: &[usize], mask: &[bool]) -> ShortestPathForest<W> {
        dijkstra(&self.adj, sources, Some(mask), None)
    }

    pub fn dist(&self, u: usize, v: usize) -> Result<W> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Ok(W::zero());
        }
        self.shortest_path_forest(&[u]).dist[v].ok_or(Error::Unreachable(u, v))
    }

    /// Distance inside the subgraph induced by `mask`; `None` when unreachable.
    pub fn dist_within(&self, u: usize, v: usize, mask: &[bool]) -> Option<W> {
        if u == v {
            return mask[u].then(W::zero);
        }
        self.shortest_path_forest_within(&[u], mask).dist[v]
    }

    /// All vertices at distance at most `rho` from `v`, ascending.
    pub fn ball(&self, v: usize, rho: W) -> Vec<usize> {
        self.ball_within(v, rho, None)
    }

    pub fn ball_within(&self, v: usize, rho: W, mask: Option<&[bool]>) -> Vec<usize> {
        let f = dijkstra(&self.adj, &[v], mask, Some(rho));
        let mut out: Vec<usize> = f.order.clone();
        out.sort_unstable();
        out
    }

    pub fn strong_diameter(&self, cluster: &[usize]) -> Diameter<W> {
        let mask = self.mask(cluster);
        let mut best = W::zero();
        for &u in cluster {
            let f = self.shortest_path_forest_within(&[u], &mask);
            for &v in cluster {
                match f.dist[v] {
                    Some(d) => best = best.max(d),
                    None => return Diameter::Infinite,
                }
            }
        }
        Diameter::Finite(best)
    }

    /// Maximum `G`-distance between two members of `cluster`.
    pub fn weak_diameter(&self, cluster: &[usize]) -> Option<W> {
        let mut best = W::zero();
        for &u in cluster {
            let f = self.shortest_path_forest(&[u]);
            for &v in cluster {
                best = best.max(f.dist[v]?);
            }
        }
        Some(best)
    }

    /// Shortest path from `a` to `b` inside `mask`, as a vertex sequence
    /// starting at `a`.
    pub fn shortest_path_within(&self, a: usize, b: usize, mask: &[bool]) -> Option<Vec<usize>> {
        let f = self.shortest_path_forest_within(&[a], mask);
        f.path_to_root(b).map(|mut p| {
            p.reverse();
            p
        })
    }

    /// Weighted diameter of a connected graph.
    pub fn diameter(&self) -> Result<W> {
        self.require_connected()?;
        let mut best = W::zero();
        for v in 0..self.n {
            let f = self.shortest_path_forest(&[v]);
            for d in f.dist.iter().flatten() {
                best = best.max(*d);
            }
        }
        Ok(best)
    }

    pub fn all_pairs(&self) -> Vec<Vec<Option<W>>> {
        (0..self.n).map(|v| self.shortest_path_forest(&[v]).dist).collect()
    }

    /// Connected components of the subgraph induced by `mask`, each sorted,
    /// listed by smallest vertex.
    pub fn components_within(&self, mask: &[bool]) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if !mask[s] || seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                for &(y, _) in &self.adj[x] {
                    if mask[y] && !seen[y] {
                        seen[y] = true;
                        comp.push(y);
                        stack.push(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn total_weight(&self) -> u128 {
        self.edges.iter().map(|e| e.w.widen()).sum()
    }

    pub(crate) fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n })
        }
    }
}

/// Result of a multi-source Dijkstra run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShortestPathForest<W> {
    pub dist: Vec<Option<W>>,
    pub parent: Vec<Option<usize>>,
    /// Source whose tree contains the vertex.
    pub owner: Vec<Option<usize>>,
    /// Vertices in settle order.
    pub order: Vec<usize>,
}

impl<W: Weight> ShortestPathForest<W> {
    pub fn is_reachable(&self, v: usize) -> bool {
        self.dist[v].is_some()
    }

    pub fn unreachable(&self, mask: Option<&[bool]>) -> Vec<usize> {
        (0..self.dist.len())
            .filter(|&v| mask.is_none_or(|m| m[v]) && self.dist[v].is_none())
            .collect()
    }

    /// Vertex sequence from `v` up to its source, or `None` if unreachable.
    pub fn path_to_root(&self, v: usize) -> Option<Vec<usize>> {
        self.dist[v]?;
        let mut path = vec![v];
        let mut x = v;
        while let Some(p) = self.parent[x] {
            path.push(p);
            x = p;
        }
        Some(path)
    }
}

pub(crate) fn dijkstra<W: Weight>(
    adj: &[Vec<(usize, W)>],
    sources: &[usize],
    mask: Option<&[bool]>,
    limit: Option<W>,
) -> ShortestPathForest<W> {
    let n = adj.len();
    let inside = |v: usize| mask.is_none_or(|m| m[v]);
    let mut dist: Vec<Option<W>> = vec![None; n];
    let mut parent = vec![None; n];
    let mut owner = vec![None; n];
    let mut settled = vec![false; n];
    let mut order = Vec::new();
    let mut heap = BinaryHeap::new();
    for &s in sources {
        if inside(s) && dist[s].is_none() {
            dist[s] = Some(W::zero());
            heap.push(Reverse((W::zero(), s)));
        }
    }
    while let Some(Reverse((d, v))) = heap.pop() {
        if settled[v] || dist[v] != Some(d) {
            continue;
        }
        settled[v] = true;
        order.push(v);
        if d > W::zero() || !sources.contains(&v) {
            // smallest settled neighbour on a shortest path
            let p = adj[v]
                .iter()
                .filter(|&&(u, w)| settled[u] && u != v && dist[u].map(|du| du.saturating_add(w)) == Some(d))
                .map(|&(u, _)| u)
                .min();
            parent[v] = p;
            owner[v] = p.and_then(|p| owner[p]);
        }
        if parent[v].is_none() {
            owner[v] = Some(v);
        }
        for &(u, w) in &adj[v] {
            if !inside(u) || settled[u] {
                continue;
            }
            let nd = d.saturating_add(w);
            if limit.is_some_and(|l| nd > l) {
                continue;
            }
            if dist[u].is_none_or(|du| nd < du) {
                dist[u] = Some(nd);
                heap.push(Reverse((nd, u)));
            }
        }
    }
    // drop tentative labels that were never settled (radius-limited runs)
    for v in 0..n {
        if !settled[v] {
            dist[v] = None;
        }
    }
    ShortestPathForest {
        dist,
        parent,
        owner,
        order,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuotientEdge<W> {
    /// Smaller cluster id.
    pub a: usize,
    /// Larger cluster id.
    pub b: usize,
    pub w: W,
    /// Minimum-weight `G`-edge between the two clusters.
    pub witness: Edge<W>,
}

impl<W: Weight> QuotientEdge<W> {
    /// Witness endpoint lying in the partition cluster `c`.
    pub fn endpoint_in(&self, p: &Partition, c: usize) -> usize {
        if p.cluster_of(self.witness.u) == Some(c) {
            self.witness.u
        } else {
            self.witness.v
        }
    }
}

/// Graph on the clusters of a partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientGraph<W> {
    pub nodes: usize,
    pub edges: Vec<QuotientEdge<W>>,
    adj: Vec<Vec<(usize, W)>>,
    lookup: BTreeMap<(usize, usize), usize>,
}

impl<W: Weight> QuotientGraph<W> {
    pub fn adjacency(&self) -> &[Vec<(usize, W)>] {
        &self.adj
    }

    pub fn edge(&self, x: usize, y: usize) -> Option<&QuotientEdge<W>> {
        self.lookup.get(&(x.min(y), x.max(y))).map(|&i| &self.edges[i])
    }

    pub fn shortest_path_forest(&self, sources: &[usize]) -> ShortestPathForest<W> {
        dijkstra(&self.adj, sources, None, None)
    }
}

/// Quotient of `g` by `p`. Only edges with both endpoints in the ground set
/// of `p` are considered, so a partition of a cluster yields the quotient
/// of the induced subgraph.
pub fn quotient<W: Weight>(g: &WeightedGraph<W>, p: &Partition) -> QuotientGraph<W> {
    let mut best: BTreeMap<(usize, usize), Edge<W>> = BTreeMap::new();
    for e in g.edges() {
        let (Some(cu), Some(cv)) = (p.cluster_of(e.u), p.cluster_of(e.v)) else {
            continue;
        };
        if cu == cv {
            continue;
        }
        let key = (cu.min(cv), cu.max(cv));
        best.entry(key)
            .and_modify(|cur| {
                if (e.w, e.u, e.v) < (cur.w, cur.u, cur.v) {
                    *cur = *e;
                }
            })
            .or_insert(*e);
    }
    let mut adj = vec![Vec::new(); p.len()];
    let mut edges = Vec::with_capacity(best.len());
    let mut lookup = BTreeMap::new();
    for ((a, b), witness) in best {
        adj[a].push((b, witness.w));
        adj[b].push((a, witness.w));
        lookup.insert((a, b), edges.len());
        edges.push(QuotientEdge {
            a,
            b,
            w: witness.w,
            witness,
        });
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    QuotientGraph {
        nodes: p.len(),
        edges,
        adj,
        lookup,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> WeightedGraph<u64> {
        WeightedGraph::new(3, [(0, 1, 1), (1, 2, 1)]).unwrap()
    }

    fn cycle4(ws: [u64; 4]) -> WeightedGraph<u64> {
        WeightedGraph::new(4, [(0, 1, ws[0]), (1, 2, ws[1]), (2, 3, ws[2]), (3, 0, ws[3])]).unwrap()
    }

    fn cycle(n: usize) -> WeightedGraph<u64> {
        WeightedGraph::new(n, (0..n).map(|i| (i, (i + 1) % n, 1))).unwrap()
    }

    #[test]
    fn rejects_loops_and_parallel_edges() {
        assert_eq!(WeightedGraph::<u64>::new(2, [(1, 1, 1)]), Err(Error::SelfLoop(1)));
        assert_eq!(
            WeightedGraph::<u64>::new(2, [(0, 1, 1), (1, 0, 2)]),
            Err(Error::ParallelEdge(0, 1))
        );
        assert!(matches!(
            WeightedGraph::<u64>::new(2, [(0, 2, 1)]),
            Err(Error::VertexOutOfRange { vertex: 2, .. })
        ));
    }

    #[test]
    fn dist_examples() {
        assert_eq!(path3().dist(0, 2), Ok(2));
        assert_eq!(path3().dist(1, 1), Ok(0));
        // simple paths 0-3: direct (5) or 0-1-2-3 (3)
        assert_eq!(cycle4([1, 1, 1, 5]).dist(0, 3), Ok(3));
    }

    #[test]
    fn dist_unreachable_only_within_masks() {
        let g = cycle(6);
        let mask = g.mask(&[0, 3]);
        assert_eq!(g.dist_within(0, 3, &mask), None);
        let g2 = WeightedGraph::<u64>::new(3, [(0, 1, 1)]).unwrap();
        assert_eq!(g2.dist(0, 2), Err(Error::Unreachable(0, 2)));
    }

    #[test]
    fn ball_examples() {
        assert_eq!(path3().ball(1, 1), vec![0, 1, 2]);
        assert_eq!(path3().ball(2, 0), vec![2]);
        assert_eq!(cycle4([1, 1, 1, 5]).ball(0, 2), vec![0, 1, 2]);
    }

    #[test]
    fn strong_diameter_examples() {
        let g = cycle(6);
        assert_eq!(g.strong_diameter(&[4]), Diameter::Finite(0));
        assert_eq!(g.strong_diameter(&[0, 1, 2]), Diameter::Finite(2));
        assert_eq!(g.strong_diameter(&[0, 3]), Diameter::Infinite);
    }

    #[test]
    fn spf_examples() {
        let f = path3().shortest_path_forest(&[0]);
        assert_eq!(f.parent, vec![None, Some(0), Some(1)]);
        assert_eq!(f.dist, vec![Some(0), Some(1), Some(2)]);

        let f = path3().shortest_path_forest(&[0, 1, 2]);
        assert_eq!(f.parent, vec![None; 3]);
        assert_eq!(f.owner, vec![Some(0), Some(1), Some(2)]);
        assert!(f.dist.iter().all(|d| *d == Some(0)));

        // vertex 2 is at distance 2 through 1 or 3; the smaller index wins
        let f = cycle(4).shortest_path_forest(&[0]);
        assert_eq!(f.parent[2], Some(1));
        assert_eq!(f.owner[2], Some(0));
    }

    #[test]
    fn spf_flags_unreachable() {
        let g = WeightedGraph::<u64>::new(4, [(0, 1, 1), (2, 3, 1)]).unwrap();
        let f = g.shortest_path_forest(&[0]);
        assert_eq!(f.unreachable(None), vec![2, 3]);
    }

    #[test]
    fn zero_weight_edges_do_not_create_parent_cycles() {
        let g = WeightedGraph::<u64>::new(4, [(0, 1, 0), (1, 2, 0), (2, 3, 0), (0, 3, 0)]).unwrap();
        let f = g.shortest_path_forest(&[2]);
        for v in 0..4 {
            assert_eq!(f.path_to_root(v).unwrap().last(), Some(&2));
        }
    }

    #[test]
    fn quotient_examples() {
        let p = Partition::new(vec![vec![0, 1], vec![2]]).unwrap();
        let q = quotient(&path3(), &p);
        assert_eq!(q.edges.len(), 1);
        assert_eq!(q.edges[0].w, 1);
        assert_eq!(q.edges[0].witness.key(), (1, 2));

        let q = quotient(&path3(), &Partition::new(vec![vec![0, 1, 2]]).unwrap());
        assert!(q.edges.is_empty());

        let tri = WeightedGraph::<u64>::new(3, [(0, 1, 3), (1, 2, 1), (0, 2, 2)]).unwrap();
        let p = Partition::new(vec![vec![0], vec![1, 2]]).unwrap();
        let q = quotient(&tri, &p);
        assert_eq!(q.edges.len(), 1);
        assert_eq!(q.edges[0].w, 2);
        assert_eq!(q.edges[0].witness.key(), (0, 2));
        assert_eq!(q.edges[0].endpoint_in(&p, 1), 2);
    }

    #[test]
    fn induced_relabels_in_order() {
        let g = cycle(6);
        let (h, map) = g.induced(&[5, 0, 1]);
        assert_eq!(map, vec![0, 1, 5]);
        assert_eq!(h.edges().len(), 2);
        assert_eq!(h.weight(0, 2), Some(1));
    }
}
