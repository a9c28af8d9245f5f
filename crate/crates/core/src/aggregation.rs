//! Cluster aggregation: assign every cluster of a partition to a portal.
//!
//! Each cluster `X` follows a shortest path `p_X` to the portal set. The
//! clusters met along `p_X` become labelled out-edges of `X` in an auxiliary
//! digraph; phases and iterations over that digraph decide which clusters
//! share a destination portal. The construction runs inside the subgraph
//! induced by the ground set of the partition.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{ShortestPathForest, WeightedGraph};
use crate::partition::Partition;
use crate::weight::{ceil_log2, Weight};

/// Labelled digraph on cluster ids. `out[x]` maps target to label; the
/// cluster itself holds position 1 and has no self-edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuxiliaryDigraph {
    pub out: Vec<BTreeMap<usize, usize>>,
    /// Vertex sequence of `p_X`, from its start in `X` to a portal.
    pub paths: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Iteration {
    pub phase: usize,
    pub start: usize,
    pub t_size: usize,
    pub in_size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AggregationResult {
    /// Destination portal per cluster id.
    pub dest: Vec<usize>,
    /// Union of the clusters sharing a destination.
    pub coarse: Partition,
    /// `detours[v]` for vertices of the ground set; `None` outside it or when
    /// `v` cannot reach its portal inside its coarse cluster.
    pub detours: Vec<Option<u128>>,
    /// `|V_0|, |V_1|, ...`, ending with the empty phase.
    pub phases: Vec<usize>,
    pub iterations: Vec<Iteration>,
    pub max_cluster_diameter: u128,
}

impl AggregationResult {
    pub fn max_detour(&self) -> Option<u128> {
        self.detours.iter().flatten().copied().max()
    }

    /// Portal whose coarse cluster holds `v`.
    pub fn portal_of(&self, p: &Partition, v: usize) -> Option<usize> {
        p.cluster_of(v).map(|c| self.dest[c])
    }
}

fn portal_forest<W: Weight>(g: &WeightedGraph<W>, p: &Partition, s: &[usize]) -> Result<(Vec<bool>, ShortestPathForest<W>)> {
    if s.is_empty() {
        return Err(Error::EmptyPortals);
    }
    let mask = p.mask(g.n());
    if let Some(&x) = s.iter().find(|&&x| x >= g.n() || !mask[x]) {
        return Err(Error::InvalidPartition(format!("portal {x} outside the ground set")));
    }
    let f = g.shortest_path_forest_within(s, &mask);
    Ok((mask, f))
}

pub fn auxiliary_digraph<W: Weight>(g: &WeightedGraph<W>, p: &Partition, s: &[usize]) -> Result<AuxiliaryDigraph> {
    let (_, f) = portal_forest(g, p, s)?;
    build_digraph(p, &f)
}

fn build_digraph<W: Weight>(p: &Partition, f: &ShortestPathForest<W>) -> Result<AuxiliaryDigraph> {
    let mut out = Vec::with_capacity(p.len());
    let mut paths = Vec::with_capacity(p.len());
    for (x, members) in p.clusters().iter().enumerate() {
        let start = members
            .iter()
            .filter_map(|&v| f.dist[v].map(|d| (d, v)))
            .min()
            .map(|(_, v)| v)
            .ok_or(Error::DisconnectedCluster(x))?;
        let path = f.path_to_root(start).expect("reachable start");
        let mut seen = BTreeSet::from([x]);
        let mut edges = BTreeMap::new();
        for &v in &path {
            let y = p.cluster_of(v).expect("path stays in the ground set");
            if seen.insert(y) {
                edges.insert(y, seen.len());
            }
        }
        out.push(edges);
        paths.push(path);
    }
    Ok(AuxiliaryDigraph { out, paths })
}

pub fn aggregate<W: Weight>(g: &WeightedGraph<W>, p: &Partition, s: &[usize]) -> Result<AggregationResult> {
    let mut s = s.to_vec();
    s.sort_unstable();
    s.dedup();
    let (_, f) = portal_forest(g, p, &s)?;
    let mut max_cluster_diameter = 0u128;
    for (c, members) in p.clusters().iter().enumerate() {
        match g.strong_diameter(members).finite() {
            Some(d) => max_cluster_diameter = max_cluster_diameter.max(d.widen()),
            None => return Err(Error::InvalidPartition(format!("cluster {c} is disconnected"))),
        }
    }
    let d = build_digraph(p, &f)?;
    let m = p.len();
    let mut dest: Vec<Option<usize>> = vec![None; m];
    let mut phases = vec![m];
    let mut iterations = Vec::new();
    let mut current: Vec<bool> = vec![true; m];
    let mut previous: Vec<bool> = vec![false; m];
    let mut phase = 0;
    while current.iter().any(|&b| b) {
        let mut out: Vec<BTreeMap<usize, usize>> = (0..m)
            .map(|x| {
                if current[x] {
                    d.out[x].iter().filter(|(y, _)| current[**y]).map(|(&y, &l)| (y, l)).collect()
                } else {
                    BTreeMap::new()
                }
            })
            .collect();
        let mut alive = current.clone();
        let mut next = vec![false; m];
        while let Some(v) = alive.iter().position(|&a| a) {
            let target = if phase == 0 {
                *d.paths[v].last().expect("nonempty path")
            } else {
                let (_, x) = d.out[v]
                    .iter()
                    .filter(|(y, _)| previous[**y] && !current[**y])
                    .map(|(&y, &l)| (l, y))
                    .min()
                    .expect("a deferred cluster points into the previous phase");
                dest[x].expect("assigned in the previous phase")
            };
            let mut in_t = vec![false; m];
            in_t[v] = true;
            for &y in out[v].keys() {
                in_t[y] = true;
            }
            let in_set = loop {
                for u in 0..m {
                    if !alive[u] || in_t[u] {
                        continue;
                    }
                    if let Some(first) = out[u].iter().filter(|(x, _)| in_t[**x]).map(|(_, &l)| l).min() {
                        out[u].retain(|_, l| *l <= first);
                    }
                }
                let grow = in_neighbours(&out, &alive, &in_t);
                let mut wider = in_t.clone();
                for &u in &grow {
                    wider[u] = true;
                }
                let mut next_t = wider.clone();
                for u in 0..m {
                    if wider[u] {
                        for &y in out[u].keys() {
                            next_t[y] = true;
                        }
                    }
                }
                in_t = next_t;
                let incoming = in_neighbours(&out, &alive, &in_t);
                let t_size = in_t.iter().filter(|&&b| b).count();
                if incoming.len() < t_size {
                    iterations.push(Iteration {
                        phase,
                        start: v,
                        t_size,
                        in_size: incoming.len(),
                    });
                    break incoming;
                }
            };
            for u in 0..m {
                if in_t[u] {
                    dest[u] = Some(target);
                    alive[u] = false;
                }
            }
            for u in in_set {
                next[u] = true;
                alive[u] = false;
            }
            for x in 0..m {
                if !alive[x] {
                    out[x].clear();
                } else {
                    out[x].retain(|y, _| alive[*y]);
                }
            }
        }
        previous = current;
        current = next;
        phases.push(current.iter().filter(|&&b| b).count());
        phase += 1;
    }
    let dest: Vec<usize> = dest.into_iter().map(|x| x.expect("every cluster assigned")).collect();

    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (c, &t) in dest.iter().enumerate() {
        groups.entry(t).or_default().extend_from_slice(p.cluster(c));
    }
    let mut detours = vec![None; g.n()];
    for (&portal, members) in &groups {
        let inner = g.mask(members);
        let h = g.shortest_path_forest_within(&[portal], &inner);
        for &v in members {
            detours[v] = h.dist[v].map(|dv| dv.widen() - f.dist[v].expect("ground set is reachable").widen());
        }
    }
    let coarse = Partition::new(groups.into_values().collect()).expect("clusters are disjoint");
    Ok(AggregationResult {
        dest,
        coarse,
        detours,
        phases,
        iterations,
        max_cluster_diameter,
    })
}

/// Alive clusters outside `t` with an edge into `t`.
fn in_neighbours(out: &[BTreeMap<usize, usize>], alive: &[bool], t: &[bool]) -> Vec<usize> {
    (0..out.len())
        .filter(|&u| alive[u] && !t[u] && out[u].keys().any(|&y| t[y]))
        .collect()
}

/// `|V_0|, |V_1|, ...` of the phases of [`aggregate`].
pub fn phases_trace<W: Weight>(g: &WeightedGraph<W>, p: &Partition, s: &[usize]) -> Result<Vec<usize>> {
    aggregate(g, p, s).map(|r| r.phases)
}

/// Detour of `v`, recomputed from scratch: distance from `v` to its
/// destination inside its coarse cluster minus its distance to `s` in the
/// subgraph induced by the ground set.
pub fn detour_of<W: Weight>(g: &WeightedGraph<W>, p: &Partition, s: &[usize], result: &AggregationResult, v: usize) -> Option<u128> {
    let c = p.cluster_of(v)?;
    let target = result.dest[c];
    let members: Vec<usize> = (0..p.len())
        .filter(|&x| result.dest[x] == target)
        .flat_map(|x| p.cluster(x).iter().copied())
        .collect();
    let within = g.dist_within(v, target, &g.mask(&members))?;
    let ground = p.mask(g.n());
    let to_s = s.iter().filter_map(|&x| g.dist_within(v, x, &ground)).min()?;
    Some(within.widen() - to_s.widen())
}

/// `2 * ceil(log2 m)^2 * max_diameter`.
pub fn detour_bound(m: usize, max_diameter: u128) -> u128 {
    let l = ceil_log2(m as u128) as u128;
    2 * l * l * max_diameter
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AggregationAudit {
    pub clusters: usize,
    pub max_cluster_diameter: u128,
    pub bound: u128,
    /// `ceil(log2 m)^2 * max_diameter`, reported but not enforced.
    pub tight_bound: u128,
    /// Vertices whose detour exceeds `tight_bound`.
    pub over_tight_bound: usize,
    pub max_detour: Option<u128>,
    pub over_bound: Vec<usize>,
    /// Coarse clusters that are disconnected or miss their portal.
    pub broken_components: Vec<usize>,
    pub halving: bool,
    pub phase_count: bool,
    pub stopping_rule: bool,
    pub ok: bool,
}

pub fn audit<W: Weight>(g: &WeightedGraph<W>, p: &Partition, result: &AggregationResult) -> AggregationAudit {
    let m = p.len();
    let bound = detour_bound(m, result.max_cluster_diameter);
    let ground = p.ground();
    let over_bound: Vec<usize> = ground
        .iter()
        .copied()
        .filter(|&v| result.detours[v].is_none_or(|x| x > bound))
        .collect();
    let tight_bound = bound / 2;
    let over_tight_bound = ground
        .iter()
        .filter(|&&v| result.detours[v].is_none_or(|x| x > tight_bound))
        .count();
    let mut broken_components = Vec::new();
    for (c, members) in result.coarse.clusters().iter().enumerate() {
        let portal = result.portal_of(p, members[0]).expect("member of the ground set");
        let connected = g.strong_diameter(members).finite().is_some();
        if !connected || members.binary_search(&portal).is_err() {
            broken_components.push(c);
        }
    }
    let halving = result.phases.windows(2).all(|w| w[1] <= w[0] / 2);
    let phase_count = result.phases.len() - 1 <= ceil_log2(m as u128) as usize + 1;
    let stopping_rule = result.iterations.iter().all(|it| it.in_size < it.t_size);
    AggregationAudit {
        clusters: m,
        max_cluster_diameter: result.max_cluster_diameter,
        bound,
        tight_bound,
        over_tight_bound,
        max_detour: result.max_detour(),
        ok: over_bound.is_empty() && broken_components.is_empty() && halving && phase_count && stopping_rule,
        over_bound,
        broken_components,
        halving,
        phase_count,
        stopping_rule,
    }
}
