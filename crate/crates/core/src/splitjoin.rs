//! Split-and-join: partition hierarchy to Steiner forest.
//!
//! A call on cluster `C` with portals `S_C` splits `C` by the highest level
//! of the projected hierarchy that still has more than one cluster, grows a
//! shortest-path forest in the quotient from the clusters holding portals,
//! and joins the child clusters with the witness edges of that forest. Every
//! internal non-root child also receives a highway: a shortest path inside
//! the child from the head of its favorite child's witness edge to the tail
//! of its own. The child clusters are then solved recursively with the
//! highway (or tail, or original portals) as their portal set.

use std::cmp::Reverse;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{quotient, Edge, WeightedGraph};
use crate::partition::{validate_hierarchy, Partition, PartitionHierarchy};
use crate::tree::SteinerForest;
use crate::weight::{ceil_log2, Fraction, Weight};

/// What happened to one child cluster during a split.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChildPlan {
    pub vertices: Vec<usize>,
    /// Parent in the quotient shortest-path forest; `None` for roots.
    pub parent: Option<usize>,
    pub distance: u128,
    pub hops: usize,
    pub rank: u32,
    pub fav: Option<usize>,
    /// Witness edge to the parent, as `(tail, head)`.
    pub witness: Option<(usize, usize)>,
    pub highway: Vec<usize>,
    pub portals: Vec<usize>,
}

/// One recursive call.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceNode {
    /// Lowest hierarchy level at which `cluster` is a whole cluster.
    pub level: usize,
    pub cluster: Vec<usize>,
    pub portals: Vec<usize>,
    pub children: Vec<ChildPlan>,
    /// Child ids in processing order.
    pub order: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitJoin<W> {
    pub forest: SteinerForest<W>,
    pub trace: Vec<TraceNode>,
}

/// Ranks and favorite children of a rooted forest given by `parent`,
/// visiting vertices in `order` (children before parents). Favorite ties go
/// to the smallest id.
pub fn compute_ranks(parent: &[Option<usize>], order: &[usize]) -> (Vec<u32>, Vec<Option<usize>>) {
    let m = parent.len();
    let mut children = vec![Vec::new(); m];
    for (c, p) in parent.iter().enumerate() {
        if let Some(p) = *p {
            children[p].push(c);
        }
    }
    let mut rank = vec![0u32; m];
    let mut fav = vec![None; m];
    for &c in order {
        let Some(maxc) = children[c].iter().map(|&x| rank[x]).max() else {
            continue;
        };
        let tied: Vec<usize> = children[c].iter().copied().filter(|&x| rank[x] == maxc).collect();
        fav[c] = tied.iter().copied().min();
        rank[c] = if tied.len() >= 2 { maxc + 1 } else { maxc };
    }
    (rank, fav)
}

/// Steiner forest of `g` with portal set `s` from a hierarchy given as its
/// level list (`levels[i]` must partition `V`).
pub fn build_forest<W: Weight>(g: &WeightedGraph<W>, s: &[usize], levels: &[Partition]) -> Result<SplitJoin<W>> {
    if s.is_empty() {
        return Err(Error::EmptyPortals);
    }
    for &v in s {
        g.check_vertex(v)?;
    }
    let mut portals = s.to_vec();
    portals.sort_unstable();
    portals.dedup();
    let mut edges = Vec::new();
    let mut trace = Vec::new();
    let all: Vec<usize> = (0..g.n()).collect();
    let levels: Vec<Partition> = levels.iter().map(|p| p.restrict(&all)).collect();
    split_join(g, all, portals.clone(), levels, &mut edges, &mut trace)?;
    let forest = SteinerForest::new(g.n(), edges, portals);
    forest.validate(g)?;
    Ok(SplitJoin { forest, trace })
}

/// Universal Steiner tree rooted at `h.root`.
pub fn build_ust<W: Weight>(g: &WeightedGraph<W>, h: &PartitionHierarchy) -> Result<SplitJoin<W>> {
    g.require_connected()?;
    let out = build_forest(g, &[h.root], &h.levels)?;
    if out.forest.edges.len() + 1 != g.n() {
        return Err(Error::NotSpanningTree(format!("{} edges on {} vertices", out.forest.edges.len(), g.n())));
    }
    Ok(out)
}

fn split_join<W: Weight>(
    g: &WeightedGraph<W>,
    members: Vec<usize>,
    portals: Vec<usize>,
    mut levels: Vec<Partition>,
    edges: &mut Vec<Edge<W>>,
    trace: &mut Vec<TraceNode>,
) -> Result<()> {
    if members.len() <= 1 {
        return Ok(());
    }
    while levels.last().is_some_and(|p| p.len() <= 1) {
        levels.pop();
    }
    let level = levels.len();
    let split = levels.pop().unwrap_or_else(|| Partition::singletons(members.iter().copied()));
    let q = quotient(g, &split);
    let m = split.len();
    let spf = q.shortest_path_forest(&split.clusters_met(&portals));
    if let Some(c) = (0..m).find(|&c| spf.dist[c].is_none()) {
        return Err(Error::DisconnectedCluster(split.cluster(c)[0]));
    }
    let mut hops = vec![0usize; m];
    for &c in &spf.order {
        if let Some(p) = spf.parent[c] {
            hops[c] = hops[p] + 1;
        }
    }
    let dist: Vec<u128> = spf.dist.iter().map(|d| d.expect("reachable").widen()).collect();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&c| (Reverse(dist[c]), Reverse(hops[c]), c));
    let (rank, fav) = compute_ranks(&spf.parent, &order);

    let mut plans = Vec::with_capacity(m);
    for c in 0..m {
        let cluster = split.cluster(c);
        let mut plan = ChildPlan {
            vertices: cluster.to_vec(),
            parent: spf.parent[c],
            distance: dist[c],
            hops: hops[c],
            rank: rank[c],
            fav: fav[c],
            witness: None,
            highway: Vec::new(),
            portals: Vec::new(),
        };
        match spf.parent[c] {
            None => {
                plan.portals = portals.iter().copied().filter(|&v| split.cluster_of(v) == Some(c)).collect();
            }
            Some(p) => {
                let e = q.edge(c, p).expect("forest edge is a quotient edge");
                let tail = e.endpoint_in(&split, c);
                plan.witness = Some((tail, e.witness.other(tail)));
                edges.push(e.witness);
                match fav[c] {
                    None => plan.portals = vec![tail],
                    Some(f) => {
                        let head = q.edge(f, c).expect("forest edge is a quotient edge").endpoint_in(&split, c);
                        let mask = g.mask(cluster);
                        let path = g
                            .shortest_path_within(head, tail, &mask)
                            .ok_or(Error::DisconnectedCluster(cluster[0]))?;
                        for pair in path.windows(2) {
                            let w = g.weight(pair[0], pair[1]).expect("path edge");
                            edges.push(Edge::new(pair[0], pair[1], w));
                        }
                        plan.portals = path.clone();
                        plan.portals.sort_unstable();
                        plan.highway = path;
                    }
                }
            }
        }
        plans.push(plan);
    }

    let child_calls: Vec<(Vec<usize>, Vec<usize>)> =
        plans.iter().map(|p| (p.vertices.clone(), p.portals.clone())).collect();
    trace.push(TraceNode {
        level,
        cluster: members,
        portals,
        children: plans,
        order,
    });
    for (vertices, child_portals) in child_calls {
        let child_levels = levels.iter().map(|p| p.restrict(&vertices)).collect();
        split_join(g, vertices, child_portals, child_levels, edges, trace)?;
    }
    Ok(())
}

/// Constant `C` of the stretch budget.
pub const STRETCH_CONSTANT: u128 = 16;

/// `C alpha^2 beta^2 gamma max(1, ceil(log_gamma n))`, or `None` when
/// `gamma < 2` leaves the logarithm undefined.
pub fn stretch_budget(alpha: u128, beta: usize, gamma: u64, n: usize) -> Option<u128> {
    if gamma < 2 {
        return None;
    }
    let mut log = 0u128;
    let mut power = 1u128;
    while power < n as u128 {
        power = power.saturating_mul(gamma as u128);
        log += 1;
    }
    let b = beta as u128;
    Some(
        STRETCH_CONSTANT
            .saturating_mul(alpha.saturating_mul(alpha))
            .saturating_mul(b * b)
            .saturating_mul(gamma as u128)
            .saturating_mul(log.max(1)),
    )
}

/// A bound check that failed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Breach {
    pub rule: &'static str,
    pub level: usize,
    /// Smallest vertex of the offending cluster.
    pub cluster: usize,
    /// `None` when the quantity is infinite.
    pub observed: Option<u128>,
    pub bound: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitJoinAudit {
    pub alpha: Option<u128>,
    pub beta: usize,
    pub gamma: u64,
    pub checks: usize,
    pub cover_skipped: bool,
    pub breaches: Vec<Breach>,
    pub warnings: Vec<String>,
    pub ok: bool,
}

/// Rechecks the structural guarantees of a split-and-join run against `h`:
///
/// * `portal_distance`: when `S_C` is not a subset of the input portals,
///   `d_F(u, v) <= d_{G[C]}(u, v)` for all `u, v` in `S_C`.
/// * `rank`: every rank is at most `ceil(log2 m)` for `m` children.
/// * `favorite_chain`: every root path of the quotient forest takes at most
///   `ceil(log2 m)` non-favorite steps.
/// * `portal_cover`: `d_F(v, S_C) <= 3 alpha^2 beta gamma^i` for `v` in a
///   level-`i` cluster `C` (only checked when `gamma >= 2 ceil(log2 n)`).
/// * `cluster_diameter`: `d_F(u, v) <= 7 alpha^2 beta gamma^i` for `u, v` in
///   a common level-`i` cluster (spanning trees only).
///
/// `alpha` and `beta` are the values realized by `h` on `g`.
pub fn audit<W: Weight>(g: &WeightedGraph<W>, h: &PartitionHierarchy, run: &SplitJoin<W>) -> SplitJoinAudit {
    let n = g.n();
    let report = validate_hierarchy(g, h);
    let alpha = report.realized_alpha;
    let beta = report.realized_beta.max(1);
    let mut breaches = Vec::new();
    let mut warnings = Vec::new();
    let mut checks = 0usize;
    let Ok(f) = run.forest.rooted() else {
        return SplitJoinAudit {
            alpha,
            beta,
            gamma: h.gamma,
            checks: 0,
            cover_skipped: true,
            breaches,
            warnings: vec!["output is not a forest".into()],
            ok: false,
        };
    };
    let apsp = f.all_pairs();
    let base: Vec<bool> = {
        let mut m = vec![false; n];
        for &s in &run.forest.portals {
            m[s] = true;
        }
        m
    };
    let cover_skipped = (h.gamma as u128) < 2 * ceil_log2(n as u128) as u128;
    if cover_skipped {
        warnings.push(format!("gamma = {} is below 2 ceil(log2 n); portal cover bound not checked", h.gamma));
    }
    let factor = |c: u128| alpha.map(|a| c.saturating_mul(a).saturating_mul(a).saturating_mul(beta as u128));

    for node in &run.trace {
        let m = node.children.len() as u128;
        let log_m = ceil_log2(m);
        let cluster = node.cluster[0];
        if node.portals.iter().any(|&v| !base[v]) {
            let mask = g.mask(&node.cluster);
            for (i, &u) in node.portals.iter().enumerate() {
                let spf = g.shortest_path_forest_within(&[u], &mask);
                for &v in &node.portals[i + 1..] {
                    checks += 1;
                    let inside = spf.dist[v].map(Weight::widen);
                    let tree = apsp[u][v];
                    if tree.is_none() || inside.is_some_and(|d| tree.unwrap() > d) {
                        breaches.push(Breach {
                            rule: "portal_distance",
                            level: node.level,
                            cluster,
                            observed: tree,
                            bound: inside.unwrap_or(u128::MAX),
                        });
                    }
                }
            }
        }
        for (idx, plan) in node.children.iter().enumerate() {
            checks += 2;
            if plan.rank > log_m {
                breaches.push(Breach {
                    rule: "rank",
                    level: node.level,
                    cluster: plan.vertices[0],
                    observed: Some(plan.rank as u128),
                    bound: log_m as u128,
                });
            }
            let mut steps = 0u32;
            let mut c = idx;
            while let Some(p) = node.children[c].parent {
                if node.children[p].fav != Some(c) {
                    steps += 1;
                }
                c = p;
            }
            if steps > log_m {
                breaches.push(Breach {
                    rule: "favorite_chain",
                    level: node.level,
                    cluster: plan.vertices[0],
                    observed: Some(steps as u128),
                    bound: log_m as u128,
                });
            }
        }
        if !cover_skipped {
            if let Some(bound) = factor(3).map(|b| b.saturating_mul(h.radius(node.level))) {
                let d = f.dist_from(&node.portals);
                for &v in &node.cluster {
                    checks += 1;
                    if d[v].is_none_or(|x| x > bound) {
                        breaches.push(Breach {
                            rule: "portal_cover",
                            level: node.level,
                            cluster,
                            observed: d[v],
                            bound,
                        });
                        break;
                    }
                }
            }
        }
    }

    match factor(7) {
        _ if f.components() > 1 => warnings.push("output has several trees; diameter bound not checked".into()),
        None => warnings.push("hierarchy has a disconnected cluster; diameter bound not checked".into()),
        Some(seven) => {
            for (i, p) in h.levels.iter().enumerate() {
                let bound = seven.saturating_mul(h.radius(i));
                for c in p.clusters() {
                    checks += 1;
                    let worst = tree_diameter(&apsp, c);
                    if worst.is_none_or(|x| x > bound) {
                        breaches.push(Breach {
                            rule: "cluster_diameter",
                            level: i,
                            cluster: c[0],
                            observed: worst,
                            bound,
                        });
                    }
                }
            }
        }
    }
    SplitJoinAudit {
        alpha,
        beta,
        gamma: h.gamma,
        checks,
        cover_skipped,
        ok: breaches.is_empty(),
        breaches,
        warnings,
    }
}

fn tree_diameter(apsp: &[Vec<Option<u128>>], cluster: &[usize]) -> Option<u128> {
    let mut worst = 0u128;
    for (i, &u) in cluster.iter().enumerate() {
        for &v in &cluster[i + 1..] {
            worst = worst.max(apsp[u][v]?);
        }
    }
    Some(worst)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelRespect {
    pub level: usize,
    /// Largest tree distance between two vertices of a common cluster.
    pub tree_diameter: u128,
    pub witness: Option<(usize, usize)>,
    pub radius: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MuRespect {
    pub alpha: u128,
    /// Smallest `mu` with `d_T(u, v) <= mu * alpha * gamma^i` for all `u, v`
    /// in a common level-`i` cluster.
    pub mu: Fraction,
    pub levels: Vec<LevelRespect>,
}

/// Exact `mu` for which tree `t` is `mu`-respecting of `h`, using the
/// realized `alpha` of `h`. Fails if `t` is not a spanning tree of `g` or a
/// cluster is disconnected.
pub fn mu_respect_check<W: Weight>(g: &WeightedGraph<W>, t: &SteinerForest<W>, h: &PartitionHierarchy) -> Result<MuRespect> {
    let f = t.validate(g)?;
    if f.components() != 1 {
        return Err(Error::NotSpanningTree(format!("{} components", f.components())));
    }
    let alpha = validate_hierarchy(g, h)
        .realized_alpha
        .ok_or_else(|| Error::InvalidPartition("hierarchy has a disconnected cluster".into()))?;
    let mut mu = Fraction::new(0, 1);
    let mut levels = Vec::new();
    for (i, p) in h.levels.iter().enumerate() {
        let mut worst = (0u128, None);
        for c in p.clusters() {
            for (a, &u) in c.iter().enumerate() {
                for &v in &c[a + 1..] {
                    let d = f.dist(u, v).expect("spanning tree");
                    if d > worst.0 {
                        worst = (d, Some((u, v)));
                    }
                }
            }
        }
        let radius = h.radius(i);
        mu = mu.max(Fraction::new(worst.0, alpha.saturating_mul(radius).max(1)));
        levels.push(LevelRespect {
            level: i,
            tree_diameter: worst.0,
            witness: worst.1,
            radius,
        });
    }
    Ok(MuRespect { alpha, mu, levels })
}

/// Baseline tree: inside every cluster `C` of every level, a shortest-path
/// tree of the quotient of `G[C]` by the child clusters, rooted at the
/// smallest child, contributes its witness edges.
pub fn build_ust_basic<W: Weight>(g: &WeightedGraph<W>, h: &PartitionHierarchy) -> Result<SteinerForest<W>> {
    g.require_connected()?;
    let n = g.n();
    let mut edges = Vec::new();
    for (i, p) in h.levels.iter().enumerate() {
        for c in p.clusters() {
            let children = if i == 0 {
                Partition::singletons(c.iter().copied())
            } else {
                h.levels[i - 1].restrict(c)
            };
            let q = quotient(g, &children);
            let spf = q.shortest_path_forest(&[0]);
            for x in 0..children.len() {
                match (spf.dist[x], spf.parent[x]) {
                    (None, _) => return Err(Error::DisconnectedCluster(c[0])),
                    (Some(_), Some(y)) => edges.push(q.edge(x, y).expect("forest edge").witness),
                    _ => {}
                }
            }
        }
    }
    let t = SteinerForest::new(n, edges, vec![h.root.min(n.saturating_sub(1))]);
    let f = t.validate(g)?;
    if f.components() != 1 {
        return Err(Error::NotSpanningTree(format!("{} components", f.components())));
    }
    Ok(t)
}

/// Clusters `(level, smallest vertex)` whose tree edges do not connect them.
pub fn subtree_connectivity_violations<W: Weight>(t: &SteinerForest<W>, h: &PartitionHierarchy) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, p) in h.levels.iter().enumerate() {
        let mut label = vec![usize::MAX; t.n];
        for (id, c) in p.clusters().iter().enumerate() {
            for &v in c {
                label[v] = id;
            }
        }
        let inner: Vec<(usize, usize, W)> = t
            .edges
            .iter()
            .filter(|e| label[e.u] == label[e.v] && label[e.u] != usize::MAX)
            .map(|e| (e.u, e.v, e.w))
            .collect();
        let sub = WeightedGraph::new(t.n, inner).expect("tree edges are simple");
        for c in p.clusters() {
            if sub.strong_diameter(c).finite().is_none() {
                out.push((i, c[0]));
            }
        }
    }
    out
}
