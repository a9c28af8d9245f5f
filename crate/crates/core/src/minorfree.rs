//! Hierarchies for graphs with small path separators.
//!
//! A level is built from the previous one by recursive separation: inside a
//! connected vertex set `Phi` the oracle returns groups of shortest paths.
//! For each path `p` the unclustered previous-level clusters near `p` are
//! aggregated around leaders of `p` and around boundary vertices, the
//! results are committed to the new partition `N`, and the recursion
//! continues on the components left after removing the separator.

use serde::Serialize;

use crate::aggregation::aggregate;
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::partition::{pad_root, Partition, PartitionHierarchy};
use crate::separator::{validate_separator, SeparatorOracle};
use crate::weight::{ceil_log2, pow_sat, Weight};

/// Record of one processed separator path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathRecord {
    /// Index of the path over the whole level build.
    pub id: usize,
    pub group: usize,
    pub path: Vec<usize>,
    /// Clusters of the previous level selected as `A`.
    pub a_clusters: usize,
    pub b_clusters: usize,
    pub leaders: Vec<usize>,
    /// Spacing, distinctness or maximality problems found by an independent
    /// rescan of the leaders.
    pub leader_issues: Vec<String>,
    pub boundary: Vec<usize>,
    /// Largest distance in `Psi'` from an `A`-cluster to the portals; `None`
    /// when some cluster cannot reach any portal.
    pub proximity: Option<u128>,
    pub proximity_bound: u128,
    /// Clusters of `K_p \ I_p` that found no adjacent `N`-cluster.
    pub unmerged: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinorFreeLevel {
    pub partition: Partition,
    pub radius: u128,
    pub paths: Vec<PathRecord>,
    /// Components on which the oracle was invoked.
    pub separations: usize,
    /// Previous-level clusters never reached by any path and kept as they were.
    pub leftover: usize,
}

#[derive(Default)]
struct State {
    /// `N`-cluster id per vertex.
    label: Vec<Option<usize>>,
    clusters: Vec<Vec<usize>>,
    paths: Vec<PathRecord>,
    separations: usize,
}

impl State {
    fn insert(&mut self, members: &[usize]) -> usize {
        let id = self.clusters.len();
        for &v in members {
            self.label[v] = Some(id);
        }
        self.clusters.push(members.to_vec());
        id
    }

    fn merge_into(&mut self, members: &[usize], id: usize) {
        for &v in members {
            self.label[v] = Some(id);
        }
        self.clusters[id].extend_from_slice(members);
    }
}

/// Coarsens `prev` into a level with target radius `radius` (`gamma^i`).
pub fn build_level_minorfree<W: Weight, O: SeparatorOracle<W> + ?Sized>(
    g: &WeightedGraph<W>,
    prev: &Partition,
    radius: u128,
    oracle: &O,
) -> Result<MinorFreeLevel> {
    let n = g.n();
    if !prev.covers(n) {
        return Err(Error::InvalidPartition("previous level does not cover the graph".into()));
    }
    for c in prev.clusters() {
        if g.strong_diameter(c).finite().is_none() {
            return Err(Error::InvalidPartition(format!("cluster of vertex {} is disconnected", c[0])));
        }
    }
    let mut st = State {
        label: vec![None; n],
        ..State::default()
    };
    if prev.len() == 1 {
        st.insert(prev.cluster(0));
    } else {
        for comp in g.components_within(&vec![true; n]) {
            separate(g, prev, radius, oracle, &comp, &mut st)?;
        }
    }
    let mut leftover = 0;
    for c in prev.clusters() {
        if st.label[c[0]].is_none() {
            leftover += 1;
            st.insert(c);
        }
    }
    let partition = Partition::covering(n, st.clusters.into_iter().filter(|c| !c.is_empty()).collect())?;
    Ok(MinorFreeLevel {
        partition,
        radius,
        paths: st.paths,
        separations: st.separations,
        leftover,
    })
}

fn separate<W: Weight, O: SeparatorOracle<W> + ?Sized>(
    g: &WeightedGraph<W>,
    prev: &Partition,
    radius: u128,
    oracle: &O,
    phi: &[usize],
    st: &mut State,
) -> Result<()> {
    if phi.is_empty() {
        return Ok(());
    }
    let n = g.n();
    let sep = oracle.separate(g, phi)?;
    let report = validate_separator(g, phi, &sep, Some(oracle.k()));
    if !report.ok {
        return Err(Error::OracleFailure(report.problems.join("; ")));
    }
    st.separations += 1;
    let near = W::narrow_saturating(radius.saturating_mul(2));
    let mut removed = vec![false; n];
    for (gi, group) in sep.groups.iter().enumerate() {
        for path in group {
            // Psi: component of Phi minus earlier groups holding p
            let mut mask = vec![false; n];
            for &v in phi {
                mask[v] = !removed[v];
            }
            let psi_list = component_of(g, &mask, path[0]);
            let psi = g.mask(&psi_list);
            let integral: Vec<bool> = prev.clusters().iter().map(|c| c.iter().all(|&v| psi[v])).collect();
            let reach = crate::graph::dijkstra(g.adjacency(), path, Some(&psi), Some(near));
            let a: Vec<usize> = (0..prev.len())
                .filter(|&c| {
                    let members = prev.cluster(c);
                    integral[c]
                        && members.iter().all(|&v| st.label[v].is_none())
                        && members.iter().any(|&v| reach.dist[v].is_some())
                })
                .collect();
            let mut in_a = vec![false; n];
            for &c in &a {
                for &v in prev.cluster(c) {
                    in_a[v] = true;
                }
            }
            let outside = |v: usize| st.label[v].is_some() || prev.cluster_of(v).is_some_and(|c| !integral[c]);
            let b: Vec<usize> = a
                .iter()
                .copied()
                .filter(|&c| {
                    prev.cluster(c)
                        .iter()
                        .any(|&u| g.neighbors(u).iter().any(|&(v, _)| psi[v] && outside(v)))
                })
                .collect();
            let leaders = choose_leaders(g, prev, path, &in_a, radius);
            let boundary: Vec<usize> = b.iter().map(|&c| prev.cluster(c)[0]).collect();
            let mut portals: Vec<usize> = leaders.iter().chain(&boundary).copied().collect();
            portals.sort_unstable();
            portals.dedup();

            let mut record = PathRecord {
                id: st.paths.len(),
                group: gi,
                path: path.clone(),
                a_clusters: a.len(),
                b_clusters: b.len(),
                leader_issues: leader_problems(g, prev, path, &in_a, &leaders, radius),
                leaders: leaders.clone(),
                boundary,
                proximity: Some(0),
                proximity_bound: radius.saturating_mul(3),
                unmerged: 0,
            };
            if !a.is_empty() {
                let prox = crate::graph::dijkstra(g.adjacency(), &portals, Some(&in_a), None);
                record.proximity = a
                    .iter()
                    .map(|&c| prev.cluster(c).iter().filter_map(|&v| prox.dist[v]).min().map(Weight::widen))
                    .try_fold(0u128, |acc, d| d.map(|d| acc.max(d)));
            }

            let mut is_leader = vec![false; n];
            for &l in &leaders {
                is_leader[l] = true;
            }
            let mut results: Vec<Vec<usize>> = Vec::new();
            for comp in g.components_within(&in_a) {
                let cp: Vec<usize> = portals.iter().copied().filter(|&v| comp.binary_search(&v).is_ok()).collect();
                if cp.is_empty() {
                    continue;
                }
                let local = prev.restrict(&comp);
                let agg = aggregate(g, &local, &cp)?;
                results.extend(agg.coarse.into_clusters());
            }
            let mut committed: Vec<Vec<usize>> = Vec::new();
            for x in results {
                if x.iter().any(|&v| is_leader[v]) {
                    committed.push(x);
                    continue;
                }
                let target = x
                    .iter()
                    .flat_map(|&u| g.neighbors(u).iter().map(|&(v, _)| v))
                    .filter(|&v| psi[v] && !in_a[v])
                    .filter_map(|v| st.label[v])
                    .min();
                match target {
                    Some(y) => st.merge_into(&x, y),
                    None => {
                        record.unmerged += 1;
                        st.insert(&x);
                    }
                }
            }
            for x in committed {
                st.insert(&x);
            }
            st.paths.push(record);
        }
        for &v in group.iter().flatten() {
            removed[v] = true;
        }
    }
    let mut rest = vec![false; n];
    for &v in phi {
        rest[v] = !removed[v];
    }
    for comp in g.components_within(&rest) {
        separate(g, prev, radius, oracle, &comp, st)?;
    }
    Ok(())
}

fn component_of<W: Weight>(g: &WeightedGraph<W>, mask: &[bool], v: usize) -> Vec<usize> {
    let mut out = crate::graph::dijkstra(g.adjacency(), &[v], Some(mask), None).order;
    out.sort_unstable();
    out
}

/// Prefix lengths along `path`.
fn path_offsets<W: Weight>(g: &WeightedGraph<W>, path: &[usize]) -> Vec<u128> {
    let mut out = vec![0u128; path.len()];
    for i in 1..path.len() {
        out[i] = out[i - 1] + g.weight(path[i - 1], path[i]).expect("path edge").widen();
    }
    out
}

/// Greedy scan along `path`: a vertex of an `A`-cluster becomes a leader
/// when it is at path distance at least `radius` from every leader so far
/// and its cluster has no leader yet.
fn choose_leaders<W: Weight>(g: &WeightedGraph<W>, prev: &Partition, path: &[usize], in_a: &[bool], radius: u128) -> Vec<usize> {
    let off = path_offsets(g, path);
    let mut chosen: Vec<usize> = Vec::new();
    let mut used_clusters: Vec<usize> = Vec::new();
    for (i, &v) in path.iter().enumerate() {
        if !in_a[v] {
            continue;
        }
        let c = prev.cluster_of(v).expect("covered");
        if used_clusters.contains(&c) {
            continue;
        }
        if chosen.iter().all(|&j| off[i].abs_diff(off[j]) >= radius) {
            chosen.push(i);
            used_clusters.push(c);
        }
    }
    chosen.into_iter().map(|i| path[i]).collect()
}

/// Problems with the leaders of one path: spacing, distinct clusters, and
/// maximality.
pub fn leader_problems<W: Weight>(
    g: &WeightedGraph<W>,
    prev: &Partition,
    path: &[usize],
    in_a: &[bool],
    leaders: &[usize],
    radius: u128,
) -> Vec<String> {
    let off = path_offsets(g, path);
    let pos = |v: usize| path.iter().position(|&x| x == v);
    let mut out = Vec::new();
    let idx: Vec<Option<usize>> = leaders.iter().map(|&l| pos(l)).collect();
    for (a, &la) in leaders.iter().enumerate() {
        let Some(ia) = idx[a] else {
            out.push(format!("leader {la} is not on the path"));
            continue;
        };
        if !in_a[la] {
            out.push(format!("leader {la} is outside Psi'"));
        }
        for (b, &lb) in leaders.iter().enumerate().skip(a + 1) {
            let Some(ib) = idx[b] else { continue };
            if off[ia].abs_diff(off[ib]) < radius {
                out.push(format!("leaders {la} and {lb} are closer than {radius}"));
            }
            if prev.cluster_of(la) == prev.cluster_of(lb) {
                out.push(format!("leaders {la} and {lb} share a cluster"));
            }
        }
    }
    for (i, &v) in path.iter().enumerate() {
        if !in_a[v] || leaders.contains(&v) {
            continue;
        }
        let c = prev.cluster_of(v);
        let spaced = idx.iter().flatten().all(|&j| off[i].abs_diff(off[j]) >= radius);
        let fresh = leaders.iter().all(|&l| prev.cluster_of(l) != c);
        if spaced && fresh {
            out.push(format!("vertex {v} could still be a leader"));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinorFreeHierarchy {
    pub hierarchy: PartitionHierarchy,
    /// Levels as built, before root padding; the last one is `{V}`.
    pub raw: Vec<MinorFreeLevel>,
    pub oracle: &'static str,
    pub k: usize,
    /// `2 ceil(log2 n)^2`, the aggregation detour factor.
    pub lambda: u128,
    /// `ceil(log2 n)`, the separator recursion depth.
    pub depth: u128,
    pub alpha_budget: u128,
    pub beta_budget: u128,
    pub diameter: u128,
    pub warnings: Vec<String>,
}

/// `2 ceil(log2 n)`, at least 2.
pub fn default_gamma(n: usize) -> u64 {
    (2 * ceil_log2(n as u128) as u64).max(2)
}

pub fn build_hierarchy_minorfree<W: Weight, O: SeparatorOracle<W> + ?Sized>(
    g: &WeightedGraph<W>,
    root: usize,
    oracle: &O,
    gamma: Option<u64>,
) -> Result<MinorFreeHierarchy> {
    let n = g.n();
    if n == 0 {
        return Err(Error::Parameter("graph has no vertices".into()));
    }
    g.check_vertex(root)?;
    g.require_connected()?;
    let lowest = default_gamma(n);
    let gamma = match gamma {
        Some(gm) if gm < lowest => {
            return Err(Error::Parameter(format!("gamma {gm} is below the required minimum {lowest}")));
        }
        Some(gm) => gm,
        None => lowest,
    };
    let diameter = g.diameter()?.widen();
    let mut d = 0u32;
    while pow_sat(gamma as u128, d) < diameter {
        d += 1;
    }
    let mut raw = Vec::new();
    let mut prev = Partition::singletons(0..n);
    for i in 0..d {
        let level = build_level_minorfree(g, &prev, pow_sat(gamma as u128, i), oracle)?;
        prev = level.partition.clone();
        raw.push(level);
        if prev.len() == 1 {
            break;
        }
    }
    if prev.len() != 1 || raw.is_empty() {
        raw.push(MinorFreeLevel {
            partition: Partition::whole((0..n).collect()),
            radius: pow_sat(gamma as u128, raw.len() as u32),
            paths: Vec::new(),
            separations: 0,
            leftover: 0,
        });
    }
    let levels: Vec<Partition> = raw.iter().map(|l| l.partition.clone()).collect();
    let padded = pad_root(g, &levels, gamma, root);
    let k = oracle.k();
    let log = ceil_log2(n as u128) as u128;
    let lambda = 2 * log * log;
    let spread = 2 * k as u128 * (1 + log) + 1;
    let alpha_budget = 3 * lambda * spread;
    let beta_budget = (2 * alpha_budget + 3) * k as u128 * (1 + log);
    let hierarchy = PartitionHierarchy {
        levels: padded,
        gamma,
        root,
    };
    let mut warnings = Vec::new();
    let report = crate::partition::validate_hierarchy(g, &hierarchy);
    if let Some(a) = report.realized_alpha {
        if a > gamma as u128 {
            warnings.push(format!("realized alpha {a} exceeds gamma {gamma}"));
        }
    }
    for (i, level) in raw.iter().enumerate() {
        if level.leftover > 0 {
            warnings.push(format!("level {i}: {} clusters were never reached by a separator path", level.leftover));
        }
    }
    Ok(MinorFreeHierarchy {
        hierarchy,
        raw,
        oracle: oracle.name(),
        k,
        lambda,
        depth: log,
        alpha_budget,
        beta_budget,
        diameter,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinorFreeAudit {
    /// `(level, path id, observed, bound)` of failed proximity checks.
    pub proximity: Vec<(usize, usize, Option<u128>, u128)>,
    /// Final clusters holding leaders of several paths: `(level, smallest vertex)`.
    pub shared_leaders: Vec<(usize, usize)>,
    /// `(level, path id)` of paths whose leaders failed the rescan.
    pub leader_issues: Vec<(usize, usize)>,
    pub coarsening: Vec<usize>,
    pub disconnected: Vec<(usize, usize)>,
    pub leftover: usize,
    pub ok: bool,
}

/// Rechecks the per-level guarantees recorded during a build.
pub fn audit<W: Weight>(g: &WeightedGraph<W>, mh: &MinorFreeHierarchy) -> MinorFreeAudit {
    let mut proximity = Vec::new();
    let mut shared_leaders = Vec::new();
    let mut leader_issues = Vec::new();
    let mut coarsening = Vec::new();
    let mut disconnected = Vec::new();
    let mut leftover = 0;
    let mut prev = Partition::singletons(0..g.n());
    for (i, level) in mh.raw.iter().enumerate() {
        leftover += level.leftover;
        for rec in &level.paths {
            if rec.proximity.is_none_or(|d| d > rec.proximity_bound) {
                proximity.push((i, rec.id, rec.proximity, rec.proximity_bound));
            }
            if !rec.leader_issues.is_empty() {
                leader_issues.push((i, rec.id));
            }
        }
        let p = &level.partition;
        let mut owner: Vec<Option<usize>> = vec![None; p.len()];
        for rec in &level.paths {
            for &l in &rec.leaders {
                let c = p.cluster_of(l).expect("covered");
                match owner[c] {
                    Some(id) if id != rec.id => shared_leaders.push((i, p.cluster(c)[0])),
                    _ => owner[c] = Some(rec.id),
                }
            }
        }
        if !p.coarsens(&prev) {
            coarsening.push(i);
        }
        for c in p.clusters() {
            if g.strong_diameter(c).finite().is_none() {
                disconnected.push((i, c[0]));
            }
        }
        prev = p.clone();
    }
    shared_leaders.dedup();
    MinorFreeAudit {
        ok: proximity.is_empty()
            && shared_leaders.is_empty()
            && leader_issues.is_empty()
            && coarsening.is_empty()
            && disconnected.is_empty(),
        proximity,
        shared_leaders,
        leader_issues,
        coarsening,
        disconnected,
        leftover,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{generate, GenKind, Weights};
    use crate::partition::{validate_hierarchy, validate_partition};
    use crate::separator::{GridOracle, TreeOracle};

    #[test]
    fn five_path_singletons_radius_one() {
        let g = generate(GenKind::Path, 5, 0, Weights::UNIT).unwrap();
        let lvl = build_level_minorfree(&g, &Partition::singletons(0..5), 1, &TreeOracle).unwrap();
        assert!(lvl.partition.covers(5));
        assert!(validate_partition(&g, &lvl.partition, 1).disconnected.is_empty());
        assert_eq!(lvl.leftover, 0);
    }

    #[test]
    fn whole_previous_level_is_kept() {
        let g = generate(GenKind::Path, 4, 0, Weights::UNIT).unwrap();
        let lvl = build_level_minorfree(&g, &Partition::whole(vec![0, 1, 2, 3]), 1, &TreeOracle).unwrap();
        assert_eq!(lvl.partition.clusters(), &[vec![0, 1, 2, 3]]);
    }

    #[test]
    fn single_vertex_hierarchy() {
        let g = crate::Graph::new(1, []).unwrap();
        let mh = build_hierarchy_minorfree(&g, 0, &TreeOracle, None).unwrap();
        assert_eq!(mh.hierarchy.levels.len(), 1);
        assert!(validate_hierarchy(&g, &mh.hierarchy).ok);
    }

    #[test]
    fn sixteen_path_with_tree_oracle() {
        let g = generate(GenKind::Path, 16, 0, Weights::UNIT).unwrap();
        let mh = build_hierarchy_minorfree(&g, 0, &TreeOracle, None).unwrap();
        let r = validate_hierarchy(&g, &mh.hierarchy);
        assert!(r.ok, "{:?}", r.violations);
        assert!(audit(&g, &mh).ok);
    }

    #[test]
    fn four_by_four_grid_leaders_are_spaced() {
        let g = generate(GenKind::Grid { rows: 4, cols: 4 }, 16, 0, Weights::UNIT).unwrap();
        let o = GridOracle::new(&g, 4, 4).unwrap();
        let gamma = default_gamma(16);
        let p0 = build_level_minorfree(&g, &Partition::singletons(0..16), 1, &o).unwrap();
        let p1 = build_level_minorfree(&g, &p0.partition, gamma as u128, &o).unwrap();
        assert!(validate_partition(&g, &p1.partition, gamma as u128).disconnected.is_empty());
        assert!(p1.partition.coarsens(&p0.partition));
        for rec in &p1.paths {
            let off = path_offsets(&g, &rec.path);
            for (a, &x) in rec.leaders.iter().enumerate() {
                for &y in &rec.leaders[a + 1..] {
                    let ix = rec.path.iter().position(|&v| v == x).unwrap();
                    let iy = rec.path.iter().position(|&v| v == y).unwrap();
                    assert!(off[ix].abs_diff(off[iy]) >= gamma as u128);
                }
            }
        }
    }

    #[test]
    fn six_by_six_grid_hierarchy() {
        let g = generate(GenKind::Grid { rows: 6, cols: 6 }, 36, 0, Weights::UNIT).unwrap();
        let o = GridOracle::new(&g, 6, 6).unwrap();
        let mh = build_hierarchy_minorfree(&g, 0, &o, None).unwrap();
        let r = validate_hierarchy(&g, &mh.hierarchy);
        assert!(r.ok, "{:?}", r.violations);
        assert!(r.realized_beta as u128 <= mh.beta_budget);
        assert!(audit(&g, &mh).ok);
    }

    #[test]
    fn leader_audit_detects_crowding() {
        let g = generate(GenKind::Path, 6, 0, Weights::UNIT).unwrap();
        let prev = Partition::singletons(0..6);
        let path: Vec<usize> = (0..6).collect();
        let in_a = vec![true; 6];
        let good = choose_leaders(&g, &prev, &path, &in_a, 2);
        assert_eq!(good, vec![0, 2, 4]);
        assert!(leader_problems(&g, &prev, &path, &in_a, &good, 2).is_empty());
        assert!(!leader_problems(&g, &prev, &path, &in_a, &[0, 1], 2).is_empty());
        assert!(!leader_problems(&g, &prev, &path, &in_a, &[0, 4], 2).is_empty());
    }

    #[test]
    fn small_gamma_is_rejected() {
        let g = generate(GenKind::Path, 16, 0, Weights::UNIT).unwrap();
        assert!(matches!(
            build_hierarchy_minorfree(&g, 0, &TreeOracle, Some(3)),
            Err(Error::Parameter(_))
        ));
    }
}
