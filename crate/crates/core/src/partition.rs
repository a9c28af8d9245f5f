//! Partitions, partition hierarchies and their validators.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::weight::{pow_sat, Weight};

const ABSENT: usize = usize::MAX;

/// Disjoint nonempty clusters over a ground set of vertices.
///
/// Clusters are kept sorted internally and ordered by their smallest vertex;
/// the cluster id is the position in that order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Partition {
    clusters: Vec<Vec<usize>>,
    index: Vec<usize>,
}

impl Partition {
    pub fn new(clusters: Vec<Vec<usize>>) -> Result<Self> {
        let mut clusters = clusters;
        for c in &mut clusters {
            if c.is_empty() {
                return Err(Error::InvalidPartition("empty cluster".into()));
            }
            c.sort_unstable();
            if let Some(w) = c.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::InvalidPartition(format!("vertex {} repeated in a cluster", w[0])));
            }
        }
        clusters.sort_unstable_by_key(|c| c[0]);
        let top = clusters.iter().map(|c| c[c.len() - 1] + 1).max().unwrap_or(0);
        let mut index = vec![ABSENT; top];
        for (id, c) in clusters.iter().enumerate() {
            for &v in c {
                if index[v] != ABSENT {
                    return Err(Error::InvalidPartition(format!("vertex {v} lies in two clusters")));
                }
                index[v] = id;
            }
        }
        Ok(Partition { clusters, index })
    }

    /// Like [`Partition::new`], additionally requiring the ground set to be `0..n`.
    pub fn covering(n: usize, clusters: Vec<Vec<usize>>) -> Result<Self> {
        let p = Partition::new(clusters)?;
        if p.index.len() > n {
            return Err(Error::InvalidPartition(format!(
                "vertex {} out of range for n = {n}",
                p.index.len() - 1
            )));
        }
        if let Some(v) = (0..n).find(|&v| !p.contains(v)) {
            return Err(Error::InvalidPartition(format!("vertex {v} is not covered")));
        }
        Ok(p)
    }

    pub fn singletons(vertices: impl IntoIterator<Item = usize>) -> Self {
        Partition::new(vertices.into_iter().map(|v| vec![v]).collect()).expect("distinct vertices")
    }

    pub fn whole(vertices: Vec<usize>) -> Self {
        if vertices.is_empty() {
            return Partition::default();
        }
        Partition::new(vec![vertices]).expect("distinct vertices")
    }

    /// Groups vertices `0..labels.len()` by label.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for (v, &l) in labels.iter().enumerate() {
            groups.entry(l).or_default().push(v);
        }
        Partition::new(groups.into_values().collect()).expect("labels define a partition")
    }

    pub fn into_clusters(self) -> Vec<Vec<usize>> {
        self.clusters
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn cluster(&self, id: usize) -> &[usize] {
        &self.clusters[id]
    }

    pub fn cluster_of(&self, v: usize) -> Option<usize> {
        match self.index.get(v) {
            Some(&c) if c != ABSENT => Some(c),
            _ => None,
        }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.cluster_of(v).is_some()
    }

    /// Ground set, ascending.
    pub fn ground(&self) -> Vec<usize> {
        (0..self.index.len()).filter(|&v| self.index[v] != ABSENT).collect()
    }

    pub fn ground_size(&self) -> usize {
        self.clusters.iter().map(Vec::len).sum()
    }

    /// Membership mask of the ground set over `0..n`.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        (0..n).map(|v| self.contains(v)).collect()
    }

    pub fn covers(&self, n: usize) -> bool {
        self.index.len() <= n && self.ground_size() == n
    }

    /// `{X ∩ C : C ∈ self} \ {∅}`.
    pub fn restrict(&self, x: &[usize]) -> Partition {
        let mut parts: Vec<Vec<usize>> = vec![Vec::new(); self.len()];
        for &v in x {
            if let Some(c) = self.cluster_of(v) {
                parts[c].push(v);
            }
        }
        Partition::new(parts.into_iter().filter(|c| !c.is_empty()).collect()).expect("restriction of a partition")
    }

    /// First cluster of `finer` that is not inside a single cluster of `self`.
    pub fn coarsening_violation(&self, finer: &Partition) -> Option<usize> {
        finer.clusters.iter().position(|c| {
            let first = self.cluster_of(c[0]);
            first.is_none() || c.iter().any(|&v| self.cluster_of(v) != first)
        })
    }

    pub fn coarsens(&self, finer: &Partition) -> bool {
        self.coarsening_violation(finer).is_none()
    }

    /// Clusters met by `vertices`, ascending and deduplicated.
    pub fn clusters_met(&self, vertices: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = vertices.iter().filter_map(|&v| self.cluster_of(v)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

impl Serialize for Partition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.clusters.serialize(s)
    }
}

/// Measured strong diameter and cluster-valence of one partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionReport {
    pub radius: u128,
    /// `None` when some cluster induces a disconnected subgraph.
    pub max_diameter: Option<u128>,
    pub diameter_witness: Option<usize>,
    pub disconnected: Vec<usize>,
    pub max_valence: usize,
    pub valence_witness: Option<usize>,
}

impl PartitionReport {
    /// `max(1, ceil(max_diameter / radius))`.
    pub fn alpha(&self) -> Option<u128> {
        let d = self.max_diameter?;
        let r = self.radius.max(1);
        Some(d.div_ceil(r).max(1))
    }

    pub fn beta(&self) -> usize {
        self.max_valence.max(1)
    }
}

pub fn cluster_diameters<W: Weight>(g: &WeightedGraph<W>, p: &Partition) -> Vec<Option<u128>> {
    p.clusters()
        .iter()
        .map(|c| g.strong_diameter(c).finite().map(Weight::widen))
        .collect()
}

/// Number of clusters of `p` met by `B(v, radius)`, for every vertex of `g`.
pub fn valences<W: Weight>(g: &WeightedGraph<W>, p: &Partition, radius: u128) -> Vec<usize> {
    let rho = W::narrow_saturating(radius);
    (0..g.n())
        .map(|v| p.clusters_met(&g.ball(v, rho)).len())
        .collect()
}

pub fn validate_partition<W: Weight>(g: &WeightedGraph<W>, p: &Partition, radius: u128) -> PartitionReport {
    let diams = cluster_diameters(g, p);
    let disconnected: Vec<usize> = (0..diams.len()).filter(|&c| diams[c].is_none()).collect();
    let (max_diameter, diameter_witness) = if disconnected.is_empty() {
        let best = (0..diams.len()).max_by_key(|&c| (diams[c], std::cmp::Reverse(c)));
        (best.and_then(|c| diams[c]), best)
    } else {
        (None, disconnected.first().copied())
    };
    let vals = valences(g, p, radius);
    let valence_witness = (0..vals.len()).max_by_key(|&v| (vals[v], std::cmp::Reverse(v)));
    PartitionReport {
        radius,
        max_diameter,
        diameter_witness,
        disconnected,
        max_valence: valence_witness.map_or(0, |v| vals[v]),
        valence_witness,
    }
}

/// Nested partitions `P_0, ..., P_d` with `P_d = {V}` and a padded root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionHierarchy {
    pub levels: Vec<Partition>,
    pub gamma: u64,
    pub root: usize,
}

impl PartitionHierarchy {
    /// Index of the top level.
    pub fn d(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    /// `gamma^i`.
    pub fn radius(&self, i: usize) -> u128 {
        pow_sat(self.gamma as u128, i as u32)
    }

    /// `<P_0|C, ..., P_i|C>` for cluster `c` of level `i`.
    pub fn project(&self, i: usize, c: usize) -> Vec<Partition> {
        let members = self.levels[i].cluster(c).to_vec();
        self.levels[..=i].iter().map(|p| p.restrict(&members)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "property", rename_all = "snake_case")]
pub enum Violation {
    Partition { level: usize, detail: String },
    Top { level: usize, clusters: usize },
    Hierarchy { level: usize, cluster: usize },
    RootPadding { level: usize, clusters: usize },
    Disconnected { level: usize, cluster: usize },
    Root { root: usize },
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelReport {
    pub level: usize,
    pub clusters: usize,
    #[serde(flatten)]
    pub partition: PartitionReport,
    pub alpha: Option<u128>,
    pub beta: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HierarchyReport {
    pub levels: Vec<LevelReport>,
    pub violations: Vec<Violation>,
    /// Maximum of the per-level realized alpha; `None` if some cluster is disconnected.
    pub realized_alpha: Option<u128>,
    pub realized_beta: usize,
    pub ok: bool,
}

pub fn validate_hierarchy<W: Weight>(g: &WeightedGraph<W>, h: &PartitionHierarchy) -> HierarchyReport {
    let n = g.n();
    let mut violations = Vec::new();
    let mut levels = Vec::new();
    if h.levels.is_empty() {
        violations.push(Violation::Empty);
    }
    if h.root >= n.max(1) {
        violations.push(Violation::Root { root: h.root });
    }
    for (i, p) in h.levels.iter().enumerate() {
        if !p.covers(n) {
            violations.push(Violation::Partition {
                level: i,
                detail: format!("covers {} of {} vertices", p.ground_size(), n),
            });
            continue;
        }
        let radius = h.radius(i);
        let report = validate_partition(g, p, radius);
        for &c in &report.disconnected {
            violations.push(Violation::Disconnected { level: i, cluster: c });
        }
        if let Some(next) = h.levels.get(i + 1) {
            if let Some(c) = next.coarsening_violation(p) {
                violations.push(Violation::Hierarchy { level: i, cluster: c });
            }
        }
        if h.root < n {
            let met = p.clusters_met(&g.ball(h.root, W::narrow_saturating(radius))).len();
            if met != 1 {
                violations.push(Violation::RootPadding { level: i, clusters: met });
            }
        }
        levels.push(LevelReport {
            level: i,
            clusters: p.len(),
            alpha: report.alpha(),
            beta: report.beta(),
            partition: report,
        });
    }
    if let Some(top) = h.levels.last() {
        if top.len() != 1 {
            violations.push(Violation::Top {
                level: h.d(),
                clusters: top.len(),
            });
        }
    }
    let realized_alpha = levels
        .iter()
        .map(|l| l.alpha)
        .try_fold(1u128, |acc, a| a.map(|a| acc.max(a)));
    let realized_beta = levels.iter().map(|l| l.beta).max().unwrap_or(1);
    HierarchyReport {
        ok: violations.is_empty(),
        levels,
        violations,
        realized_alpha,
        realized_beta,
    }
}

/// Bottom-up root padding: at level `i`, every cluster that meets
/// `B(r, gamma^i)` or holds a vertex of the padded level `i-1` root cluster
/// is merged into one root cluster. Nesting is preserved.
pub fn pad_root<W: Weight>(g: &WeightedGraph<W>, levels: &[Partition], gamma: u64, root: usize) -> Vec<Partition> {
    let mut out: Vec<Partition> = Vec::with_capacity(levels.len());
    let mut prev_root: Vec<usize> = Vec::new();
    for (i, p) in levels.iter().enumerate() {
        let radius = W::narrow_saturating(pow_sat(gamma as u128, i as u32));
        let mut touch = g.ball(root, radius);
        touch.extend_from_slice(&prev_root);
        let merged: Vec<usize> = p.clusters_met(&touch);
        let mut root_cluster: Vec<usize> = merged.iter().flat_map(|&c| p.cluster(c).iter().copied()).collect();
        root_cluster.sort_unstable();
        let mut clusters: Vec<Vec<usize>> = (0..p.len())
            .filter(|c| merged.binary_search(c).is_err())
            .map(|c| p.cluster(c).to_vec())
            .collect();
        clusters.push(root_cluster.clone());
        out.push(Partition::new(clusters).expect("merging clusters keeps a partition"));
        prev_root = root_cluster;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> WeightedGraph<u64> {
        WeightedGraph::new(n, (1..n).map(|i| (i - 1, i, 1))).unwrap()
    }

    fn cycle(n: usize) -> WeightedGraph<u64> {
        WeightedGraph::new(n, (0..n).map(|i| (i, (i + 1) % n, 1))).unwrap()
    }

    fn p(c: Vec<Vec<usize>>) -> Partition {
        Partition::new(c).unwrap()
    }

    #[test]
    fn canonical_order_and_index() {
        let q = p(vec![vec![3, 2], vec![1, 0]]);
        assert_eq!(q.clusters(), &[vec![0, 1], vec![2, 3]]);
        assert_eq!(q.cluster_of(3), Some(1));
        assert_eq!(q.cluster_of(7), None);
    }

    #[test]
    fn rejects_overlap_and_gaps() {
        assert!(Partition::new(vec![vec![0, 1], vec![1]]).is_err());
        assert!(Partition::new(vec![vec![]]).is_err());
        assert!(Partition::covering(3, vec![vec![0, 1]]).is_err());
        assert!(Partition::covering(2, vec![vec![0, 1, 2]]).is_err());
    }

    #[test]
    fn validate_partition_examples() {
        let r = validate_partition(&path(3), &p(vec![vec![0, 1, 2]]), 1);
        assert_eq!((r.max_diameter, r.max_valence), (Some(2), 1));

        let r = validate_partition(&path(3), &Partition::singletons(0..3), 1);
        assert_eq!((r.max_diameter, r.max_valence), (Some(0), 3));
        assert_eq!(r.valence_witness, Some(1));

        let r = validate_partition(&cycle(6), &p(vec![vec![0, 1, 2], vec![3, 4, 5]]), 1);
        assert_eq!((r.max_diameter, r.max_valence), (Some(2), 2));
    }

    #[test]
    fn disconnected_cluster_reported() {
        let r = validate_partition(&cycle(6), &p(vec![vec![0, 3], vec![1, 2], vec![4, 5]]), 1);
        assert_eq!(r.max_diameter, None);
        assert_eq!(r.disconnected, vec![0]);
    }

    #[test]
    fn restrict_examples() {
        let q = p(vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(q.restrict(&[1, 2]), p(vec![vec![1], vec![2]]));
        assert_eq!(q.restrict(&[0, 1, 2, 3]), q);
        assert_eq!(p(vec![vec![0, 1, 2]]).restrict(&[0, 2]), p(vec![vec![0, 2]]));
    }

    #[test]
    fn single_vertex_hierarchy() {
        let g = WeightedGraph::<u64>::new(1, []).unwrap();
        let h = PartitionHierarchy {
            levels: vec![p(vec![vec![0]])],
            gamma: 2,
            root: 0,
        };
        let r = validate_hierarchy(&g, &h);
        assert!(r.ok, "{:?}", r.violations);
        assert_eq!((r.realized_alpha, r.realized_beta), (Some(1), 1));
    }

    #[test]
    fn straddling_cluster_breaks_hierarchy() {
        let g = path(4);
        let h = PartitionHierarchy {
            levels: vec![
                p(vec![vec![0], vec![1, 2], vec![3]]),
                p(vec![vec![0, 1], vec![2, 3]]),
                p(vec![vec![0, 1, 2, 3]]),
            ],
            gamma: 2,
            root: 0,
        };
        let r = validate_hierarchy(&g, &h);
        assert!(r.violations.contains(&Violation::Hierarchy { level: 0, cluster: 1 }));
    }

    #[test]
    fn projection_on_a_path() {
        let h = PartitionHierarchy {
            levels: vec![
                p(vec![vec![0, 1], vec![2, 3], vec![4, 5], vec![6, 7]]),
                p(vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]]),
                p(vec![(0..8).collect()]),
            ],
            gamma: 2,
            root: 0,
        };
        let proj = h.project(1, 1);
        assert_eq!(proj.len(), 2);
        assert_eq!(proj[0], p(vec![vec![4, 5], vec![6, 7]]));
        for level in &proj {
            assert!(level.ground().iter().all(|v| (4..8).contains(v)));
        }
        assert_eq!(h.project(2, 0), h.levels);
        assert_eq!(h.project(0, 2), vec![p(vec![vec![4, 5]])]);
    }

    #[test]
    fn padding_merges_root_ball() {
        let g = path(6);
        let levels = vec![Partition::singletons(0..6), p(vec![vec![0, 1], vec![2, 3], vec![4, 5]])];
        let padded = pad_root(&g, &levels, 2, 2);
        assert_eq!(padded[0], p(vec![vec![0], vec![1, 2, 3], vec![4], vec![5]]));
        assert_eq!(padded[1], p(vec![vec![0, 1, 2, 3, 4, 5]]));
        assert!(padded[1].coarsens(&padded[0]));
    }
}
