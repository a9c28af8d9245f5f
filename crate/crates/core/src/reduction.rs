//! From universal Steiner trees back to partitions.
//!
//! `G'` is `G` plus a fresh root `r' = n` joined to every vertex by an edge
//! of weight `2 delta gamma`. Any spanning tree of `G'` rooted at `r'`
//! splits into the subtrees hanging off `r'`, and their vertex sets
//! partition `V`. If the tree has stretch at most `delta` on `G'`, every
//! cluster has strong diameter at most `4 delta (delta - 1) gamma` and every
//! `gamma`-ball meets at most `2 delta` clusters.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::general::{build_hierarchy, GeneralParams};
use crate::graph::WeightedGraph;
use crate::partition::{validate_partition, Partition};
use crate::splitjoin::{build_ust, build_ust_basic};
use crate::steiner::stretch_exhaustive;
use crate::tree::SteinerForest;
use crate::weight::{Fraction, Weight};

/// Tree constructions usable as the inner procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UstKind {
    SplitJoin,
    Basic,
}

impl UstKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "splitjoin" | "split-join" | "split_join" => Ok(UstKind::SplitJoin),
            "basic" => Ok(UstKind::Basic),
            _ => Err(Error::Parameter(format!("unknown tree construction {s:?}"))),
        }
    }

    /// Builds a general hierarchy of `g` rooted at `root` with default
    /// parameters and turns it into a spanning tree.
    pub fn run<W: Weight>(&self, g: &WeightedGraph<W>, root: usize) -> Result<SteinerForest<W>> {
        let gh = build_hierarchy(g, root, GeneralParams::default())?;
        match self {
            UstKind::SplitJoin => Ok(build_ust(g, &gh.hierarchy)?.forest),
            UstKind::Basic => build_ust_basic(g, &gh.hierarchy),
        }
    }
}

/// `2 delta gamma` as a weight, rejecting overflow.
pub fn root_weight<W: Weight>(delta: u64, gamma: u64) -> Result<W> {
    if delta == 0 || gamma == 0 {
        return Err(Error::Parameter("delta and gamma must be at least 1".into()));
    }
    let w = 2u128 * delta as u128 * gamma as u128;
    if w > W::max_value().widen() {
        return Err(Error::Parameter(format!("root edge weight {w} overflows the weight type")));
    }
    Ok(W::narrow_saturating(w))
}

/// `G` plus vertex `n` joined to every vertex by weight `w`.
pub fn attach_root<W: Weight>(g: &WeightedGraph<W>, w: W) -> WeightedGraph<W> {
    let n = g.n();
    let edges = g.edges().iter().map(|e| (e.u, e.v, e.w)).chain((0..n).map(|v| (v, n, w)));
    WeightedGraph::new(n + 1, edges).expect("fresh root keeps the graph simple")
}

/// Vertex sets of the subtrees of `t` hanging off `root`, as a partition of
/// every other vertex.
pub fn split_at_root<W: Weight>(g_prime: &WeightedGraph<W>, t: &SteinerForest<W>, root: usize) -> Result<Partition> {
    let f = t.validate(g_prime)?;
    if f.components() != 1 {
        return Err(Error::NotSpanningTree(format!("{} components", f.components())));
    }
    let rest: Vec<(usize, usize, W)> =
        t.edges.iter().filter(|e| e.u != root && e.v != root).map(|e| (e.u, e.v, e.w)).collect();
    let forest = WeightedGraph::new(g_prime.n(), rest)?;
    let mut mask = vec![true; g_prime.n()];
    mask[root] = false;
    Partition::new(forest.components_within(&mask))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionCertificate {
    pub delta_used: u64,
    pub gamma: u64,
    /// Measured stretch of the tree on `G'`, when it was computed.
    pub measured_stretch: Option<Fraction>,
    /// The measured stretch is at most `delta_used`.
    pub delta_verified: bool,
    pub measured_diameter_max: u128,
    pub measured_valence_max: usize,
    pub bound_diameter: u128,
    pub bound_valence: u128,
    /// Both bounds hold; only meaningful when `delta_verified`.
    pub within_bounds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Reduction<W> {
    pub partition: Partition,
    pub tree: SteinerForest<W>,
    pub certificate: ReductionCertificate,
}

/// Runs `ust` on `G'` and splits its tree at the added root. The
/// certificate records measured quantities; `delta` is trusted as given.
pub fn partition_from_ust<W, F>(g: &WeightedGraph<W>, gamma: u64, delta: u64, ust: F) -> Result<Reduction<W>>
where
    W: Weight,
    F: Fn(&WeightedGraph<W>, usize) -> Result<SteinerForest<W>>,
{
    let n = g.n();
    let gp = attach_root(g, root_weight::<W>(delta, gamma)?);
    let tree = ust(&gp, n)?;
    let partition = split_at_root(&gp, &tree, n)?;
    let report = validate_partition(g, &partition, gamma as u128);
    let bound_diameter = 4 * delta as u128 * (delta as u128 - 1) * gamma as u128;
    let bound_valence = 2 * delta as u128;
    let measured_diameter_max = report.max_diameter.ok_or_else(|| {
        Error::InvalidPartition("a subtree of the added root is disconnected in the input graph".into())
    })?;
    Ok(Reduction {
        certificate: ReductionCertificate {
            delta_used: delta,
            gamma,
            measured_stretch: None,
            delta_verified: false,
            measured_diameter_max,
            measured_valence_max: report.max_valence,
            bound_diameter,
            bound_valence,
            within_bounds: measured_diameter_max <= bound_diameter && report.max_valence as u128 <= bound_valence,
        },
        partition,
        tree,
    })
}

/// Searches for a `delta` that bounds the measured stretch of the tree the
/// procedure builds on the `G'` of that same `delta`. Starting from `start`,
/// each round measures the stretch `sigma` exhaustively; the search stops
/// when `sigma <= delta` and otherwise retries with `delta = ceil(sigma)`.
/// After `max_rounds` unsuccessful rounds the last attempt is returned with
/// `delta_verified = false`.
pub fn measure_delta<W, F>(g: &WeightedGraph<W>, gamma: u64, start: u64, max_rounds: usize, ust: F) -> Result<Reduction<W>>
where
    W: Weight,
    F: Fn(&WeightedGraph<W>, usize) -> Result<SteinerForest<W>>,
{
    let n = g.n();
    let mut delta = start.max(1);
    let mut last = None;
    for _ in 0..max_rounds.max(1) {
        let mut red = partition_from_ust(g, gamma, delta, &ust)?;
        let gp = attach_root(g, root_weight::<W>(delta, gamma)?);
        let stretch = stretch_exhaustive(&gp, &red.tree, n)?;
        let sigma = stretch
            .max()
            .filter(|_| !stretch.unbounded)
            .ok_or_else(|| Error::Parameter("tree has unbounded stretch on the augmented graph".into()))?;
        red.certificate.measured_stretch = Some(sigma);
        let next = sigma.ceil().max(1);
        if sigma <= Fraction::new(delta as u128, 1) {
            red.certificate.delta_verified = true;
            return Ok(red);
        }
        last = Some(red);
        delta = u64::try_from(next).map_err(|_| Error::Parameter("delta overflow".into()))?;
    }
    Ok(last.expect("at least one round"))
}
