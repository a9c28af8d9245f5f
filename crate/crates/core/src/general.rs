//! Rank-ordered cluster merging for arbitrary graphs.
//!
//! Level `i` starts from the clusters of level `i-1` at rank 0. Stage `j`
//! merges, around a vertex `v` whose ball `B(v, gamma^i)` meets more than
//! `n^(1/k)` clusters of rank `j-1`, the cluster of `v` with all those
//! clusters into a new cluster of rank `j`. Phase 1 looks at vertices in
//! clusters of rank below `j`, phase 2 at vertices in clusters of rank `j`.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Ratio};
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::partition::{pad_root, Partition, PartitionHierarchy};
use crate::weight::{ceil_log2, pow_sat, Weight};

pub type Epsilon = Ratio<u64>;

/// `ceil(sqrt(log2 n))`, at least 1.
pub fn default_k(n: usize) -> u32 {
    let l = ceil_log2(n as u128);
    let mut k = 1;
    while k * k < l {
        k += 1;
    }
    k
}

fn big(r: Epsilon) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// `(4/3 + eps) * 4^j - 4/3`, exactly.
pub fn diameter_factor(j: u32, eps: Epsilon) -> BigRational {
    let four_thirds = BigRational::new(BigInt::from(4), BigInt::from(3));
    (four_thirds.clone() + big(eps)) * BigRational::from_integer(BigInt::from(4).pow(j)) - four_thirds
}

fn ceil_big(r: &BigRational) -> u128 {
    r.ceil().to_integer().to_u128().unwrap_or(u128::MAX)
}

/// Integer diameter budget `ceil((4/3 + eps) 4^(k-1) - 4/3)`.
pub fn alpha_budget(k: u32, eps: Epsilon) -> u128 {
    ceil_big(&diameter_factor(k - 1, eps)).max(1)
}

/// Largest `t` with `t^k <= n`; a count `c` exceeds `n^(1/k)` iff `c > t`.
pub fn root_floor(n: usize, k: u32) -> usize {
    let n = BigUint::from(n);
    let mut t = 0usize;
    while BigUint::from(t + 1).pow(k) <= n {
        t += 1;
    }
    t
}

/// Smallest `c` with `c^k >= n`.
pub fn root_ceil(n: usize, k: u32) -> usize {
    let t = root_floor(n, k);
    if BigUint::from(t).pow(k) == BigUint::from(n) {
        t
    } else {
        t + 1
    }
}

/// Smallest gamma allowed for the hierarchy builder.
pub fn min_gamma(n: usize, k: u32, eps: Epsilon) -> Result<u64> {
    if *eps.numer() == 0 {
        return Err(Error::Parameter("epsilon must be positive".into()));
    }
    let need = ceil_big(&(diameter_factor(k - 1, eps) / big(eps)));
    let log = 2 * ceil_log2(n as u128) as u128;
    let g = need.max(log).max(2);
    u64::try_from(g).map_err(|_| Error::Parameter("required gamma overflows u64".into()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelBuild {
    pub partition: Partition,
    /// Rank of each cluster of `partition`, by cluster id.
    pub ranks: Vec<u32>,
    /// For clusters of rank `j >= 1`: number of rank `j-1` clusters absorbed.
    pub absorbed: Vec<usize>,
    /// Number of stages that formed at least one cluster.
    pub stages: u32,
}

struct Slot {
    vertices: Vec<usize>,
    rank: u32,
    absorbed: usize,
}

/// One level of the construction with ball radius `radius`.
pub fn build_level<W: Weight>(g: &WeightedGraph<W>, prev: &Partition, radius: u128, k: u32) -> LevelBuild {
    let n = g.n();
    let threshold = root_floor(n, k);
    let rho = W::narrow_saturating(radius);
    let mut slots: Vec<Option<Slot>> = prev
        .clusters()
        .iter()
        .map(|c| {
            Some(Slot {
                vertices: c.clone(),
                rank: 0,
                absorbed: 0,
            })
        })
        .collect();
    let mut owner: Vec<usize> = (0..n).map(|v| prev.cluster_of(v).expect("prev covers V")).collect();
    let mut balls: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut stages = 0;

    let mut j = 1;
    while j < k {
        if !slots.iter().flatten().any(|s| s.rank == j - 1) {
            break;
        }
        let mut formed = false;
        for phase in [1, 2] {
            loop {
                let mut hit = None;
                for v in 0..n {
                    let rv = slots[owner[v]].as_ref().expect("live").rank;
                    let eligible = if phase == 1 { rv < j } else { rv == j };
                    if !eligible {
                        continue;
                    }
                    let ball = balls.entry(v).or_insert_with(|| g.ball(v, rho));
                    let mut met: Vec<usize> = ball
                        .iter()
                        .map(|&u| owner[u])
                        .filter(|&c| slots[c].as_ref().expect("live").rank == j - 1)
                        .collect();
                    met.sort_unstable();
                    met.dedup();
                    if met.len() > threshold {
                        hit = Some((v, met));
                        break;
                    }
                }
                let Some((v, met)) = hit else { break };
                let cv = owner[v];
                let base = slots[cv].take().expect("live");
                let mut vertices = base.vertices;
                let mut absorbed = if base.rank == j { base.absorbed } else { 0 };
                for &c in &met {
                    if c == cv {
                        absorbed += 1;
                        continue;
                    }
                    let s = slots[c].take().expect("live");
                    vertices.extend(s.vertices);
                    absorbed += 1;
                }
                let id = slots.len();
                for &u in &vertices {
                    owner[u] = id;
                }
                slots.push(Some(Slot {
                    vertices,
                    rank: j,
                    absorbed,
                }));
                if phase == 1 {
                    formed = true;
                }
            }
            if phase == 1 && !formed {
                break;
            }
        }
        if !formed {
            break;
        }
        stages += 1;
        j += 1;
    }

    let live: Vec<Slot> = slots.into_iter().flatten().collect();
    let partition = Partition::new(live.iter().map(|s| s.vertices.clone()).collect()).expect("merges keep a partition");
    let mut ranks = vec![0; partition.len()];
    let mut absorbed = vec![0; partition.len()];
    for s in &live {
        let id = partition.cluster_of(s.vertices[0]).expect("member");
        ranks[id] = s.rank;
        absorbed[id] = s.absorbed;
    }
    LevelBuild {
        partition,
        ranks,
        absorbed,
        stages,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneralParams {
    pub k: Option<u32>,
    pub epsilon: Epsilon,
    pub gamma: Option<u64>,
}

impl Default for GeneralParams {
    fn default() -> Self {
        GeneralParams {
            k: None,
            epsilon: Epsilon::from_integer(1),
            gamma: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralHierarchy {
    pub hierarchy: PartitionHierarchy,
    /// Levels `0..d` before root padding (the last one is `{V}`).
    pub raw: Vec<LevelBuild>,
    pub k: u32,
    pub epsilon: Epsilon,
    pub alpha_budget: u128,
    pub beta_budget: u128,
    pub diameter: u128,
}

pub fn build_hierarchy<W: Weight>(g: &WeightedGraph<W>, root: usize, params: GeneralParams) -> Result<GeneralHierarchy> {
    let n = g.n();
    if n == 0 {
        return Err(Error::Parameter("graph has no vertices".into()));
    }
    g.check_vertex(root)?;
    g.require_connected()?;
    let k = params.k.unwrap_or_else(|| default_k(n));
    if k == 0 {
        return Err(Error::Parameter("k must be at least 1".into()));
    }
    let eps = params.epsilon;
    let lowest = min_gamma(n, k, eps)?;
    let gamma = match params.gamma {
        Some(gm) if gm < lowest => {
            return Err(Error::Parameter(format!("gamma {gm} is below the required minimum {lowest}")));
        }
        Some(gm) => gm,
        None => lowest,
    };
    let alpha = alpha_budget(k, eps);
    let diameter = g.diameter()?.widen();
    let mut d = 0u32;
    while alpha.saturating_mul(pow_sat(gamma as u128, d)) < diameter {
        d += 1;
    }
    let mut raw = Vec::new();
    let mut prev = Partition::singletons(0..n);
    for i in 0..d {
        let level = build_level(g, &prev, pow_sat(gamma as u128, i), k);
        prev = level.partition.clone();
        raw.push(level);
    }
    raw.push(LevelBuild {
        partition: Partition::whole((0..n).collect()),
        ranks: vec![0],
        absorbed: vec![0],
        stages: 0,
    });
    let levels: Vec<Partition> = raw.iter().map(|l| l.partition.clone()).collect();
    let padded = pad_root(g, &levels, gamma, root);
    Ok(GeneralHierarchy {
        hierarchy: PartitionHierarchy {
            levels: padded,
            gamma,
            root,
        },
        raw,
        k,
        epsilon: eps,
        alpha_budget: alpha,
        beta_budget: k as u128 * root_ceil(n, k) as u128,
        diameter,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawViolation {
    pub level: usize,
    pub cluster: usize,
    pub detail: String,
}

/// Exact checks of the size, rank-ceiling, diameter and valence laws on the
/// unpadded levels built by the merging rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneralAudit {
    pub size_law: Vec<LawViolation>,
    pub rank_ceiling: Vec<LawViolation>,
    pub diameter_law: Vec<LawViolation>,
    pub valence_law: Vec<LawViolation>,
    pub coarsening: Vec<LawViolation>,
    pub ok: bool,
}

pub fn audit<W: Weight>(g: &WeightedGraph<W>, gh: &GeneralHierarchy) -> GeneralAudit {
    let n = g.n();
    let k = gh.k;
    let gamma = gh.hierarchy.gamma;
    let mut size_law = Vec::new();
    let mut rank_ceiling = Vec::new();
    let mut diameter_law = Vec::new();
    let mut valence_law = Vec::new();
    let mut coarsening = Vec::new();
    let built = &gh.raw[..gh.raw.len() - 1];
    let mut prev = Partition::singletons(0..n);
    for (i, level) in built.iter().enumerate() {
        let p = &level.partition;
        if let Some(c) = p.coarsening_violation(&prev) {
            coarsening.push(LawViolation {
                level: i,
                cluster: c,
                detail: "input cluster split".into(),
            });
        }
        let radius = pow_sat(gamma as u128, i as u32);
        for (c, members) in p.clusters().iter().enumerate() {
            let j = level.ranks[c];
            if j >= k {
                rank_ceiling.push(LawViolation {
                    level: i,
                    cluster: c,
                    detail: format!("rank {j} with k = {k}"),
                });
            }
            if j >= 1 {
                let lhs = BigUint::from(members.len()).pow(k);
                let rhs = BigUint::from(n).pow(j);
                if lhs <= rhs {
                    size_law.push(LawViolation {
                        level: i,
                        cluster: c,
                        detail: format!("size {} at rank {j}", members.len()),
                    });
                }
            }
            let bound = diameter_factor(j, gh.epsilon) * BigRational::from_integer(BigInt::from(radius));
            match g.strong_diameter(members).finite() {
                Some(dm) if BigRational::from_integer(BigInt::from(dm.widen())) <= bound => {}
                dm => diameter_law.push(LawViolation {
                    level: i,
                    cluster: c,
                    detail: format!("diameter {:?} exceeds {}", dm.map(Weight::widen), bound),
                }),
            }
        }
        let rho = W::narrow_saturating(radius);
        let nk = BigUint::from(n);
        for v in 0..n {
            let met = p.clusters_met(&g.ball(v, rho));
            let mut per_rank: HashMap<u32, usize> = HashMap::new();
            for c in met {
                *per_rank.entry(level.ranks[c]).or_default() += 1;
            }
            let mut ranks: Vec<_> = per_rank.into_iter().collect();
            ranks.sort_unstable();
            for (j, c) in ranks {
                if BigUint::from(c).pow(k) > nk {
                    valence_law.push(LawViolation {
                        level: i,
                        cluster: v,
                        detail: format!("ball meets {c} clusters of rank {j}"),
                    });
                }
            }
        }
        prev = p.clone();
    }
    let ok = size_law.is_empty()
        && rank_ceiling.is_empty()
        && diameter_law.is_empty()
        && valence_law.is_empty()
        && coarsening.is_empty();
    GeneralAudit {
        size_law,
        rank_ceiling,
        diameter_law,
        valence_law,
        coarsening,
        ok,
    }
}

/// `epsilon` parsed from `"p/q"` or `"p"`.
pub fn parse_epsilon(s: &str) -> Result<Epsilon> {
    let r: Epsilon = s
        .trim()
        .parse()
        .map_err(|_| Error::Parameter(format!("cannot parse epsilon {s:?}")))?;
    if r.is_zero() || r.denom().is_zero() {
        return Err(Error::Parameter("epsilon must be positive".into()));
    }
    Ok(r)
}
