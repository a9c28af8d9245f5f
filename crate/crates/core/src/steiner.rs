//! Optimal Steiner trees and the stretch of a universal tree.
//!
//! Optimal costs come from the Dreyfus-Wagner recurrence over the metric
//! closure. For a tree `T` rooted at `r` and a terminal set `X`, the
//! projection `T(X)` is the union of the tree paths from `X` to `r`, and the
//! stretch of `X` is `cost(T(X)) / OPT(X + r)`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Edge, ShortestPathForest, WeightedGraph};
use crate::tree::{RootedForest, SteinerForest};
use crate::weight::{Fraction, Weight};

/// Largest `n` for exhaustive evaluation over all terminal sets.
pub const EXHAUSTIVE_CAP: usize = 12;
/// Largest terminal count accepted by the Dreyfus-Wagner solver.
pub const TERMINAL_CAP: usize = 12;
/// Largest `n` for the subset-enumeration oracle.
pub const ENUMERATION_CAP: usize = 12;

const INF: u128 = u128::MAX / 4;

struct Closure<W> {
    forests: Vec<ShortestPathForest<W>>,
    dist: Vec<Vec<u128>>,
}

impl<W: Weight> Closure<W> {
    fn new(g: &WeightedGraph<W>) -> Result<Self> {
        g.require_connected()?;
        let forests: Vec<_> = (0..g.n()).map(|v| g.shortest_path_forest(&[v])).collect();
        let dist = forests
            .iter()
            .map(|f| f.dist.iter().map(|d| d.expect("connected").widen()).collect())
            .collect();
        Ok(Closure { forests, dist })
    }

    fn path(&self, from: usize, to: usize) -> Vec<usize> {
        self.forests[from].path_to_root(to).expect("connected")
    }
}

/// Dreyfus-Wagner tables: `dp[S][v]` is the cost of a cheapest tree holding
/// the terminals of bitmask `S` and `v`; `merged[S][v]` is the same with `v`
/// of degree at least two (for `|S| >= 2`).
struct Tables {
    terms: Vec<usize>,
    dp: Vec<Vec<u128>>,
    merged: Vec<Vec<u128>>,
}

fn dreyfus_wagner(dist: &[Vec<u128>], terms: &[usize]) -> Tables {
    let n = dist.len();
    let k = terms.len();
    let full = 1usize << k;
    let mut dp = vec![vec![INF; n]; full];
    let mut merged = vec![vec![INF; n]; full];
    for (i, &t) in terms.iter().enumerate() {
        dp[1 << i] = dist[t].clone();
    }
    for s in 1..full {
        if s.count_ones() < 2 {
            continue;
        }
        let low = s & s.wrapping_neg();
        let rest = s ^ low;
        let mut sub = rest;
        loop {
            let a = sub | low;
            if a != s {
                let (da, db) = (&dp[a], &dp[s ^ a]);
                let m = &mut merged[s];
                for v in 0..n {
                    let c = da[v] + db[v];
                    if c < m[v] {
                        m[v] = c;
                    }
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        let m = &merged[s];
        let row: Vec<u128> = (0..n)
            .map(|v| (0..n).map(|u| m[u].saturating_add(dist[u][v])).min().unwrap_or(INF))
            .collect();
        dp[s] = row;
    }
    Tables {
        terms: terms.to_vec(),
        dp,
        merged,
    }
}

impl Tables {
    fn reconstruct<W: Weight>(&self, c: &Closure<W>, s: usize, v: usize, out: &mut Vec<(usize, usize)>) {
        let n = c.dist.len();
        if s.count_ones() == 1 {
            let t = self.terms[s.trailing_zeros() as usize];
            push_path(&c.path(t, v), out);
            return;
        }
        let target = self.dp[s][v];
        let u = (0..n)
            .find(|&u| self.merged[s][u].saturating_add(c.dist[u][v]) == target)
            .expect("dp value is attained");
        push_path(&c.path(u, v), out);
        let low = s & s.wrapping_neg();
        let rest = s ^ low;
        let mut sub = rest;
        loop {
            let a = sub | low;
            if a != s && self.dp[a][u] + self.dp[s ^ a][u] == self.merged[s][u] {
                self.reconstruct(c, a, u, out);
                self.reconstruct(c, s ^ a, u, out);
                return;
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        unreachable!("merged value is attained by a split");
    }
}

fn push_path(path: &[usize], out: &mut Vec<(usize, usize)>) {
    for pair in path.windows(2) {
        out.push((pair[0].min(pair[1]), pair[0].max(pair[1])));
    }
}

fn normalize(g_n: usize, terminals: &[usize]) -> Result<Vec<usize>> {
    let mut t = terminals.to_vec();
    t.sort_unstable();
    t.dedup();
    if let Some(&v) = t.iter().find(|&&v| v >= g_n) {
        return Err(Error::VertexOutOfRange { vertex: v, n: g_n });
    }
    Ok(t)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SteinerTree<W> {
    pub terminals: Vec<usize>,
    pub cost: u128,
    pub edges: Vec<Edge<W>>,
}

/// Minimum Steiner tree on `terminals` (at most [`TERMINAL_CAP`] + 1).
pub fn opt_steiner<W: Weight>(g: &WeightedGraph<W>, terminals: &[usize]) -> Result<SteinerTree<W>> {
    let t = normalize(g.n(), terminals)?;
    if t.len() > TERMINAL_CAP + 1 {
        return Err(Error::TerminalCapExceeded {
            terminals: t.len(),
            cap: TERMINAL_CAP + 1,
        });
    }
    if t.len() <= 1 {
        return Ok(SteinerTree {
            terminals: t,
            cost: 0,
            edges: Vec::new(),
        });
    }
    let c = Closure::new(g)?;
    let tables = dreyfus_wagner(&c.dist, &t[1..]);
    let full = (1usize << (t.len() - 1)) - 1;
    let cost = tables.dp[full][t[0]];
    let mut pairs = Vec::new();
    tables.reconstruct(&c, full, t[0], &mut pairs);
    pairs.sort_unstable();
    pairs.dedup();
    let edges = prune(g, &pairs, &t);
    let got: u128 = edges.iter().map(|e| e.w.widen()).sum();
    assert_eq!(got, cost, "reconstructed Steiner tree must match its table cost");
    Ok(SteinerTree { terminals: t, cost, edges })
}

/// Spanning tree of the union of `pairs`, stripped of non-terminal leaves.
fn prune<W: Weight>(g: &WeightedGraph<W>, pairs: &[(usize, usize)], terminals: &[usize]) -> Vec<Edge<W>> {
    let n = g.n();
    let union = WeightedGraph::new(n, pairs.iter().map(|&(a, b)| (a, b, g.weight(a, b).expect("graph edge"))))
        .expect("simple");
    let spf = union.shortest_path_forest(&terminals[..1]);
    let mut keep = vec![false; n];
    for &t in terminals {
        keep[t] = true;
    }
    let mut edges = Vec::new();
    for &v in terminals {
        let mut x = v;
        while let Some(p) = spf.parent[x] {
            edges.push(Edge::new(x, p, g.weight(x, p).expect("graph edge")));
            if keep[p] {
                break;
            }
            keep[p] = true;
            x = p;
        }
    }
    edges.sort_unstable_by_key(|e| e.key());
    edges.dedup_by_key(|e| e.key());
    edges
}

/// Minimum Steiner cost by enumerating every vertex superset `U` of the
/// terminals and taking the minimum spanning tree of `G[U]`.
pub fn opt_by_enumeration<W: Weight>(g: &WeightedGraph<W>, terminals: &[usize]) -> Result<u128> {
    let n = g.n();
    if n > ENUMERATION_CAP {
        return Err(Error::TooLarge { n, cap: ENUMERATION_CAP });
    }
    let t = normalize(n, terminals)?;
    if t.len() <= 1 {
        return Ok(0);
    }
    let must: usize = t.iter().map(|&v| 1usize << v).sum();
    let mut edges: Vec<Edge<W>> = g.edges().to_vec();
    edges.sort_unstable_by_key(|e| (e.w, e.u, e.v));
    let mut best: Option<u128> = None;
    for u in 0..(1usize << n) {
        if u & must != must {
            continue;
        }
        let mut dsu: Vec<usize> = (0..n).collect();
        fn find(d: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while d[r] != r {
                r = d[r];
            }
            let mut y = x;
            while d[y] != r {
                let next = d[y];
                d[y] = r;
                y = next;
            }
            r
        }
        let mut cost = 0u128;
        let mut joined = 0;
        for e in &edges {
            if u >> e.u & 1 == 0 || u >> e.v & 1 == 0 {
                continue;
            }
            let (a, b) = (find(&mut dsu, e.u), find(&mut dsu, e.v));
            if a != b {
                dsu[a] = b;
                cost += e.w.widen();
                joined += 1;
            }
        }
        if joined + 1 == u.count_ones() as usize && best.is_none_or(|b| cost < b) {
            best = Some(cost);
        }
    }
    best.ok_or(Error::Disconnected)
}

fn rooted_tree<W: Weight>(g: &WeightedGraph<W>, t: &SteinerForest<W>, root: usize) -> Result<RootedForest<W>> {
    g.check_vertex(root)?;
    let f = t.validate(g)?;
    if f.components() != 1 {
        return Err(Error::NotSpanningTree(format!("{} components", f.components())));
    }
    RootedForest::new(g.n(), &t.edges, &[root])
}

/// Cost of the projection of `t` (rooted at `root`) onto `x + root`.
pub fn projection_cost<W: Weight>(g: &WeightedGraph<W>, t: &SteinerForest<W>, root: usize, x: &[usize]) -> Result<u128> {
    let x = normalize(g.n(), x)?;
    Ok(rooted_tree(g, t, root)?.projection_cost(&x))
}

/// Stretch of one terminal set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SetStretch {
    /// Terminals, root excluded.
    pub set: Vec<usize>,
    pub projection: u128,
    pub opt: u128,
    /// `None` when the projection is positive and the optimum is zero.
    pub ratio: Option<Fraction>,
}

impl SetStretch {
    fn new(set: Vec<usize>, projection: u128, opt: u128) -> Self {
        let ratio = match (projection, opt) {
            (0, 0) => Some(Fraction::new(1, 1)),
            (_, 0) => None,
            (p, o) => Some(Fraction::new(p, o)),
        };
        SetStretch {
            set,
            projection,
            opt,
            ratio,
        }
    }

    fn worse_than(&self, other: &SetStretch) -> bool {
        match (self.ratio, other.ratio) {
            (None, Some(_)) => true,
            (Some(a), Some(b)) => a > b,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StretchReport {
    pub mode: &'static str,
    pub root: usize,
    pub sets: usize,
    pub worst: Option<SetStretch>,
    /// Worst ratio per terminal count `|X|` (index 0 is `|X| = 1`).
    pub by_size: Vec<Option<Fraction>>,
    pub unbounded: bool,
}

impl StretchReport {
    fn new(mode: &'static str, root: usize) -> Self {
        StretchReport {
            mode,
            root,
            sets: 0,
            worst: None,
            by_size: Vec::new(),
            unbounded: false,
        }
    }

    fn record(&mut self, s: SetStretch) {
        self.sets += 1;
        let size = s.set.len();
        if self.by_size.len() < size {
            self.by_size.resize(size, None);
        }
        match s.ratio {
            None => self.unbounded = true,
            Some(r) => {
                let slot = &mut self.by_size[size - 1];
                if slot.is_none_or(|w| r > w) {
                    *slot = Some(r);
                }
            }
        }
        if self.worst.as_ref().is_none_or(|w| s.worse_than(w)) {
            self.worst = Some(s);
        }
    }

    pub fn max(&self) -> Option<Fraction> {
        self.worst.as_ref().and_then(|w| w.ratio)
    }
}

/// Stretch over every non-empty terminal set of `V - root`.
pub fn stretch_exhaustive<W: Weight>(g: &WeightedGraph<W>, t: &SteinerForest<W>, root: usize) -> Result<StretchReport> {
    let n = g.n();
    if n > EXHAUSTIVE_CAP {
        return Err(Error::TooLarge { n, cap: EXHAUSTIVE_CAP });
    }
    let tree = rooted_tree(g, t, root)?;
    let c = Closure::new(g)?;
    let others: Vec<usize> = (0..n).filter(|&v| v != root).collect();
    let tables = dreyfus_wagner(&c.dist, &others);
    let mut report = StretchReport::new("exhaustive", root);
    for s in 1..(1usize << others.len()) {
        let set: Vec<usize> = (0..others.len()).filter(|&i| s >> i & 1 == 1).map(|i| others[i]).collect();
        let proj = tree.projection_cost(&set);
        report.record(SetStretch::new(set, proj, tables.dp[s][root]));
    }
    Ok(report)
}

/// Stretch over `samples` random terminal sets of at most `max_terminals`
/// vertices. Even-numbered samples are uniform; odd-numbered ones grow a
/// farthest-point set from a random start.
pub fn stretch_sampled<W: Weight>(
    g: &WeightedGraph<W>,
    t: &SteinerForest<W>,
    root: usize,
    samples: usize,
    max_terminals: usize,
    seed: u64,
) -> Result<StretchReport> {
    if max_terminals > TERMINAL_CAP {
        return Err(Error::TerminalCapExceeded {
            terminals: max_terminals,
            cap: TERMINAL_CAP,
        });
    }
    let n = g.n();
    let tree = rooted_tree(g, t, root)?;
    let c = Closure::new(g)?;
    let others: Vec<usize> = (0..n).filter(|&v| v != root).collect();
    let mut report = StretchReport::new("sampled", root);
    if others.is_empty() || max_terminals == 0 {
        return Ok(report);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..samples {
        let size = rng.gen_range(1..=max_terminals.min(others.len()));
        let mut set: Vec<usize> = if i % 2 == 0 {
            others.choose_multiple(&mut rng, size).copied().collect()
        } else {
            let mut chosen = vec![*others.choose(&mut rng).expect("non-empty")];
            while chosen.len() < size {
                let far = others
                    .iter()
                    .copied()
                    .filter(|v| !chosen.contains(v))
                    .max_by_key(|&v| {
                        let near = chosen.iter().map(|&x| c.dist[x][v]).min().unwrap_or(INF);
                        (near.min(c.dist[root][v]), std::cmp::Reverse(v))
                    })
                    .expect("enough vertices");
                chosen.push(far);
            }
            chosen
        };
        set.sort_unstable();
        let tables = dreyfus_wagner(&c.dist, &set);
        let opt = tables.dp[(1usize << set.len()) - 1][root];
        let proj = tree.projection_cost(&set);
        report.record(SetStretch::new(set, proj, opt));
    }
    Ok(report)
}

/// `OPT(X)` for every `X` in `sets`, computed with one closure.
pub fn opt_costs<W: Weight>(g: &WeightedGraph<W>, sets: &[Vec<usize>]) -> Result<Vec<u128>> {
    let c = Closure::new(g)?;
    sets.iter()
        .map(|x| {
            let t = normalize(g.n(), x)?;
            if t.len() > TERMINAL_CAP + 1 {
                return Err(Error::TerminalCapExceeded {
                    terminals: t.len(),
                    cap: TERMINAL_CAP + 1,
                });
            }
            if t.len() <= 1 {
                return Ok(0);
            }
            let tables = dreyfus_wagner(&c.dist, &t[1..]);
            Ok(tables.dp[(1usize << (t.len() - 1)) - 1][t[0]])
        })
        .collect()
}
