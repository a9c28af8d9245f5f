//! Seeded graph generators.
//!
//! Every generator draws from `ChaCha8Rng::seed_from_u64(seed)` (rand_chacha
//! 0.3), so a `(kind, size, seed, weights)` tuple always yields the same edge
//! list on every platform.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::Graph;

const MAX_RETRIES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GenKind {
    Ring,
    Path,
    Grid { rows: usize, cols: usize },
    Gnp,
    Geometric,
    RandomTree,
}

impl GenKind {
    pub fn name(&self) -> &'static str {
        match self {
            GenKind::Ring => "ring",
            GenKind::Path => "path",
            GenKind::Grid { .. } => "grid",
            GenKind::Gnp => "gnp",
            GenKind::Geometric => "geometric",
            GenKind::RandomTree => "random_tree",
        }
    }

    /// Parses a kind and a size: `ring 8`, `grid 3x4`, ...
    pub fn parse(kind: &str, size: &str) -> Result<(GenKind, usize)> {
        let bad = || Error::Parameter(format!("bad size {size:?} for {kind}"));
        if kind == "grid" {
            let (r, c) = size.split_once(['x', 'X']).ok_or_else(bad)?;
            let rows: usize = r.parse().map_err(|_| bad())?;
            let cols: usize = c.parse().map_err(|_| bad())?;
            return Ok((GenKind::Grid { rows, cols }, rows * cols));
        }
        let n: usize = size.parse().map_err(|_| bad())?;
        let k = match kind {
            "ring" => GenKind::Ring,
            "path" => GenKind::Path,
            "gnp" => GenKind::Gnp,
            "geometric" => GenKind::Geometric,
            "random_tree" | "tree" => GenKind::RandomTree,
            _ => return Err(Error::Parameter(format!("unknown generator {kind:?}"))),
        };
        Ok((k, n))
    }
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenKind::Grid { rows, cols } => write!(f, "grid {rows}x{cols}"),
            k => f.write_str(k.name()),
        }
    }
}

impl FromStr for GenKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, size) = s.split_once(' ').unwrap_or((s, "1"));
        GenKind::parse(kind, size).map(|(k, _)| k)
    }
}

/// Inclusive weight range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Weights {
    pub min: u64,
    pub max: u64,
}

impl Weights {
    pub const UNIT: Weights = Weights { min: 1, max: 1 };

    fn draw(&self, rng: &mut ChaCha8Rng) -> u64 {
        rng.gen_range(self.min..=self.max)
    }
}

pub fn generate(kind: GenKind, n: usize, seed: u64, weights: Weights) -> Result<Graph> {
    if n == 0 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    if weights.min > weights.max {
        return Err(Error::Parameter("empty weight range".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        GenKind::Ring => {
            let pairs: Vec<(usize, usize)> = match n {
                1 => vec![],
                2 => vec![(0, 1)],
                _ => (0..n).map(|i| (i, (i + 1) % n)).collect(),
            };
            weigh(n, pairs, weights, &mut rng)
        }
        GenKind::Path => weigh(n, (1..n).map(|i| (i - 1, i)).collect(), weights, &mut rng),
        GenKind::Grid { rows, cols } => {
            if rows * cols != n {
                return Err(Error::Parameter("grid size mismatch".into()));
            }
            let mut pairs = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    let v = r * cols + c;
                    if c + 1 < cols {
                        pairs.push((v, v + 1));
                    }
                    if r + 1 < rows {
                        pairs.push((v, v + cols));
                    }
                }
            }
            weigh(n, pairs, weights, &mut rng)
        }
        GenKind::RandomTree => {
            let pairs = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
            weigh(n, pairs, weights, &mut rng)
        }
        GenKind::Gnp => {
            let p = if n <= 1 {
                1.0
            } else {
                (2.0 * (n as f64).ln() / n as f64).min(1.0)
            };
            retry(n, &mut rng, weights, |rng| {
                let mut pairs = Vec::new();
                for a in 0..n {
                    for b in a + 1..n {
                        if rng.gen_bool(p) {
                            pairs.push((a, b));
                        }
                    }
                }
                pairs
            })
        }
        GenKind::Geometric => {
            let r2 = if n <= 1 { 1.0 } else { 2.0 * (n as f64).ln() / (std::f64::consts::PI * n as f64) };
            retry(n, &mut rng, weights, |rng| {
                let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen(), rng.gen())).collect();
                let mut pairs = Vec::new();
                for a in 0..n {
                    for b in a + 1..n {
                        let (dx, dy) = (pts[a].0 - pts[b].0, pts[a].1 - pts[b].1);
                        if dx * dx + dy * dy <= r2 {
                            pairs.push((a, b));
                        }
                    }
                }
                pairs
            })
        }
    }
}

fn weigh(n: usize, pairs: Vec<(usize, usize)>, weights: Weights, rng: &mut ChaCha8Rng) -> Result<Graph> {
    let edges: Vec<(usize, usize, u64)> = pairs.into_iter().map(|(a, b)| (a, b, weights.draw(rng))).collect();
    Graph::new(n, edges)
}

fn retry(
    n: usize,
    rng: &mut ChaCha8Rng,
    weights: Weights,
    mut sample: impl FnMut(&mut ChaCha8Rng) -> Vec<(usize, usize)>,
) -> Result<Graph> {
    for _ in 0..MAX_RETRIES {
        let pairs = sample(rng);
        let g = weigh(n, pairs, weights, rng)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::RetryExhausted(MAX_RETRIES))
}

/// Random connected partition: clusters grown by breadth-first search from
/// shuffled seeds, each capped at `max_size` vertices.
pub fn random_partition(g: &Graph, max_size: usize, seed: u64) -> crate::Partition {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut label = vec![usize::MAX; n];
    for (id, &s) in order.iter().enumerate() {
        if label[s] != usize::MAX {
            continue;
        }
        let cap = rng.gen_range(1..=max_size.max(1));
        label[s] = id;
        let mut size = 1;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &(y, _) in g.neighbors(x) {
                if size < cap && label[y] == usize::MAX {
                    label[y] = id;
                    size += 1;
                    queue.push_back(y);
                }
            }
        }
    }
    crate::Partition::from_labels(&label)
}

/// Distinct vertices drawn uniformly.
pub fn random_subset(n: usize, count: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(&mut rng);
    all.truncate(count.min(n));
    all.sort_unstable();
    all
}
