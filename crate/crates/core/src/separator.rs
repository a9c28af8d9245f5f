//! Path separators and the reference oracles.
//!
//! A separator of a connected vertex set `Phi` is a sequence of groups
//! `S_1, ..., S_l` of paths. Every path of `S_j` must be a shortest path
//! between its endpoints in `Phi` minus the earlier groups, and removing all
//! paths must leave components of at most `ceil(|Phi| / 2)` vertices.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::weight::Weight;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathSeparator {
    pub groups: Vec<Vec<Vec<usize>>>,
}

impl PathSeparator {
    pub fn paths(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.groups.iter().flatten()
    }

    pub fn path_count(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    pub fn vertices(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.paths().flatten().copied().collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Computes a path separator of the component `vertices` of `g`.
pub trait SeparatorOracle<W: Weight> {
    fn name(&self) -> &'static str;

    /// Upper bound on the number of paths per separator.
    fn k(&self) -> usize;

    fn separate(&self, g: &WeightedGraph<W>, vertices: &[usize]) -> Result<PathSeparator>;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparatorReport {
    pub paths: usize,
    pub component: usize,
    pub largest_residual: usize,
    pub problems: Vec<String>,
    pub ok: bool,
}

/// Checks a separator of the component `vertices`. `max_paths` caps the
/// total path count when given.
pub fn validate_separator<W: Weight>(
    g: &WeightedGraph<W>,
    vertices: &[usize],
    sep: &PathSeparator,
    max_paths: Option<usize>,
) -> SeparatorReport {
    let n = g.n();
    let mut problems = Vec::new();
    let mut residual = vec![false; n];
    for &v in vertices {
        if v < n {
            residual[v] = true;
        }
    }
    if let Some(k) = max_paths {
        if sep.path_count() > k {
            problems.push(format!("{} paths exceed the cap of {k}", sep.path_count()));
        }
    }
    for (gi, group) in sep.groups.iter().enumerate() {
        for (pi, path) in group.iter().enumerate() {
            let tag = format!("group {} path {}", gi + 1, pi + 1);
            if path.is_empty() {
                problems.push(format!("{tag} is empty"));
                continue;
            }
            if let Some(&v) = path.iter().find(|&&v| v >= n || !residual[v]) {
                problems.push(format!("{tag}: vertex {v} is outside the residual component"));
                continue;
            }
            let mut len = 0u128;
            let mut broken = false;
            for pair in path.windows(2) {
                match g.weight(pair[0], pair[1]) {
                    Some(w) => len += w.widen(),
                    None => {
                        problems.push(format!("{tag}: ({}, {}) is not an edge", pair[0], pair[1]));
                        broken = true;
                        break;
                    }
                }
            }
            if broken {
                continue;
            }
            let (a, b) = (path[0], *path.last().expect("non-empty"));
            let d = g.dist_within(a, b, &residual).map(Weight::widen);
            if d != Some(len) {
                problems.push(format!("{tag} has length {len} but the residual distance is {d:?}"));
            }
        }
        for &v in group.iter().flatten() {
            if v < n {
                residual[v] = false;
            }
        }
    }
    let largest_residual = g.components_within(&residual).iter().map(Vec::len).max().unwrap_or(0);
    let half = vertices.len().div_ceil(2);
    if largest_residual > half {
        problems.push(format!("residual component of {largest_residual} vertices exceeds {half}"));
    }
    SeparatorReport {
        paths: sep.path_count(),
        component: vertices.len(),
        largest_residual,
        ok: problems.is_empty(),
        problems,
    }
}

/// Centroid oracle for forests: a single one-vertex path.
#[derive(Debug, Clone, Copy, Default)]
pub struct TreeOracle;

impl<W: Weight> SeparatorOracle<W> for TreeOracle {
    fn name(&self) -> &'static str {
        "tree"
    }

    fn k(&self) -> usize {
        1
    }

    fn separate(&self, g: &WeightedGraph<W>, vertices: &[usize]) -> Result<PathSeparator> {
        let c = centroid(g, vertices)?;
        Ok(PathSeparator {
            groups: vec![vec![vec![c]]],
        })
    }
}

/// Vertex whose removal leaves the smallest largest component of the tree
/// induced by `vertices`; ties go to the smallest index.
pub fn centroid<W: Weight>(g: &WeightedGraph<W>, vertices: &[usize]) -> Result<usize> {
    let mask = g.mask(vertices);
    let inner = g.edges().iter().filter(|e| mask[e.u] && mask[e.v]).count();
    if vertices.is_empty() || inner + 1 != vertices.len() || g.components_within(&mask).len() != 1 {
        return Err(Error::NotATree);
    }
    let mut sorted = vertices.to_vec();
    sorted.sort_unstable();
    let root = sorted[0];
    // subtree sizes from a traversal rooted at the smallest vertex
    let n = g.n();
    let mut parent = vec![usize::MAX; n];
    let mut order = vec![root];
    parent[root] = root;
    let mut i = 0;
    while i < order.len() {
        let x = order[i];
        i += 1;
        for &(y, _) in g.neighbors(x) {
            if mask[y] && parent[y] == usize::MAX {
                parent[y] = x;
                order.push(y);
            }
        }
    }
    let total = order.len();
    let mut size = vec![1usize; n];
    let mut heaviest = vec![0usize; n];
    for &x in order.iter().rev() {
        if x != root {
            let p = parent[x];
            size[p] += size[x];
            heaviest[p] = heaviest[p].max(size[x]);
        }
    }
    let best = sorted
        .iter()
        .copied()
        .min_by_key(|&v| (heaviest[v].max(total - size[v]), v))
        .expect("non-empty");
    Ok(best)
}

/// Oracle for graphs produced by the grid generator (`rows x cols`, vertex
/// `r * cols + c`). Components must be full sub-rectangles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridOracle {
    pub rows: usize,
    pub cols: usize,
}

impl GridOracle {
    /// Checks that `g` has exactly the edges of a `rows x cols` grid.
    pub fn new<W: Weight>(g: &WeightedGraph<W>, rows: usize, cols: usize) -> Result<Self> {
        if rows * cols != g.n() {
            return Err(Error::NotAGeneratedGrid);
        }
        let mut expected = 0;
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                if c + 1 < cols {
                    expected += 1;
                    if g.weight(v, v + 1).is_none() {
                        return Err(Error::NotAGeneratedGrid);
                    }
                }
                if r + 1 < rows {
                    expected += 1;
                    if g.weight(v, v + cols).is_none() {
                        return Err(Error::NotAGeneratedGrid);
                    }
                }
            }
        }
        if expected != g.edges().len() {
            return Err(Error::NotAGeneratedGrid);
        }
        Ok(GridOracle { rows, cols })
    }

    /// Middle row (or column, when the rectangle is wider than tall) of the
    /// rectangle `vertices`.
    pub fn median_line(&self, vertices: &[usize]) -> Result<Vec<usize>> {
        if vertices.is_empty() {
            return Err(Error::NotAGeneratedGrid);
        }
        let (mut r0, mut r1, mut c0, mut c1) = (usize::MAX, 0, usize::MAX, 0);
        for &v in vertices {
            let (r, c) = (v / self.cols, v % self.cols);
            r0 = r0.min(r);
            r1 = r1.max(r);
            c0 = c0.min(c);
            c1 = c1.max(c);
        }
        let (h, w) = (r1 - r0 + 1, c1 - c0 + 1);
        let mut distinct = vertices.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        if r1 >= self.rows || distinct.len() != h * w {
            return Err(Error::NotAGeneratedGrid);
        }
        Ok(if h >= w {
            let r = r0 + (h - 1) / 2;
            (c0..=c1).map(|c| r * self.cols + c).collect()
        } else {
            let c = c0 + (w - 1) / 2;
            (r0..=r1).map(|r| r * self.cols + c).collect()
        })
    }
}

impl<W: Weight> SeparatorOracle<W> for GridOracle {
    fn name(&self) -> &'static str {
        "grid"
    }

    fn k(&self) -> usize {
        3
    }

    /// Splits the median line greedily into maximal segments, each shortest
    /// in the component minus the earlier segments.
    fn separate(&self, g: &WeightedGraph<W>, vertices: &[usize]) -> Result<PathSeparator> {
        let line = self.median_line(vertices)?;
        let mut residual = g.mask(vertices);
        let mut groups = Vec::new();
        let mut start = 0;
        while start < line.len() {
            let spf = g.shortest_path_forest_within(&[line[start]], &residual);
            let mut end = start;
            let mut len = 0u128;
            while end + 1 < line.len() {
                let w = g.weight(line[end], line[end + 1]).expect("grid edge").widen();
                if spf.dist[line[end + 1]].map(Weight::widen) != Some(len + w) {
                    break;
                }
                len += w;
                end += 1;
            }
            let segment = line[start..=end].to_vec();
            for &v in &segment {
                residual[v] = false;
            }
            groups.push(vec![segment]);
            start = end + 1;
        }
        if groups.len() > 3 {
            return Err(Error::OracleFailure(format!(
                "median line splits into {} shortest segments",
                groups.len()
            )));
        }
        Ok(PathSeparator { groups })
    }
}
