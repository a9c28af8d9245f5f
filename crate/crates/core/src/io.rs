//! Text formats for graphs, partitions, hierarchies, trees and separators.
//!
//! Graph edge lists start with optional `#` comment lines, then an `n m`
//! header, then `m` lines `u v w` with non-negative integer weights. A
//! comment `# grid R C` marks a graph produced by the grid generator.
//! Partitions are lines `cid: v1 v2 ...`. Hierarchies are JSON objects
//! `{n, gamma, root, levels}`. Trees are an edge list preceded by a
//! `root r` or `portals v1 v2 ...` line. Separators are lines
//! `group i: v1 ... vk`, one path per line. Writers sort everything, so
//! `read(write(x)) == x` and equal inputs give byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{parse_err, Error, Result};
use crate::graph::Edge;
use crate::partition::{Partition, PartitionHierarchy};
use crate::separator::PathSeparator;
use crate::tree::SteinerForest;
use crate::Graph;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct GraphMeta {
    /// `(rows, cols)` of a generated grid.
    pub grid: Option<(usize, usize)>,
}

pub fn read_file(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn write_file(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Non-comment, non-blank lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn int<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("expected a non-negative integer {what}, found {tok:?}")))
}

fn read_edges<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, last_line: usize) -> Result<Graph> {
    let (hl, header) = lines.next().ok_or_else(|| parse_err(last_line, "missing `n m` header"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 2 {
        return Err(parse_err(hl, "header must be `n m`"));
    }
    let n: usize = int(toks[0], hl, "vertex count")?;
    let m: usize = int(toks[1], hl, "edge count")?;
    let mut edges = Vec::with_capacity(m);
    let mut at = Vec::with_capacity(m);
    let mut last = hl;
    for (ln, l) in lines.by_ref() {
        last = ln;
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() != 3 {
            return Err(parse_err(ln, "edge lines are `u v w`"));
        }
        let u: usize = int(t[0], ln, "endpoint")?;
        let v: usize = int(t[1], ln, "endpoint")?;
        let w: u64 = int(t[2], ln, "weight")?;
        if u >= n || v >= n {
            return Err(parse_err(ln, format!("vertex {} out of range for n = {n}", u.max(v))));
        }
        if u == v {
            return Err(parse_err(ln, format!("self-loop at vertex {u}")));
        }
        edges.push((u, v, w));
        at.push(ln);
    }
    if edges.len() != m {
        return Err(parse_err(last, format!("header promises {m} edges, found {}", edges.len())));
    }
    Graph::new(n, edges.iter().copied()).map_err(|e| match e {
        Error::ParallelEdge(a, b) => {
            let ln = duplicate_line(&edges, &at, a, b);
            parse_err(ln, format!("parallel edge between {a} and {b}"))
        }
        other => other,
    })
}

fn duplicate_line(edges: &[(usize, usize, u64)], at: &[usize], a: usize, b: usize) -> usize {
    edges
        .iter()
        .zip(at)
        .filter(|(&(u, v, _), _)| (u.min(v), u.max(v)) == (a, b))
        .nth(1)
        .map_or(0, |(_, &ln)| ln)
}

pub fn read_graph(text: &str) -> Result<(Graph, GraphMeta)> {
    let mut meta = GraphMeta::default();
    for (i, l) in text.lines().enumerate() {
        if let Some(rest) = l.trim().strip_prefix('#') {
            let t: Vec<&str> = rest.split_whitespace().collect();
            if t.first() == Some(&"grid") {
                if t.len() != 3 {
                    return Err(parse_err(i + 1, "grid comment must be `# grid R C`"));
                }
                meta.grid = Some((int(t[1], i + 1, "row count")?, int(t[2], i + 1, "column count")?));
            }
        }
    }
    let total = text.lines().count();
    let g = read_edges(&mut content_lines(text), total)?;
    if let Some((r, c)) = meta.grid {
        if r * c != g.n() {
            return Err(parse_err(1, format!("grid {r}x{c} does not match n = {}", g.n())));
        }
    }
    Ok((g, meta))
}

fn push_edges(out: &mut String, n: usize, edges: &[Edge<u64>]) {
    let mut sorted = edges.to_vec();
    sorted.sort_unstable_by_key(|e| e.key());
    writeln!(out, "{n} {}", sorted.len()).unwrap();
    for e in sorted {
        writeln!(out, "{} {} {}", e.u, e.v, e.w).unwrap();
    }
}

pub fn write_graph(g: &Graph, meta: &GraphMeta) -> String {
    let mut out = String::new();
    if let Some((r, c)) = meta.grid {
        writeln!(out, "# grid {r} {c}").unwrap();
    }
    push_edges(&mut out, g.n(), g.edges());
    out
}

pub fn read_partition(text: &str) -> Result<Partition> {
    let mut clusters = Vec::new();
    let mut seen_ids = std::collections::BTreeSet::new();
    let mut owner = std::collections::BTreeMap::new();
    for (ln, l) in content_lines(text) {
        let (id, rest) = l.split_once(':').ok_or_else(|| parse_err(ln, "expected `cid: v1 v2 ...`"))?;
        let id: usize = int(id.trim(), ln, "cluster id")?;
        if !seen_ids.insert(id) {
            return Err(parse_err(ln, format!("cluster id {id} repeated")));
        }
        let mut c = Vec::new();
        for tok in rest.split_whitespace() {
            let v: usize = int(tok, ln, "vertex")?;
            if let Some(prev) = owner.insert(v, id) {
                return Err(parse_err(ln, format!("vertex {v} already in cluster {prev}")));
            }
            c.push(v);
        }
        if c.is_empty() {
            return Err(parse_err(ln, format!("cluster {id} is empty")));
        }
        clusters.push(c);
    }
    Partition::new(clusters)
}

pub fn write_partition(p: &Partition) -> String {
    let mut out = String::new();
    for (i, c) in p.clusters().iter().enumerate() {
        let vs: Vec<String> = c.iter().map(usize::to_string).collect();
        writeln!(out, "{i}: {}", vs.join(" ")).unwrap();
    }
    out
}

#[derive(Serialize, Deserialize)]
struct HierarchyFile {
    n: usize,
    gamma: u64,
    root: usize,
    levels: Vec<Vec<Vec<usize>>>,
}

/// Parses a hierarchy and returns it with its declared vertex count.
pub fn read_hierarchy(text: &str) -> Result<(PartitionHierarchy, usize)> {
    let f: HierarchyFile = serde_json::from_str(text).map_err(|e| parse_err(e.line(), e.to_string()))?;
    let levels = f
        .levels
        .into_iter()
        .enumerate()
        .map(|(i, l)| Partition::new(l).map_err(|e| Error::InvalidPartition(format!("level {i}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok((
        PartitionHierarchy {
            levels,
            gamma: f.gamma,
            root: f.root,
        },
        f.n,
    ))
}

pub fn write_hierarchy(h: &PartitionHierarchy, n: usize) -> String {
    let mut out = String::new();
    writeln!(out, "{{").unwrap();
    writeln!(out, "  \"n\": {n},").unwrap();
    writeln!(out, "  \"gamma\": {},", h.gamma).unwrap();
    writeln!(out, "  \"root\": {},", h.root).unwrap();
    writeln!(out, "  \"levels\": [").unwrap();
    for (i, p) in h.levels.iter().enumerate() {
        let sep = if i + 1 == h.levels.len() { "" } else { "," };
        let json = serde_json::to_string(p.clusters()).expect("plain vectors serialize");
        writeln!(out, "    {json}{sep}").unwrap();
    }
    writeln!(out, "  ]").unwrap();
    writeln!(out, "}}").unwrap();
    out
}

pub fn read_tree(text: &str) -> Result<SteinerForest<u64>> {
    let mut lines = content_lines(text);
    let (hl, head) = lines.next().ok_or_else(|| parse_err(1, "missing `root r` or `portals ...` line"))?;
    let mut toks = head.split_whitespace();
    let portals: Vec<usize> = match toks.next() {
        Some("root") => {
            let r: Vec<usize> = toks.map(|t| int(t, hl, "root")).collect::<Result<_>>()?;
            if r.len() != 1 {
                return Err(parse_err(hl, "`root` takes exactly one vertex"));
            }
            r
        }
        Some("portals") => toks.map(|t| int(t, hl, "portal")).collect::<Result<_>>()?,
        _ => return Err(parse_err(hl, "first line must be `root r` or `portals v1 v2 ...`")),
    };
    if portals.is_empty() {
        return Err(parse_err(hl, "no portals listed"));
    }
    let total = text.lines().count();
    let g = read_edges(&mut lines, total)?;
    if let Some(&v) = portals.iter().find(|&&v| v >= g.n()) {
        return Err(parse_err(hl, format!("portal {v} out of range for n = {}", g.n())));
    }
    Ok(SteinerForest::new(g.n(), g.edges().to_vec(), portals))
}

pub fn write_tree(t: &SteinerForest<u64>) -> String {
    let mut out = String::new();
    let ps: Vec<String> = t.portals.iter().map(usize::to_string).collect();
    if t.portals.len() == 1 {
        writeln!(out, "root {}", ps[0]).unwrap();
    } else {
        writeln!(out, "portals {}", ps.join(" ")).unwrap();
    }
    push_edges(&mut out, t.n, &t.edges);
    out
}

pub fn read_separator(text: &str) -> Result<PathSeparator> {
    let mut groups: Vec<Vec<Vec<usize>>> = Vec::new();
    for (ln, l) in content_lines(text) {
        let (head, rest) = l.split_once(':').ok_or_else(|| parse_err(ln, "expected `group i: v1 ... vk`"))?;
        let idx = head
            .trim()
            .strip_prefix("group")
            .ok_or_else(|| parse_err(ln, "expected `group i: v1 ... vk`"))?;
        let i: usize = int(idx.trim(), ln, "group index")?;
        if i == 0 || i > groups.len() + 1 {
            return Err(parse_err(ln, format!("group {i} out of order")));
        }
        let path: Vec<usize> = rest.split_whitespace().map(|t| int(t, ln, "vertex")).collect::<Result<_>>()?;
        if path.is_empty() {
            return Err(parse_err(ln, "empty path"));
        }
        if i > groups.len() {
            groups.push(Vec::new());
        }
        groups[i - 1].push(path);
    }
    Ok(PathSeparator { groups })
}

pub fn write_separator(s: &PathSeparator) -> String {
    let mut out = String::new();
    for (i, group) in s.groups.iter().enumerate() {
        for path in group {
            let vs: Vec<String> = path.iter().map(usize::to_string).collect();
            writeln!(out, "group {}: {}", i + 1, vs.join(" ")).unwrap();
        }
    }
    out
}

/// Vertex list given inline as `0,4,7` or as a whitespace-separated file.
pub fn read_vertex_list(arg: &str) -> Result<Vec<usize>> {
    let inline = arg
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>();
    match inline {
        Ok(v) => Ok(v),
        Err(_) => {
            let text = read_file(arg)?;
            content_lines(&text)
                .flat_map(|(ln, l)| l.split_whitespace().map(move |t| int(t, ln, "vertex")))
                .collect()
        }
    }
}

/// Graphviz rendering of a forest; portals are drawn as boxes.
pub fn forest_to_dot(t: &SteinerForest<u64>) -> String {
    let mut out = String::from("graph forest {\n");
    for v in 0..t.n {
        let shape = if t.portals.binary_search(&v).is_ok() { "box" } else { "circle" };
        writeln!(out, "  {v} [shape={shape}];").unwrap();
    }
    for e in &t.edges {
        writeln!(out, "  {} -- {} [label=\"{}\"];", e.u, e.v, e.w).unwrap();
    }
    out.push_str("}\n");
    out
}

/// Graphviz rendering of `g` with one subgraph per cluster of `p`.
pub fn partition_to_dot(g: &Graph, p: &Partition) -> String {
    let mut out = String::from("graph partition {\n");
    for (i, c) in p.clusters().iter().enumerate() {
        writeln!(out, "  subgraph cluster_{i} {{").unwrap();
        for v in c {
            writeln!(out, "    {v};").unwrap();
        }
        out.push_str("  }\n");
    }
    for e in g.edges() {
        let style = if p.cluster_of(e.u).is_some() && p.cluster_of(e.u) == p.cluster_of(e.v) {
            "solid"
        } else {
            "dotted"
        };
        writeln!(out, "  {} -- {} [label=\"{}\", style={style}];", e.u, e.v, e.w).unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{generate, GenKind, Weights};

    #[test]
    fn graph_round_trip_is_byte_exact() {
        let g = generate(GenKind::Gnp, 12, 3, Weights { min: 1, max: 9 }).unwrap();
        let text = write_graph(&g, &GraphMeta::default());
        let (h, meta) = read_graph(&text).unwrap();
        assert_eq!(g, h);
        assert_eq!(meta, GraphMeta::default());
        assert_eq!(write_graph(&h, &meta), text);
    }

    #[test]
    fn grid_comment_survives() {
        let g = generate(GenKind::Grid { rows: 2, cols: 3 }, 6, 0, Weights::UNIT).unwrap();
        let meta = GraphMeta { grid: Some((2, 3)) };
        let text = write_graph(&g, &meta);
        assert!(text.starts_with("# grid 2 3\n"));
        assert_eq!(read_graph(&text).unwrap().1, meta);
    }

    #[test]
    fn parse_errors_cite_lines() {
        let err = read_graph("# c\n3 2\n0 1 1\n1 2 1.5\n").unwrap_err();
        assert_eq!(err, Error::Parse { line: 4, msg: "expected a non-negative integer weight, found \"1.5\"".into() });
        assert!(matches!(read_graph("3 2\n0 1 1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(read_graph("2 1\n0 5 1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(read_graph("2 2\n0 1 1\n1 0 2\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(read_graph("3\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn partition_round_trip() {
        let p = Partition::covering(5, vec![vec![4, 2], vec![0], vec![1, 3]]).unwrap();
        let text = write_partition(&p);
        assert_eq!(text, "0: 0\n1: 1 3\n2: 2 4\n");
        assert_eq!(read_partition(&text).unwrap(), p);
        assert!(matches!(read_partition("0: 1\n1: 1\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn hierarchy_round_trip() {
        let h = PartitionHierarchy {
            levels: vec![Partition::singletons(0..3), Partition::whole(vec![0, 1, 2])],
            gamma: 4,
            root: 1,
        };
        let text = write_hierarchy(&h, 3);
        let (back, n) = read_hierarchy(&text).unwrap();
        assert_eq!((back, n), (h, 3));
        assert_eq!(write_hierarchy(&read_hierarchy(&text).unwrap().0, 3), text);
        assert!(matches!(read_hierarchy("{\n\"n\": 3,\n oops"), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn tree_round_trip() {
        let t = SteinerForest::new(3, vec![Edge::new(2, 1, 4), Edge::new(0, 1, 1)], vec![0]);
        let text = write_tree(&t);
        assert_eq!(text, "root 0\n3 2\n0 1 1\n1 2 4\n");
        assert_eq!(read_tree(&text).unwrap(), t);
        let f = SteinerForest::new(3, vec![Edge::new(0, 1, 1)], vec![0, 2]);
        assert_eq!(read_tree(&write_tree(&f)).unwrap(), f);
    }

    #[test]
    fn separator_round_trip() {
        let s = PathSeparator {
            groups: vec![vec![vec![3, 4, 5]], vec![vec![1], vec![7, 8]]],
        };
        let text = write_separator(&s);
        assert_eq!(read_separator(&text).unwrap(), s);
        assert!(matches!(read_separator("group 2: 1\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn inline_vertex_lists() {
        assert_eq!(read_vertex_list("0,4, 7").unwrap(), vec![0, 4, 7]);
    }
}
