//! Subcommand drivers behind the `ustree` binary.
//!
//! Every run produces a JSON report holding the full [`RunConfig`], the
//! realized parameters and budgets, and one [`Check`] per asserted
//! invariant. Artifacts (graphs, hierarchies, trees, partitions) go to
//! `--out`; a path ending in `.dot` selects Graphviz output where one
//! exists.

use std::path::Path;

use serde::Serialize;

use crate::aggregation::{self, aggregate};
use crate::error::{Error, Result};
use crate::gen::{generate, GenKind, Weights};
use crate::general::{self, build_hierarchy, parse_epsilon, GeneralParams};
use crate::io::{self, GraphMeta};
use crate::minorfree::{self, build_hierarchy_minorfree};
use crate::partition::{validate_hierarchy, validate_partition, PartitionHierarchy};
use crate::reduction::{measure_delta, partition_from_ust, UstKind};
use crate::separator::{GridOracle, SeparatorOracle, TreeOracle};
use crate::splitjoin::{self, build_forest, build_ust, build_ust_basic, mu_respect_check, stretch_budget};
use crate::steiner::{stretch_exhaustive, stretch_sampled, EXHAUSTIVE_CAP, TERMINAL_CAP};
use crate::tree::SteinerForest;
use crate::{Fraction, Graph};

const DEFAULT_SAMPLES: usize = 64;
const DELTA_ROUNDS: usize = 16;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub subcommand: String,
    /// Positional arguments; `gen` takes `kind size [min..max]`.
    pub args: Vec<String>,
    pub graph: Option<String>,
    pub hierarchy: Option<String>,
    pub tree: Option<String>,
    pub partition: Option<String>,
    pub portals: Option<String>,
    pub root: Option<usize>,
    pub k: Option<u32>,
    pub epsilon: Option<String>,
    /// An integer or `auto`.
    pub gamma: Option<String>,
    pub mode: Option<String>,
    pub samples: Option<usize>,
    pub max_terminals: Option<usize>,
    pub seed: u64,
    pub out: Option<String>,
    pub audit: bool,
    pub delta: Option<u64>,
    pub measure_delta: bool,
    pub ust: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn new(name: &str, ok: bool, detail: impl FnOnce() -> String) -> Self {
        Check {
            name: name.into(),
            ok,
            detail: (!ok).then(detail),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    /// Pretty JSON, newline-terminated.
    pub report: String,
    pub checks: Vec<Check>,
    pub ok: bool,
}

impl Outcome {
    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.ok)
    }
}

#[derive(Serialize)]
struct Report<'a, T> {
    config: &'a RunConfig,
    ok: bool,
    checks: &'a [Check],
    result: T,
}

fn finish<T: Serialize>(cfg: &RunConfig, checks: Vec<Check>, result: T) -> Result<Outcome> {
    let ok = checks.iter().all(|c| c.ok);
    let report = Report {
        config: cfg,
        ok,
        checks: &checks,
        result,
    };
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    Ok(Outcome { report: text, checks, ok })
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.subcommand.as_str() {
        "gen" => run_gen(cfg),
        "hierarchy" => run_hierarchy(cfg),
        "ust" => run_ust(cfg),
        "aggregate" => run_aggregate(cfg),
        "eval" => run_eval(cfg),
        "validate" => run_validate(cfg),
        "reduce" => run_reduce(cfg),
        other => Err(Error::Parameter(format!("unknown subcommand {other:?}"))),
    }
}

fn required<'a>(v: &'a Option<String>, flag: &str) -> Result<&'a str> {
    v.as_deref().ok_or_else(|| Error::Parameter(format!("--{flag} is required")))
}

fn load_graph(cfg: &RunConfig) -> Result<(Graph, GraphMeta)> {
    io::read_graph(&io::read_file(required(&cfg.graph, "graph")?)?)
}

fn load_hierarchy(cfg: &RunConfig, g: &Graph) -> Result<PartitionHierarchy> {
    let (h, n) = io::read_hierarchy(&io::read_file(required(&cfg.hierarchy, "hierarchy")?)?)?;
    if n != g.n() {
        return Err(Error::Parameter(format!("hierarchy is for {n} vertices, graph has {}", g.n())));
    }
    Ok(h)
}

fn portals(cfg: &RunConfig) -> Result<Option<Vec<usize>>> {
    cfg.portals.as_deref().map(io::read_vertex_list).transpose()
}

fn gamma(cfg: &RunConfig) -> Result<Option<u64>> {
    match cfg.gamma.as_deref() {
        None | Some("auto") => Ok(None),
        Some(s) => s
            .parse()
            .map(Some)
            .map_err(|_| Error::Parameter(format!("gamma must be an integer or \"auto\", found {s:?}"))),
    }
}

fn mode<'a>(cfg: &'a RunConfig, default: &'a str, allowed: &[&str]) -> Result<&'a str> {
    let m = cfg.mode.as_deref().unwrap_or(default);
    if allowed.contains(&m) {
        Ok(m)
    } else {
        Err(Error::Parameter(format!("unknown mode {m:?}; expected one of {allowed:?}")))
    }
}

fn is_dot(out: &str) -> bool {
    Path::new(out).extension().is_some_and(|e| e == "dot")
}

fn save_tree(cfg: &RunConfig, t: &SteinerForest<u64>) -> Result<()> {
    match cfg.out.as_deref() {
        Some(out) if is_dot(out) => io::write_file(out, &io::forest_to_dot(t)),
        Some(out) => io::write_file(out, &io::write_tree(t)),
        None => Ok(()),
    }
}

fn save_partition(cfg: &RunConfig, g: &Graph, p: &crate::Partition) -> Result<()> {
    match cfg.out.as_deref() {
        Some(out) if is_dot(out) => io::write_file(out, &io::partition_to_dot(g, p)),
        Some(out) => io::write_file(out, &io::write_partition(p)),
        None => Ok(()),
    }
}

fn parse_weights(s: &str) -> Result<Weights> {
    let bad = || Error::Parameter(format!("weight range must be `min..max`, found {s:?}"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let w = Weights {
        min: a.parse().map_err(|_| bad())?,
        max: b.parse().map_err(|_| bad())?,
    };
    if w.min > w.max {
        return Err(bad());
    }
    Ok(w)
}

#[derive(Serialize)]
struct GenResult {
    kind: &'static str,
    n: usize,
    m: usize,
    min_weight: u64,
    max_weight: u64,
    total_weight: u128,
    grid: Option<(usize, usize)>,
}

fn run_gen(cfg: &RunConfig) -> Result<Outcome> {
    let [kind, size, rest @ ..] = cfg.args.as_slice() else {
        return Err(Error::Parameter("gen takes `kind size [min..max]`".into()));
    };
    let weights = match rest {
        [] => Weights::UNIT,
        [w] => parse_weights(w)?,
        _ => return Err(Error::Parameter("gen takes `kind size [min..max]`".into())),
    };
    let (kind, n) = GenKind::parse(kind, size)?;
    let g = generate(kind, n, cfg.seed, weights)?;
    let meta = GraphMeta {
        grid: match kind {
            GenKind::Grid { rows, cols } => Some((rows, cols)),
            _ => None,
        },
    };
    io::write_file(required(&cfg.out, "out")?, &io::write_graph(&g, &meta))?;
    let checks = vec![Check::new("connected", g.is_connected(), || "generated graph is disconnected".into())];
    finish(
        cfg,
        checks,
        GenResult {
            kind: kind.name(),
            n: g.n(),
            m: g.edges().len(),
            min_weight: weights.min,
            max_weight: weights.max,
            total_weight: g.total_weight(),
            grid: meta.grid,
        },
    )
}

#[derive(Serialize)]
struct HierarchyResult<A, B> {
    mode: &'static str,
    root: usize,
    gamma: u64,
    levels: usize,
    diameter: u128,
    alpha_budget: u128,
    beta_budget: u128,
    realized_alpha: Option<u128>,
    realized_beta: usize,
    /// Levels changed by the root padding post-pass.
    padded_levels: Vec<usize>,
    details: A,
    validation: crate::partition::HierarchyReport,
    audit: Option<B>,
}

#[derive(Serialize)]
struct GeneralDetails {
    k: u32,
    epsilon: String,
}

#[derive(Serialize)]
struct MinorFreeDetails {
    oracle: &'static str,
    paths_per_separator: usize,
    lambda: u128,
    depth: u128,
    paths: usize,
    warnings: Vec<String>,
}

fn padded_levels<'a>(built: impl Iterator<Item = &'a crate::Partition>, h: &PartitionHierarchy) -> Vec<usize> {
    built
        .zip(&h.levels)
        .enumerate()
        .filter(|(_, (a, b))| a != b)
        .map(|(i, _)| i)
        .collect()
}

fn validation_check(report: &crate::partition::HierarchyReport) -> Check {
    Check::new("validate_hierarchy", report.ok, || {
        serde_json::to_string(&report.violations).unwrap_or_default()
    })
}

fn law_check(name: &str, v: &[general::LawViolation]) -> Check {
    Check::new(name, v.is_empty(), || serde_json::to_string(v).unwrap_or_default())
}

fn run_hierarchy(cfg: &RunConfig) -> Result<Outcome> {
    let (g, meta) = load_graph(cfg)?;
    let root = cfg.root.unwrap_or(0);
    let gamma = gamma(cfg)?;
    let out = |h: &PartitionHierarchy| match cfg.out.as_deref() {
        Some(out) => io::write_file(out, &io::write_hierarchy(h, g.n())),
        None => Ok(()),
    };
    match mode(cfg, "general", &["general", "minorfree"])? {
        "general" => {
            let epsilon = match cfg.epsilon.as_deref() {
                Some(s) => parse_epsilon(s)?,
                None => GeneralParams::default().epsilon,
            };
            let gh = build_hierarchy(
                &g,
                root,
                GeneralParams {
                    k: cfg.k,
                    epsilon,
                    gamma,
                },
            )?;
            out(&gh.hierarchy)?;
            let validation = validate_hierarchy(&g, &gh.hierarchy);
            let mut checks = vec![validation_check(&validation)];
            let audit = cfg.audit.then(|| general::audit(&g, &gh));
            if let Some(a) = &audit {
                checks.push(law_check("size_law", &a.size_law));
                checks.push(law_check("rank_ceiling", &a.rank_ceiling));
                checks.push(law_check("diameter_law", &a.diameter_law));
                checks.push(law_check("valence_law", &a.valence_law));
                checks.push(law_check("coarsening", &a.coarsening));
            }
            finish(
                cfg,
                checks,
                HierarchyResult {
                    mode: "general",
                    root,
                    gamma: gh.hierarchy.gamma,
                    levels: gh.hierarchy.levels.len(),
                    diameter: gh.diameter,
                    alpha_budget: gh.alpha_budget,
                    beta_budget: gh.beta_budget,
                    realized_alpha: validation.realized_alpha,
                    realized_beta: validation.realized_beta,
                    padded_levels: padded_levels(gh.raw.iter().map(|l| &l.partition), &gh.hierarchy),
                    details: GeneralDetails {
                        k: gh.k,
                        epsilon: gh.epsilon.to_string(),
                    },
                    validation,
                    audit,
                },
            )
        }
        _ => {
            let grid;
            let oracle: &dyn SeparatorOracle<u64> = match meta.grid {
                Some((rows, cols)) => {
                    grid = GridOracle::new(&g, rows, cols)?;
                    &grid
                }
                None if g.is_connected() && g.edges().len() + 1 == g.n() => &TreeOracle,
                None => {
                    return Err(Error::Parameter(
                        "minorfree mode needs a tree or a graph written with a `# grid R C` header".into(),
                    ))
                }
            };
            let mh = build_hierarchy_minorfree(&g, root, oracle, gamma)?;
            out(&mh.hierarchy)?;
            let validation = validate_hierarchy(&g, &mh.hierarchy);
            let mut checks = vec![validation_check(&validation)];
            let audit = cfg.audit.then(|| minorfree::audit(&g, &mh));
            if let Some(a) = &audit {
                checks.push(Check::new("portal_proximity", a.proximity.is_empty(), || {
                    format!("{:?}", a.proximity)
                }));
                checks.push(Check::new("leaders", a.leader_issues.is_empty() && a.shared_leaders.is_empty(), || {
                    format!("issues {:?}, shared {:?}", a.leader_issues, a.shared_leaders)
                }));
                checks.push(Check::new("coarsening", a.coarsening.is_empty(), || format!("{:?}", a.coarsening)));
                checks.push(Check::new("connected_clusters", a.disconnected.is_empty(), || {
                    format!("{:?}", a.disconnected)
                }));
            }
            finish(
                cfg,
                checks,
                HierarchyResult {
                    mode: "minorfree",
                    root,
                    gamma: mh.hierarchy.gamma,
                    levels: mh.hierarchy.levels.len(),
                    diameter: mh.diameter,
                    alpha_budget: mh.alpha_budget,
                    beta_budget: mh.beta_budget,
                    realized_alpha: validation.realized_alpha,
                    realized_beta: validation.realized_beta,
                    padded_levels: padded_levels(mh.raw.iter().map(|l| &l.partition), &mh.hierarchy),
                    details: MinorFreeDetails {
                        oracle: mh.oracle,
                        paths_per_separator: mh.k,
                        lambda: mh.lambda,
                        depth: mh.depth,
                        paths: mh.raw.iter().map(|l| l.paths.len()).sum(),
                        warnings: mh.warnings.clone(),
                    },
                    validation,
                    audit,
                },
            )
        }
    }
}

#[derive(Serialize)]
struct UstResult {
    mode: &'static str,
    portals: Vec<usize>,
    edges: usize,
    cost: u128,
    components: usize,
    mu_respect: Option<splitjoin::MuRespect>,
    connectivity_violations: Vec<(usize, usize)>,
    audit: Option<splitjoin::SplitJoinAudit>,
}

fn run_ust(cfg: &RunConfig) -> Result<Outcome> {
    let (g, _) = load_graph(cfg)?;
    let h = load_hierarchy(cfg, &g)?;
    let portal_set = portals(cfg)?;
    let mode = mode(cfg, "splitjoin", &["splitjoin", "basic"])?;
    let (forest, run) = match (mode, &portal_set) {
        ("basic", Some(_)) => return Err(Error::Parameter("basic mode builds spanning trees only".into())),
        ("basic", None) => (build_ust_basic(&g, &h)?, None),
        (_, Some(s)) => {
            let run = build_forest(&g, s, &h.levels)?;
            (run.forest.clone(), Some(run))
        }
        (_, None) => {
            let run = build_ust(&g, &h)?;
            (run.forest.clone(), Some(run))
        }
    };
    save_tree(cfg, &forest)?;
    let components = forest.validate(&g)?.components();
    let spanning = components == 1 && forest.edges.len() + 1 == g.n();
    let mut checks = vec![Check::new("valid_forest", true, String::new)];
    if portal_set.is_none() {
        checks.push(Check::new("spanning_tree", spanning, || format!("{components} components")));
    }
    let connectivity_violations = if mode == "basic" {
        splitjoin::subtree_connectivity_violations(&forest, &h)
    } else {
        Vec::new()
    };
    if mode == "basic" {
        checks.push(Check::new("cluster_connectivity", connectivity_violations.is_empty(), || {
            format!("(level, cluster) {connectivity_violations:?}")
        }));
    }
    let audit = match (&run, cfg.audit) {
        (Some(run), true) => Some(splitjoin::audit(&g, &h, run)),
        _ => None,
    };
    if let Some(a) = &audit {
        for rule in ["portal_distance", "rank", "favorite_chain", "portal_cover", "cluster_diameter"] {
            let hits: Vec<_> = a.breaches.iter().filter(|b| b.rule == rule).collect();
            checks.push(Check::new(rule, hits.is_empty(), || {
                serde_json::to_string(&hits).unwrap_or_default()
            }));
        }
    }
    let mu_respect = if spanning && cfg.audit {
        Some(mu_respect_check(&g, &forest, &h)?)
    } else {
        None
    };
    finish(
        cfg,
        checks,
        UstResult {
            mode: if mode == "basic" { "basic" } else { "splitjoin" },
            portals: forest.portals.clone(),
            edges: forest.edges.len(),
            cost: forest.cost(),
            components,
            mu_respect,
            connectivity_violations,
            audit,
        },
    )
}

#[derive(Serialize)]
struct AggregateResult {
    clusters: usize,
    portals: Vec<usize>,
    dest: Vec<usize>,
    phases: Vec<usize>,
    max_detour: Option<u128>,
    audit: aggregation::AggregationAudit,
}

fn run_aggregate(cfg: &RunConfig) -> Result<Outcome> {
    let (g, _) = load_graph(cfg)?;
    let p = io::read_partition(&io::read_file(required(&cfg.partition, "partition")?)?)?;
    let mut s = portals(cfg)?.ok_or(Error::EmptyPortals)?;
    s.sort_unstable();
    s.dedup();
    let result = aggregate(&g, &p, &s)?;
    save_partition(cfg, &g, &result.coarse)?;
    let a = aggregation::audit(&g, &p, &result);
    let checks = vec![
        Check::new("detour_bound", a.over_bound.is_empty(), || {
            format!("vertices {:?} exceed {}", a.over_bound, a.bound)
        }),
        Check::new("coarse_components", a.broken_components.is_empty(), || {
            format!("coarse clusters {:?}", a.broken_components)
        }),
        Check::new("phase_halving", a.halving, || format!("phases {:?}", result.phases)),
        Check::new("phase_count", a.phase_count, || format!("phases {:?}", result.phases)),
        Check::new("stopping_rule", a.stopping_rule, String::new),
    ];
    finish(
        cfg,
        checks,
        AggregateResult {
            clusters: p.len(),
            portals: s,
            dest: result.dest.clone(),
            phases: result.phases.clone(),
            max_detour: result.max_detour(),
            audit: a,
        },
    )
}

#[derive(Serialize)]
struct EvalResult {
    mode: &'static str,
    root: usize,
    max_ratio: Option<Fraction>,
    realized_alpha: Option<u128>,
    realized_beta: Option<usize>,
    gamma: Option<u64>,
    budget: Option<u128>,
    mu_respect: Option<splitjoin::MuRespect>,
    stretch: crate::steiner::StretchReport,
}

fn run_eval(cfg: &RunConfig) -> Result<Outcome> {
    let (g, _) = load_graph(cfg)?;
    let t = io::read_tree(&io::read_file(required(&cfg.tree, "tree")?)?)?;
    let root = match (cfg.root, t.portals.as_slice()) {
        (Some(r), _) => r,
        (None, [r]) => *r,
        (None, _) => return Err(Error::Parameter("--root is required for a tree with several portals".into())),
    };
    let default_mode = if g.n() <= EXHAUSTIVE_CAP { "exhaustive" } else { "sampled" };
    let stretch = match mode(cfg, default_mode, &["exhaustive", "sampled"])? {
        "exhaustive" => stretch_exhaustive(&g, &t, root)?,
        _ => {
            let max_terminals = cfg.max_terminals.unwrap_or(TERMINAL_CAP.min(g.n().saturating_sub(1)));
            stretch_sampled(&g, &t, root, cfg.samples.unwrap_or(DEFAULT_SAMPLES), max_terminals, cfg.seed)?
        }
    };
    let max_ratio = stretch.max();
    let mut checks = vec![Check::new("bounded_stretch", !stretch.unbounded, || {
        "positive projection over a zero-cost optimum".into()
    })];
    let mut result = EvalResult {
        mode: stretch.mode,
        root,
        max_ratio,
        realized_alpha: None,
        realized_beta: None,
        gamma: None,
        budget: None,
        mu_respect: None,
        stretch,
    };
    if cfg.hierarchy.is_some() {
        let h = load_hierarchy(cfg, &g)?;
        let report = validate_hierarchy(&g, &h);
        checks.push(validation_check(&report));
        result.realized_alpha = report.realized_alpha;
        result.realized_beta = Some(report.realized_beta);
        result.gamma = Some(h.gamma);
        result.budget = report
            .realized_alpha
            .and_then(|a| stretch_budget(a, report.realized_beta, h.gamma, g.n()));
        if let Some(budget) = result.budget {
            let within = max_ratio.is_none_or(|r| r <= Fraction::new(budget, 1));
            checks.push(Check::new("stretch_budget", within, || {
                format!("max ratio {} exceeds {budget}", max_ratio.map_or("-".into(), |r| r.to_string()))
            }));
        }
        if t.portals.len() == 1 && t.edges.len() + 1 == g.n() {
            result.mu_respect = Some(mu_respect_check(&g, &t, &h)?);
        }
    }
    finish(cfg, checks, result)
}

#[derive(Serialize)]
struct ValidateResult {
    hierarchy: Option<crate::partition::HierarchyReport>,
    partition: Option<crate::partition::PartitionReport>,
    tree_components: Option<usize>,
}

fn run_validate(cfg: &RunConfig) -> Result<Outcome> {
    let (g, _) = load_graph(cfg)?;
    if cfg.hierarchy.is_none() && cfg.partition.is_none() && cfg.tree.is_none() {
        return Err(Error::Parameter("validate needs --hierarchy, --partition or --tree".into()));
    }
    let mut checks = Vec::new();
    let mut result = ValidateResult {
        hierarchy: None,
        partition: None,
        tree_components: None,
    };
    if let Some(path) = &cfg.hierarchy {
        let (h, n) = io::read_hierarchy(&io::read_file(path)?)?;
        checks.push(Check::new("vertex_count", n == g.n(), || {
            format!("hierarchy is for {n} vertices, graph has {}", g.n())
        }));
        let report = validate_hierarchy(&g, &h);
        checks.push(validation_check(&report));
        result.hierarchy = Some(report);
    }
    if let Some(path) = &cfg.partition {
        let p = io::read_partition(&io::read_file(path)?)?;
        let radius = gamma(cfg)?.unwrap_or(1) as u128;
        checks.push(Check::new("partition_covers", p.covers(g.n()), || {
            format!("clusters do not partition 0..{}", g.n())
        }));
        let in_range = p.ground().iter().all(|&v| v < g.n());
        checks.push(Check::new("partition_in_range", in_range, || "vertex out of range".into()));
        if in_range {
            let report = validate_partition(&g, &p, radius);
            checks.push(Check::new("partition_connected", report.disconnected.is_empty(), || {
                format!("disconnected clusters {:?}", report.disconnected)
            }));
            result.partition = Some(report);
        }
    }
    if let Some(path) = &cfg.tree {
        let t = io::read_tree(&io::read_file(path)?)?;
        match t.validate(&g) {
            Ok(f) => {
                checks.push(Check::new("tree", true, String::new));
                result.tree_components = Some(f.components());
            }
            Err(e) => checks.push(Check::new("tree", false, || e.to_string())),
        }
    }
    finish(cfg, checks, result)
}

#[derive(Serialize)]
struct ReduceResult {
    ust: UstKind,
    clusters: usize,
    certificate: crate::reduction::ReductionCertificate,
}

fn run_reduce(cfg: &RunConfig) -> Result<Outcome> {
    let (g, _) = load_graph(cfg)?;
    let gamma = gamma(cfg)?.unwrap_or(1);
    let kind = UstKind::parse(cfg.ust.as_deref().unwrap_or("splitjoin"))?;
    let ust = |gp: &Graph, root: usize| kind.run(gp, root);
    let red = if cfg.measure_delta {
        measure_delta(&g, gamma, cfg.delta.unwrap_or(1), DELTA_ROUNDS, ust)?
    } else {
        let delta = cfg
            .delta
            .ok_or_else(|| Error::Parameter("reduce needs --delta or --measure-delta".into()))?;
        partition_from_ust(&g, gamma, delta, ust)?
    };
    save_partition(cfg, &g, &red.partition)?;
    let c = &red.certificate;
    let mut checks = Vec::new();
    if cfg.measure_delta {
        checks.push(Check::new("delta_verified", c.delta_verified, || {
            format!("stretch {:?} after {DELTA_ROUNDS} rounds", c.measured_stretch.map(|f| f.to_string()))
        }));
    }
    checks.push(Check::new("diameter_bound", c.measured_diameter_max <= c.bound_diameter, || {
        format!("{} > {}", c.measured_diameter_max, c.bound_diameter)
    }));
    checks.push(Check::new("valence_bound", c.measured_valence_max as u128 <= c.bound_valence, || {
        format!("{} > {}", c.measured_valence_max, c.bound_valence)
    }));
    finish(
        cfg,
        checks,
        ReduceResult {
            ust: kind,
            clusters: red.partition.len(),
            certificate: red.certificate.clone(),
        },
    )
}
