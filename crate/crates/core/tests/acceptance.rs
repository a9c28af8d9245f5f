//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Runs without the libtest harness so the lines always
//! reach the console.

use std::cell::RefCell;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use ustree_core::aggregation::{self, aggregate};
use ustree_core::gen::{generate, random_partition, random_subset, GenKind, Weights};
use ustree_core::general::{self, build_hierarchy, GeneralParams};
use ustree_core::graph::WeightedGraph;
use ustree_core::minorfree::{self, build_hierarchy_minorfree};
use ustree_core::partition::validate_hierarchy;
use ustree_core::pipeline::{run, RunConfig};
use ustree_core::reduction::{measure_delta, UstKind};
use ustree_core::separator::{validate_separator, GridOracle, PathSeparator, SeparatorOracle, TreeOracle};
use ustree_core::splitjoin::{self, build_ust, build_ust_basic, stretch_budget, subtree_connectivity_violations};
use ustree_core::steiner::{opt_by_enumeration, opt_costs, stretch_exhaustive};
use ustree_core::weight::ceil_log2;
use ustree_core::{Fraction, Graph, Result, Weight};

const SIZES: [usize; 5] = [8, 16, 32, 64, 128];
const SEEDS: u64 = 5;
const CORPUS_LIMIT: Duration = Duration::from_secs(120);

struct Outcome {
    ok: bool,
    summary: String,
    failures: Vec<String>,
}

impl Outcome {
    fn new(summary: String, failures: Vec<String>) -> Self {
        Outcome {
            ok: failures.is_empty(),
            summary,
            failures,
        }
    }
}

fn grid_shape(n: usize) -> (usize, usize) {
    let mut r = 1;
    for d in 1..=n {
        if d * d > n {
            break;
        }
        if n.is_multiple_of(d) {
            r = d;
        }
    }
    (r, n / r)
}

fn weights(seed: u64) -> Weights {
    if seed == 0 {
        Weights::UNIT
    } else {
        Weights { min: 1, max: 8 }
    }
}

struct Entry {
    name: String,
    g: Graph,
}

fn corpus(max_n: usize) -> Vec<Entry> {
    let mut out = Vec::new();
    for n in SIZES.into_iter().filter(|&n| n <= max_n) {
        let (rows, cols) = grid_shape(n);
        let kinds = [
            GenKind::Ring,
            GenKind::Path,
            GenKind::Grid { rows, cols },
            GenKind::RandomTree,
            GenKind::Gnp,
            GenKind::Geometric,
        ];
        for kind in kinds {
            for seed in 0..SEEDS {
                let g = generate(kind, n, seed, weights(seed)).expect("corpus graph");
                out.push(Entry {
                    name: format!("{kind} n={n} seed={seed}"),
                    g,
                });
            }
        }
    }
    out
}

fn default_hierarchy(g: &Graph) -> Result<general::GeneralHierarchy> {
    build_hierarchy(g, 0, GeneralParams::default())
}

fn criterion_1(corpus: &[Entry]) -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut clusters = 0usize;
    for e in corpus {
        match default_hierarchy(&e.g) {
            Ok(gh) => {
                let report = validate_hierarchy(&e.g, &gh.hierarchy);
                if !report.ok {
                    failures.push(format!("{}: {:?}", e.name, report.violations));
                }
                let a = general::audit(&e.g, &gh);
                if !a.ok {
                    failures.push(format!(
                        "{}: size {:?} rank {:?} diameter {:?} valence {:?} coarsening {:?}",
                        e.name, a.size_law, a.rank_ceiling, a.diameter_law, a.valence_law, a.coarsening
                    ));
                }
                clusters += gh.raw.iter().map(|l| l.partition.len()).sum::<usize>();
            }
            Err(err) => failures.push(format!("{}: {err}", e.name)),
        }
    }
    let elapsed = start.elapsed();
    if elapsed > CORPUS_LIMIT {
        failures.push(format!("runtime {:.1}s exceeds {}s", elapsed.as_secs_f64(), CORPUS_LIMIT.as_secs()));
    }
    Outcome::new(
        format!(
            "{} graphs, {clusters} clusters checked exactly, {:.1}s (limit {}s)",
            corpus.len(),
            elapsed.as_secs_f64(),
            CORPUS_LIMIT.as_secs()
        ),
        failures,
    )
}

fn criterion_2(corpus: &[Entry]) -> Outcome {
    let mut failures = Vec::new();
    let mut checks = 0usize;
    for e in corpus {
        let n = e.g.n();
        let result = default_hierarchy(&e.g).and_then(|gh| {
            let run = build_ust(&e.g, &gh.hierarchy)?;
            Ok((gh, run))
        });
        match result {
            Ok((gh, run)) => {
                let gamma = gh.hierarchy.gamma;
                if (gamma as u128) < 2 * ceil_log2(n as u128) as u128 {
                    failures.push(format!("{}: gamma {gamma} below 2 ceil(log2 n)", e.name));
                }
                let a = splitjoin::audit(&e.g, &gh.hierarchy, &run);
                checks += a.checks;
                if a.cover_skipped {
                    failures.push(format!("{}: portal cover check skipped", e.name));
                }
                if !a.ok {
                    failures.push(format!("{}: {:?}", e.name, &a.breaches[..a.breaches.len().min(3)]));
                }
            }
            Err(err) => failures.push(format!("{}: {err}", e.name)),
        }
    }
    Outcome::new(
        format!("{} graphs, {checks} rank/cover/diameter comparisons, all exact", corpus.len()),
        failures,
    )
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..1 << n).map(move |mask| (0..n).filter(|&v| mask >> v & 1 == 1).collect())
}

fn criterion_3(corpus: &[Entry]) -> Outcome {
    let mut failures = Vec::new();
    let mut worst: Option<(Fraction, u128, String)> = None;
    let mut compared = 0usize;
    for e in corpus.iter().filter(|e| e.g.n() <= 10) {
        let n = e.g.n();
        let result = default_hierarchy(&e.g).and_then(|gh| {
            let run = build_ust(&e.g, &gh.hierarchy)?;
            let stretch = stretch_exhaustive(&e.g, &run.forest, gh.hierarchy.root)?;
            Ok((gh, stretch))
        });
        match result {
            Ok((gh, stretch)) => {
                let report = validate_hierarchy(&e.g, &gh.hierarchy);
                let budget = report
                    .realized_alpha
                    .and_then(|a| stretch_budget(a, report.realized_beta, gh.hierarchy.gamma, n));
                match (stretch.max(), budget, stretch.unbounded) {
                    (Some(r), Some(b), false) if r <= Fraction::new(b, 1) => {
                        if worst.as_ref().is_none_or(|w| r.0 / b > w.0 .0 / w.1) {
                            worst = Some((r, b, e.name.clone()));
                        }
                    }
                    other => failures.push(format!("{}: stretch/budget {other:?}", e.name)),
                }
            }
            Err(err) => failures.push(format!("{}: {err}", e.name)),
        }
        if n <= 8 {
            let sets: Vec<Vec<usize>> = subsets(n).collect();
            match opt_costs(&e.g, &sets) {
                Ok(dw) => {
                    for (x, d) in sets.iter().zip(dw) {
                        compared += 1;
                        match opt_by_enumeration(&e.g, x) {
                            Ok(en) if en == d => {}
                            other => failures.push(format!("{} {x:?}: DW {d} vs enumeration {other:?}", e.name)),
                        }
                    }
                }
                Err(err) => failures.push(format!("{}: {err}", e.name)),
            }
        }
    }
    let worst = worst.map_or("-".into(), |(r, b, name)| format!("{r} of budget {b} on {name}"));
    Outcome::new(
        format!("C = {}, largest stretch {worst}; {compared} terminal sets cross-checked", splitjoin::STRETCH_CONSTANT),
        failures,
    )
}

fn criterion_4() -> Outcome {
    let kinds = [GenKind::Ring, GenKind::Path, GenKind::Gnp, GenKind::Geometric, GenKind::RandomTree];
    let mut failures = Vec::new();
    let mut instances = 0usize;
    for n in [16usize, 32, 64] {
        for i in 0..50u64 {
            let seed = n as u64 * 1000 + i;
            let kind = kinds[i as usize % kinds.len()];
            let g = generate(kind, n, seed, Weights { min: 1, max: 1 + (i % 3) * 4 }).expect("instance graph");
            let p = random_partition(&g, [2, 3, 5, 8, 12][i as usize / 5 % 5], seed + 1);
            let s = random_subset(n, [1, 2, 5, 9, 16][i as usize / 3 % 5], seed + 2);
            instances += 1;
            let name = format!("{kind} n={n} i={i} m={} |S|={}", p.len(), s.len());
            if p.len() < 2 {
                failures.push(format!("{name}: instance has a single cluster"));
                continue;
            }
            match aggregate(&g, &p, &s) {
                Ok(r) => {
                    let a = aggregation::audit(&g, &p, &r);
                    if !a.over_bound.is_empty() {
                        failures.push(format!("{name}: detour over {} at {:?}", a.bound, a.over_bound));
                    }
                    if !a.broken_components.is_empty() {
                        failures.push(format!("{name}: broken coarse clusters {:?}", a.broken_components));
                    }
                    if !a.halving {
                        failures.push(format!("{name}: phases {:?} do not halve", r.phases));
                    }
                    if !a.ok {
                        failures.push(format!("{name}: {a:?}"));
                    }
                }
                Err(err) => failures.push(format!("{name}: {err}")),
            }
        }
    }
    failures.dedup();
    Outcome::new(format!("{instances} instances over n = 16, 32, 64"), failures)
}

/// Wraps an oracle and keeps every separator it returns.
struct Recording<'a, O> {
    inner: &'a O,
    log: RefCell<Vec<(Vec<usize>, PathSeparator)>>,
}

impl<W: Weight, O: SeparatorOracle<W>> SeparatorOracle<W> for Recording<'_, O> {
    fn name(&self) -> &'static str {
        self.inner.name()
    }

    fn k(&self) -> usize {
        self.inner.k()
    }

    fn separate(&self, g: &WeightedGraph<W>, vertices: &[usize]) -> Result<PathSeparator> {
        let sep = self.inner.separate(g, vertices)?;
        self.log.borrow_mut().push((vertices.to_vec(), sep.clone()));
        Ok(sep)
    }
}

fn minorfree_case<O: SeparatorOracle<u64>>(name: &str, g: &Graph, oracle: &O, failures: &mut Vec<String>) -> (usize, usize) {
    let rec = Recording {
        inner: oracle,
        log: RefCell::new(Vec::new()),
    };
    let mh = match build_hierarchy_minorfree(g, 0, &rec, None) {
        Ok(mh) => mh,
        Err(err) => {
            failures.push(format!("{name}: {err}"));
            return (0, 0);
        }
    };
    let report = validate_hierarchy(g, &mh.hierarchy);
    if !report.ok {
        failures.push(format!("{name}: {:?}", report.violations));
    }
    let log = rec.log.into_inner();
    for (phi, sep) in &log {
        let r = validate_separator(g, phi, sep, Some(oracle.k()));
        if !r.ok || r.largest_residual > phi.len().div_ceil(2) {
            failures.push(format!("{name}: separator of {} vertices: {:?}", phi.len(), r.problems));
        }
    }
    let a = minorfree::audit(g, &mh);
    if !a.proximity.is_empty() {
        failures.push(format!("{name}: proximity {:?}", a.proximity));
    }
    if !a.ok {
        failures.push(format!("{name}: {a:?}"));
    }
    let proximity_checks = mh.raw.iter().map(|l| l.paths.len()).sum();
    (log.len(), proximity_checks)
}

fn criterion_5() -> Outcome {
    let mut failures = Vec::new();
    let (mut graphs, mut separators, mut proximity) = (0usize, 0usize, 0usize);
    for kind in [GenKind::Path, GenKind::RandomTree] {
        for n in SIZES {
            for seed in 0..SEEDS {
                let g = generate(kind, n, seed, weights(seed)).expect("tree");
                let (s, p) = minorfree_case(&format!("{kind} n={n} seed={seed}"), &g, &TreeOracle, &mut failures);
                graphs += 1;
                separators += s;
                proximity += p;
            }
        }
    }
    for rows in 1..=8 {
        for cols in rows..=8 {
            for seed in 0..2 {
                let n = rows * cols;
                let g = generate(GenKind::Grid { rows, cols }, n, seed, weights(seed)).expect("grid");
                let name = format!("grid {rows}x{cols} seed={seed}");
                match GridOracle::new(&g, rows, cols) {
                    Ok(o) => {
                        let (s, p) = minorfree_case(&name, &g, &o, &mut failures);
                        separators += s;
                        proximity += p;
                    }
                    Err(err) => failures.push(format!("{name}: {err}")),
                }
                graphs += 1;
            }
        }
    }
    Outcome::new(
        format!("{graphs} graphs, {separators} separators revalidated, {proximity} proximity checks"),
        failures,
    )
}

fn criterion_6(corpus: &[Entry]) -> Outcome {
    let mut failures = Vec::new();
    let mut runs = 0usize;
    let mut deltas = Vec::new();
    for e in corpus.iter().filter(|e| e.g.n() <= 10) {
        for gamma in [1u64, 2, 4] {
            runs += 1;
            let name = format!("{} gamma={gamma}", e.name);
            match measure_delta(&e.g, gamma, 1, 16, |gp, root| UstKind::SplitJoin.run(gp, root)) {
                Ok(r) => {
                    let c = &r.certificate;
                    deltas.push(c.delta_used);
                    if !c.delta_verified {
                        failures.push(format!("{name}: stretch {:?} never bounded by delta", c.measured_stretch));
                    }
                    if c.measured_diameter_max > c.bound_diameter {
                        failures.push(format!("{name}: diameter {} > {}", c.measured_diameter_max, c.bound_diameter));
                    }
                    if c.measured_valence_max as u128 > c.bound_valence {
                        failures.push(format!("{name}: valence {} > {}", c.measured_valence_max, c.bound_valence));
                    }
                }
                Err(err) => failures.push(format!("{name}: {err}")),
            }
        }
    }
    Outcome::new(
        format!(
            "{runs} reductions, measured delta between {} and {}",
            deltas.iter().min().copied().unwrap_or(0),
            deltas.iter().max().copied().unwrap_or(0)
        ),
        failures,
    )
}

fn criterion_7(corpus: &[Entry]) -> Outcome {
    let mut failures = Vec::new();
    let mut clusters = 0usize;
    for e in corpus {
        match default_hierarchy(&e.g).and_then(|gh| Ok((build_ust_basic(&e.g, &gh.hierarchy)?, gh))) {
            Ok((t, gh)) => {
                clusters += gh.hierarchy.levels.iter().map(|p| p.len()).sum::<usize>();
                let bad = subtree_connectivity_violations(&t, &gh.hierarchy);
                if !bad.is_empty() {
                    failures.push(format!("{}: (level, cluster) {bad:?}", e.name));
                }
            }
            Err(err) => failures.push(format!("{}: {err}", e.name)),
        }
    }
    Outcome::new(format!("{} graphs, {clusters} clusters connected in the tree", corpus.len()), failures)
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().expect("temp dir");
    let p = |name: &str| Some(dir.path().join(name).to_string_lossy().into_owned());
    let cfg = |sub: &str| RunConfig {
        subcommand: sub.into(),
        ..RunConfig::default()
    };
    std::fs::write(dir.path().join("p.txt"), "0: 0 1 2 3\n1: 4 5 6 7\n2: 8 9 10 11\n3: 12 13 14 15\n").unwrap();
    let configs = vec![
        RunConfig {
            args: vec!["gnp".into(), "10".into(), "1..9".into()],
            seed: 7,
            out: p("g.txt"),
            ..cfg("gen")
        },
        RunConfig {
            args: vec!["grid".into(), "4x4".into()],
            out: p("grid.txt"),
            ..cfg("gen")
        },
        RunConfig {
            graph: p("g.txt"),
            audit: true,
            out: p("h.json"),
            ..cfg("hierarchy")
        },
        RunConfig {
            graph: p("grid.txt"),
            mode: Some("minorfree".into()),
            audit: true,
            out: p("hg.json"),
            ..cfg("hierarchy")
        },
        RunConfig {
            graph: p("g.txt"),
            hierarchy: p("h.json"),
            audit: true,
            out: p("t.txt"),
            ..cfg("ust")
        },
        RunConfig {
            graph: p("g.txt"),
            hierarchy: p("h.json"),
            portals: Some("0,5,9".into()),
            out: p("f.txt"),
            ..cfg("ust")
        },
        RunConfig {
            graph: p("g.txt"),
            tree: p("t.txt"),
            hierarchy: p("h.json"),
            mode: Some("exhaustive".into()),
            ..cfg("eval")
        },
        RunConfig {
            graph: p("g.txt"),
            tree: p("t.txt"),
            mode: Some("sampled".into()),
            samples: Some(40),
            max_terminals: Some(6),
            seed: 3,
            ..cfg("eval")
        },
        RunConfig {
            graph: p("grid.txt"),
            partition: p("p.txt"),
            portals: Some("1,14".into()),
            out: p("c.txt"),
            ..cfg("aggregate")
        },
        RunConfig {
            graph: p("g.txt"),
            hierarchy: p("h.json"),
            tree: p("t.txt"),
            ..cfg("validate")
        },
        RunConfig {
            graph: p("grid.txt"),
            partition: p("c.txt"),
            ..cfg("validate")
        },
        RunConfig {
            graph: p("g.txt"),
            gamma: Some("2".into()),
            measure_delta: true,
            out: p("r.txt"),
            ..cfg("reduce")
        },
    ];
    let pass = || -> Vec<String> {
        let mut bytes = Vec::new();
        for c in &configs {
            match run(c) {
                Ok(o) => bytes.push(o.report),
                Err(e) => bytes.push(format!("error: {e}")),
            }
            if let Some(out) = &c.out {
                bytes.push(std::fs::read_to_string(out).unwrap_or_default());
            }
        }
        bytes
    };
    let (a, b) = (pass(), pass());
    let mut failures: Vec<String> = a
        .iter()
        .zip(&b)
        .enumerate()
        .filter(|(_, (x, y))| x != y)
        .map(|(i, _)| format!("output {i} differs between runs"))
        .collect();
    failures.extend(a.iter().filter(|x| x.starts_with("error") || x.contains("\"ok\": false")).cloned());
    Outcome::new(format!("{} configs, {} reports and artifacts compared byte for byte", configs.len(), a.len()), failures)
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let all = corpus(usize::MAX);
    type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("general hierarchy laws", Box::new(|| criterion_1(&all))),
        ("split-and-join laws", Box::new(|| criterion_2(&all))),
        ("stretch vs exact oracle", Box::new(|| criterion_3(&all))),
        ("cluster aggregation", Box::new(criterion_4)),
        ("minor-free pipeline", Box::new(criterion_5)),
        ("reduction to partitions", Box::new(|| criterion_6(&all))),
        ("baseline tree connectivity", Box::new(|| criterion_7(&all))),
        ("determinism", Box::new(criterion_8)),
    ];
    let mut ok = true;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        ok &= o.ok;
        println!("{} criterion {} {name}: {}", if o.ok { "PASS" } else { "FAIL" }, i + 1, o.summary);
        for line in o.failures.iter().take(10) {
            println!("    {line}");
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
