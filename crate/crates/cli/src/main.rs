use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ustree_core::pipeline::{run, RunConfig};

/// Partition hierarchies, universal Steiner trees and their exact checks.
#[derive(Parser)]
#[command(name = "ustree", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph, e.g. `gen ring 8`, `gen grid 3x4 1..9`.
    Gen {
        /// ring, path, grid, gnp, geometric or random_tree.
        kind: String,
        /// Vertex count, or `RxC` for grids.
        size: String,
        /// Inclusive weight range `min..max` (default unit weights).
        weights: Option<String>,
        #[command(flatten)]
        flags: Flags,
    },
    /// Build a partition hierarchy (`--mode general|minorfree`).
    Hierarchy(Flags),
    /// Build a universal Steiner tree or forest (`--mode splitjoin|basic`).
    Ust(Flags),
    /// Aggregate the clusters of a partition around portals.
    Aggregate(Flags),
    /// Measure the stretch of a tree (`--mode exhaustive|sampled`).
    Eval(Flags),
    /// Check hierarchy, partition or tree files against a graph.
    Validate(Flags),
    /// Turn a universal Steiner tree into a partition.
    Reduce {
        #[command(flatten)]
        flags: Flags,
        /// Stretch bound used for the added root edges.
        #[arg(long)]
        delta: Option<u64>,
        /// Measure the stretch exhaustively and iterate delta until it holds.
        #[arg(long)]
        measure_delta: bool,
        /// Inner tree construction: splitjoin or basic.
        #[arg(long)]
        ust: Option<String>,
    },
}

#[derive(Args)]
struct Flags {
    /// Edge-list graph file.
    #[arg(long)]
    graph: Option<String>,
    /// Hierarchy JSON file.
    #[arg(long)]
    hierarchy: Option<String>,
    /// Tree file.
    #[arg(long)]
    tree: Option<String>,
    /// Partition file.
    #[arg(long)]
    partition: Option<String>,
    /// Portal vertices, inline `0,4,7` or a file.
    #[arg(long)]
    portals: Option<String>,
    #[arg(long)]
    root: Option<usize>,
    #[arg(long)]
    k: Option<u32>,
    /// Rational `p/q`.
    #[arg(long)]
    epsilon: Option<String>,
    /// Integer or `auto`.
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    max_terminals: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Artifact output path; `.dot` writes Graphviz where supported.
    #[arg(long)]
    out: Option<String>,
    /// Run the full structural audits.
    #[arg(long)]
    audit: bool,
}

impl Flags {
    fn into_config(self, subcommand: &str) -> RunConfig {
        RunConfig {
            subcommand: subcommand.into(),
            graph: self.graph,
            hierarchy: self.hierarchy,
            tree: self.tree,
            partition: self.partition,
            portals: self.portals,
            root: self.root,
            k: self.k,
            epsilon: self.epsilon,
            gamma: self.gamma,
            mode: self.mode,
            samples: self.samples,
            max_terminals: self.max_terminals,
            seed: self.seed,
            out: self.out,
            audit: self.audit,
            ..RunConfig::default()
        }
    }
}

fn config(cmd: Command) -> RunConfig {
    match cmd {
        Command::Gen {
            kind,
            size,
            weights,
            flags,
        } => RunConfig {
            args: [Some(kind), Some(size), weights].into_iter().flatten().collect(),
            ..flags.into_config("gen")
        },
        Command::Hierarchy(f) => f.into_config("hierarchy"),
        Command::Ust(f) => f.into_config("ust"),
        Command::Aggregate(f) => f.into_config("aggregate"),
        Command::Eval(f) => f.into_config("eval"),
        Command::Validate(f) => f.into_config("validate"),
        Command::Reduce {
            flags,
            delta,
            measure_delta,
            ust,
        } => RunConfig {
            delta,
            measure_delta,
            ust,
            ..flags.into_config("reduce")
        },
    }
}

fn main() -> ExitCode {
    let cfg = config(Cli::parse().command);
    match run(&cfg) {
        Ok(outcome) => {
            print!("{}", outcome.report);
            for c in outcome.failed() {
                eprintln!("check failed: {}: {}", c.name, c.detail.as_deref().unwrap_or(""));
            }
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
