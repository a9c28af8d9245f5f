//! Strong-diameter partition hierarchies and universal Steiner trees.
//!
//! The crate builds `(alpha, beta, gamma)` partition hierarchies of weighted
//! undirected graphs, turns them into spanning trees with the split-and-join
//! construction, solves cluster aggregation, and checks every output against
//! exact oracles. All arithmetic on weights and bounds is exact.

pub mod aggregation;
pub mod error;
pub mod gen;
pub mod general;
pub mod graph;
pub mod io;
pub mod minorfree;
pub mod partition;
pub mod pipeline;
pub mod reduction;
pub mod separator;
pub mod splitjoin;
pub mod steiner;
pub mod tree;
pub mod weight;

pub use error::{Error, Result};
pub use partition::{Partition, PartitionHierarchy};
pub use tree::SteinerForest;
pub use weight::{Fraction, Weight};

/// Graph with `u64` weights.
pub type Graph = graph::WeightedGraph<u64>;
