//! Light (1+eps)-spanners on graphs of bounded pathwidth.
//!
//! The pipeline: reduce a graph-plus-path-decomposition to a nice,
//! degree-bounded, completed interval form; build a monotone spanning tree;
//! certify a charging scheme from the graph onto the tree; run the greedy
//! spanner with the tree forced in; and lift the result back to the original
//! graph. Every stage produces artifacts that an independent verifier can
//! check, and the weight guarantee `w(G') <= (1 + v/eps) * w(T)` is asserted
//! with the verifier's own `v`.

pub mod charging;
pub mod decomposition;
pub mod error;
pub mod gen;
pub mod graph;
pub mod interval;
pub mod io;
pub mod monotone;
pub mod spanner;

pub use error::{Error, Result};
pub use graph::{DistanceMatrix, Edge, EdgeSubgraph, WeightedGraph};
