//! Desk-scale laboratory for H-tilings under Ore-type degree conditions.
//!
//! The crate provides exact and heuristic H-tiling solvers, critical chromatic
//! number and bottle-graph machinery, maximal clique covers, an exact-rational
//! bounds calculus, the cluster-system decomposition algorithm, and the
//! transfer-digraph leftover-reduction procedure, together with the instance
//! generators and experiment harness that exercise them on small instances.

pub mod bits;
pub mod bounds;
pub mod chromatic;
pub mod cover;
pub mod decomp;
pub mod digraph;
pub mod error;
pub mod gen;
pub mod graph;
pub mod io;
pub mod matching;
pub mod packing;
pub mod pipeline;
pub mod ratio;
pub mod regularity;
pub mod smallgraphs;
pub mod tiling;
pub mod transfer;

pub use error::Error;
pub use graph::Graph;
pub use digraph::Digraph;
pub use ratio::Rational;

/// Hard cap on graph order; all adjacency is fixed-width bit rows.
pub const MAX_VERTICES: usize = 4096;
