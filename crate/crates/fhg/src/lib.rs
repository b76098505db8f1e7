//! Exact solvers for symmetric fractional hedonic games on graphs.
//!
//! An agent's utility in a coalition is the sum of its edge weights to
//! coalition members divided by the coalition size. This crate maximizes
//! either the utilitarian welfare (sum of utilities) or the egalitarian
//! welfare (minimum utility) over all coalition structures, exactly, in
//! arbitrary-precision rational arithmetic.
//!
//! Solvers:
//! - [`oracle`]: brute force over all set partitions (ground truth, small n)
//! - [`block_dp`]: utilitarian optimum on unweighted block graphs via a
//!   dynamic program over the rooted block-cut tree
//! - [`tw_util`] / [`tw_egal`]: utilitarian / egalitarian optimum on weighted
//!   graphs via dynamic programming over a nice tree decomposition
//! - [`vc`]: utilitarian optimum for graphs of small vertex cover number
//!
//! Instance I/O, random generators, and a hardness-instance construction live
//! in [`instances`]; tree decompositions in [`treedecomp`]; method dispatch
//! for the CLI in [`solve`].

pub mod block_dp;
pub mod blockcut;
pub mod error;
pub mod graph;
pub mod instances;
pub mod oracle;
pub mod par;
pub mod rational;
pub mod solve;
pub mod treedecomp;
pub mod tw_egal;
pub mod tw_util;
pub mod vc;

pub use error::FhgError;
pub use graph::{CoalitionStructure, Objective, VertexId, WeightedGraph, WelfareReport};
pub use rational::Rational;
