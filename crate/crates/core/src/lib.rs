//! Dominating Set parameterized above a maximal r-independent set `X`:
//! exact solvers, the residual-set dynamic program, kernelization rules and
//! reduction gadgets that generate structured instances.
//!
//! Vertex ids are `0..n` everywhere in the API; the text formats in
//! [`format`] use 1-based ids.

pub mod classes;
pub mod dp;
pub mod error;
pub mod format;
pub mod generators;
pub mod graph;
pub mod instance;
pub mod kernel;
pub mod oracle;

pub use error::{Error, Result, Violation};
pub use graph::{is_dominating, neighborhood, Graph, GraphBuilder, Vertex, VertexSet};
pub use instance::{greedy_maximal_r_independent, is_r_independent, Instance, ResidualDecomposition};
pub use oracle::{ds_exact, Solution};
