//! Construction and exact verification of z-Šoltés digraphs: digraphs whose
//! total distance drops by exactly `z` when any single vertex is deleted.
//!
//! The crate is organised bottom-up:
//!
//! * [`digraph`] builds circulant `D(n, S)` digraphs, rule-based mixtures of
//!   difference sets, and arbitrary arc lists.
//! * [`distance`] holds exact BFS-based distance computations.
//! * [`deletion`] computes every vertex's deletion delta in one pass using
//!   per-source dominator trees.
//! * [`soltes`] decides the z-Šoltés property and runs the structural checks.
//! * [`formulas`] evaluates the closed forms for `D(n, [m])`.
//! * [`construct`] searches for z-Šoltés circulants and rebuilds the order-3306 example.
//! * [`structure`] runs colour refinement and bipartiteness tests.
//! * [`io`] reads and writes edge lists, JSON specs and DOT.
//! * [`generate`] draws seeded random digraphs for sweeps and tests.

pub mod construct;
pub mod deletion;
pub mod digraph;
pub mod distance;
pub mod error;
pub mod formulas;
pub mod generate;
pub mod io;
mod progress;
pub mod soltes;
pub mod structure;

pub use digraph::{
    build_circulant, build_rule_digraph, degree_stats, delete_vertex, CirculantSpec, DegreeStats,
    Digraph, Rule, RuleSpec, Selector,
};
pub use error::{Result, SoltesError};
pub use progress::ProgressFn;

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));
