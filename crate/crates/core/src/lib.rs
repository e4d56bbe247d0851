//! Perfect `K_{h,h,h}`-tilings of balanced tripartite graphs.
//!
//! The modules are layered: [`graph`] and [`format`] hold the data model,
//! [`pattern`] and [`constructions`] generate graphs, [`solver`] decides small
//! instances with checkable certificates, [`structure`] finds extremal shapes
//! and [`tiler`] holds the constructive subroutines and the staged [`tiler::solve`].
//!
//! ```
//! use tritile::graph::TripartiteGraph;
//! use tritile::tiler::{solve, SolveConfig, SolveOutcome};
//!
//! let report = solve(&TripartiteGraph::complete(6), 2, &SolveConfig::default()).unwrap();
//! assert_eq!(report.outcome, SolveOutcome::Factor);
//! ```

pub mod checks;
pub mod constructions;
pub mod factor;
pub mod format;
pub mod graph;
pub mod matching;
pub mod pattern;
pub mod solver;
pub mod structure;
pub mod tiler;

// The guide's listings run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/constructions.md")]
    mod constructions {}
    #[doc = include_str!("../../../book/src/solving.md")]
    mod solving {}
    #[doc = include_str!("../../../book/src/structure.md")]
    mod structure {}
    #[doc = include_str!("../../../book/src/tiling.md")]
    mod tiling {}
}
