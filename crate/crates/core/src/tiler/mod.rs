//! Tiling heuristics: star families, cluster matchings and the staged
//! solver that combines them with the structure detectors.

mod cluster;
mod packing;
mod part1;
mod pipeline;
mod stars;

pub use cluster::*;
pub use pipeline::*;
pub use stars::*;
