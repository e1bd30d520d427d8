//! Exact kernelization for d-Hitting Set.
//!
//! Hypergraphs are edge sets over a numbered vertex universe. The crate
//! provides a brute-force hitting-set oracle, sunflower and core operators,
//! pseudo-sunflowers over leveled trees together with their restricted
//! coloring formulation, deterministic color-coding families, and kernels
//! assembled from nested sequences of core hypergraphs.

pub mod colorcoding;
pub mod error;
pub mod generate;
pub mod hypergraph;
pub mod io;
pub mod kernel;
pub mod pseudo;
pub mod restricted_coloring;
pub mod solver;
pub mod sunflower;
pub mod vertex_set;

pub use error::{Error, Result};
pub use hypergraph::{Edge, Hypergraph};
pub use vertex_set::{Vertex, VertexSet};
