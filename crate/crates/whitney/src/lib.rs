//! Cycle matroids, weak isomorphisms and Whitney operations on finite
//! multigraphs and on rayed graphs, where each ray marks one infinite end.

pub mod error;
pub mod fixtures;
pub mod forests;
pub mod graph;
pub mod matroid;
pub mod ops;
pub mod pipeline;
pub mod structure;
pub mod tutte;
pub mod weakiso;

pub use error::{Error, Result};
pub use graph::{EdgeId, EdgeSet, Multigraph, RayId, RayedGraph, VertexId, VertexSet};
