//! Average-case 2-coloring of bipartite k-uniform hypergraphs.
//!
//! The crate provides an immutable hypergraph type with the degree
//! primitives the solvers need, seeded random models, two polynomial solvers
//! (a joint-degree threshold solver and a regularity-based solver) with
//! exhaustive fallbacks, structural verifiers and a benchmark harness.
//!
//! Vertices are 0-based inside the library; the text formats are 1-based.

pub mod bench;
pub mod elem;
pub mod error;
pub mod exact;
pub mod exhaustive;
pub mod hypergraph;
pub mod io;
pub mod models;
pub mod par;
pub mod regbip;
pub mod regularity;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
pub use hypergraph::{Bipartition, Hypergraph, Side, Vertex, VertexSet};
pub use par::Exec;
