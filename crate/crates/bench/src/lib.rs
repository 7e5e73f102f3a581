//! Fixed benchmark instances, shared so that numbers stay comparable across runs.

use immersion_core::generators::{grid, random_k_edge_connected, KConnectedParams};
use immersion_core::MultiGraph;

/// The 7 × 7 grid, which holds a C_{2,5} immersion.
pub fn j7() -> MultiGraph {
    grid(7).expect("valid grid size")
}

/// A 6-edge-connected random multigraph on `n` vertices.
pub fn dense(n: usize) -> MultiGraph {
    random_k_edge_connected(KConnectedParams { n, k: 6, extra_edges: n, max_degree: None }, 0xbe7c)
        .expect("valid generator parameters")
}
