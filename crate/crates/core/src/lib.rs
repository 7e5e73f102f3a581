//! Construction and certification of graph immersions in highly edge-connected
//! multigraphs.

pub mod budget;
pub mod connectivity;
pub mod decomposition;
mod flow;
pub mod generators;
pub mod graph;
pub mod immersion;
pub mod lifting;
pub mod linegraph;
pub mod oracle;
pub mod packing;
pub mod path;
pub mod script;

pub use connectivity::{ConnectivityError, EdgeCut, PathsOrCut};
pub use graph::{Bridge, BridgeKind, Edge, EdgeId, GraphError, MultiGraph, Subgraph, VertexId};
pub use path::{Path, PathFamily};
pub use script::{LiftingScript, ScriptError, Step};
