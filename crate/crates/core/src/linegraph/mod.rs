//! Line graphs: minor certificates, the immersion-to-minor transform, root recovery
//! and the high-connectivity analysis.

mod analyze;
mod root;
mod transform;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeId, MultiGraph, VertexId};
use crate::immersion::Violation;

pub use analyze::{analyze_line_graph, AnalysisChecks, LineGraphAnalysis, LineGraphOutcome, Shortcut};
pub use root::{root_graph, root_graph_with_ceiling, DEFAULT_ROOT_CEILING};
pub use transform::{immersion_to_minor, immersion_to_minor_checked};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LineGraphError {
    #[error("graph has parallel edges between {0} and {1}")]
    NotSimple(VertexId, VertexId),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph has {size} vertices, ceiling is {ceiling}")]
    TooLarge { size: usize, ceiling: usize },
    #[error("not a line graph")]
    NotALineGraph,
    #[error("root search gave up after {0} nodes")]
    SearchLimit(u64),
    #[error("invalid immersion certificate: {0}")]
    InvalidCertificate(#[from] Violation),
    #[error("after step {step} the model no longer matches the working line graph: {detail}")]
    StepInvariant { step: usize, detail: String },
    #[error("internal error: {0}")]
    Internal(String),
}

/// Minor model of `pattern` in a host: disjoint connected branch sets and one host
/// edge per pattern edge joining the right branch sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MinorCertificate {
    pub pattern: MultiGraph,
    pub branch_sets: BTreeMap<VertexId, BTreeSet<VertexId>>,
    pub edge_witness: BTreeMap<EdgeId, EdgeId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MinorViolation {
    #[error("pattern vertex {0} has no branch set")]
    MissingBranchSet(VertexId),
    #[error("branch set for {0}, which is not a pattern vertex")]
    StrayBranchSet(VertexId),
    #[error("branch set of {0} is empty")]
    EmptyBranchSet(VertexId),
    #[error("branch set of {vertex} holds {host_vertex}, which is not a host vertex")]
    UnknownHostVertex { vertex: VertexId, host_vertex: VertexId },
    #[error("branch sets of {first} and {second} share {host_vertex}")]
    Overlap { first: VertexId, second: VertexId, host_vertex: VertexId },
    #[error("branch set of {0} is disconnected")]
    Disconnected(VertexId),
    #[error("pattern edge {0} has no witness")]
    MissingWitness(EdgeId),
    #[error("witness given for {0}, which is not a pattern edge")]
    StrayWitness(EdgeId),
    #[error("witness {host_edge} of pattern edge {pattern_edge} is not a host edge")]
    UnknownHostEdge { pattern_edge: EdgeId, host_edge: EdgeId },
    #[error("witness {host_edge} does not join the branch sets of pattern edge {pattern_edge}")]
    WrongWitness { pattern_edge: EdgeId, host_edge: EdgeId },
    #[error("host edge {host_edge} witnesses both {first} and {second}")]
    SharedWitness { host_edge: EdgeId, first: EdgeId, second: EdgeId },
}

impl MinorCertificate {
    /// `g` as a minor of itself with singleton branch sets.
    pub fn identity(g: &MultiGraph) -> Self {
        MinorCertificate {
            pattern: g.clone(),
            branch_sets: g.vertices().map(|v| (v, BTreeSet::from([v]))).collect(),
            edge_witness: g.edge_ids().map(|e| (e, e)).collect(),
        }
    }
}

/// Check disjointness and connectivity of the branch sets and that the edge witnesses
/// are distinct host edges joining the right branch sets. Returns the first problem.
pub fn verify_minor(host: &MultiGraph, cert: &MinorCertificate) -> Result<(), MinorViolation> {
    for v in cert.pattern.vertices() {
        if !cert.branch_sets.contains_key(&v) {
            return Err(MinorViolation::MissingBranchSet(v));
        }
    }
    let mut owner: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    for (&v, set) in &cert.branch_sets {
        if !cert.pattern.has_vertex(v) {
            return Err(MinorViolation::StrayBranchSet(v));
        }
        if set.is_empty() {
            return Err(MinorViolation::EmptyBranchSet(v));
        }
        for &x in set {
            if !host.has_vertex(x) {
                return Err(MinorViolation::UnknownHostVertex { vertex: v, host_vertex: x });
            }
            if let Some(&first) = owner.get(&x) {
                return Err(MinorViolation::Overlap { first, second: v, host_vertex: x });
            }
            owner.insert(x, v);
        }
        if !host.induced(set).is_connected() {
            return Err(MinorViolation::Disconnected(v));
        }
    }
    for &e in cert.edge_witness.keys() {
        if !cert.pattern.has_edge(e) {
            return Err(MinorViolation::StrayWitness(e));
        }
    }
    let mut used: BTreeMap<EdgeId, EdgeId> = BTreeMap::new();
    for pe in cert.pattern.edges() {
        let &he = cert.edge_witness.get(&pe.id).ok_or(MinorViolation::MissingWitness(pe.id))?;
        let rec = host.edge(he).ok_or(MinorViolation::UnknownHostEdge { pattern_edge: pe.id, host_edge: he })?;
        let ends = (owner.get(&rec.u).copied(), owner.get(&rec.v).copied());
        if ends != (Some(pe.u), Some(pe.v)) && ends != (Some(pe.v), Some(pe.u)) {
            return Err(MinorViolation::WrongWitness { pattern_edge: pe.id, host_edge: he });
        }
        if let Some(&first) = used.get(&he) {
            return Err(MinorViolation::SharedWitness { host_edge: he, first, second: pe.id });
        }
        used.insert(he, pe.id);
    }
    Ok(())
}

/// Parallel-edge check for inputs that must be simple graphs.
pub(crate) fn check_simple(g: &MultiGraph) -> Result<(), LineGraphError> {
    let mut seen = BTreeSet::new();
    for e in g.edges() {
        let key = (e.u.min(e.v), e.u.max(e.v));
        if !seen.insert(key) {
            return Err(LineGraphError::NotSimple(key.0, key.1));
        }
    }
    Ok(())
}
