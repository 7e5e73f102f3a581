//! Liftable-pair search and degree reduction by lifting.
//!
//! A pair `{e, f}` at `s` is liftable when lifting it keeps λ(x, y) for every pair
//! x, y ≠ s. When `g` is connected, `s` is not on a cut-edge and deg(s) ≠ 3, such a
//! pair always exists (Mader). Lifting never increases λ between other vertices, so
//! checking λ_after(x, y) ≥ λ_before(x, y) over all pairs is an exact test.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::connectivity::{edge_connectivity_violation, EdgeCut, LambdaTable};
use crate::graph::{EdgeId, MultiGraph, VertexId};
use crate::script::LiftingScript;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftingError {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("liftable-pair hypotheses violated at {vertex}: {reason}")]
    HypothesesViolated { vertex: VertexId, reason: String },
    #[error("no liftable pair at {0}; one always exists at a vertex of degree >= k + 2, so this is a bug")]
    NotFound(VertexId),
    #[error("graph is not {k}-edge-connected (cut of size {})", cut.size())]
    NotKEdgeConnected { k: usize, cut: EdgeCut },
    #[error("degree target must exceed 1, got {0}")]
    InvalidTarget(usize),
}

/// Result of [`reduce_degrees`]: `script` replays the source graph into `reduced`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionResult {
    pub reduced: MultiGraph,
    pub script: LiftingScript,
    pub k: usize,
}

fn check_hypotheses(g: &MultiGraph, s: VertexId) -> Result<(), LiftingError> {
    if !g.has_vertex(s) {
        return Err(LiftingError::UnknownVertex(s));
    }
    let violated = |reason: &str| LiftingError::HypothesesViolated { vertex: s, reason: reason.to_string() };
    if g.degree(s) == 3 {
        return Err(violated("degree 3"));
    }
    if g.degree(s) < 2 {
        return Err(violated("fewer than two incident edges"));
    }
    if !g.is_connected() {
        return Err(violated("graph is disconnected"));
    }
    let cut_edges = g.cut_edges();
    if g.incident(s).any(|e| cut_edges.contains(&e)) {
        return Err(violated("incident to a cut-edge"));
    }
    Ok(())
}

/// True when lifting `{e, f}` at `s` keeps λ(x, y) for all x, y ≠ s.
pub fn is_liftable(g: &MultiGraph, s: VertexId, e: EdgeId, f: EdgeId) -> bool {
    let before = LambdaTable::new(g);
    pair_preserves(g, s, e, f, &before)
}

fn pair_preserves(g: &MultiGraph, s: VertexId, e: EdgeId, f: EdgeId, before: &LambdaTable) -> bool {
    let mut h = g.clone();
    if h.lift_pair_at(e, f, s).is_err() {
        return false;
    }
    // cheapest likely violation first: the far ends of the pair
    let (a, b) = (g.edge(e).unwrap().other(s).unwrap(), g.edge(f).unwrap().other(s).unwrap());
    if a != b && crate::connectivity::lambda_capped(&h, a, b, before.get(a, b)) < before.get(a, b) {
        return false;
    }
    let after = LambdaTable::new(&h);
    let vs: Vec<VertexId> = g.vertices().filter(|&x| x != s).collect();
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            if after.get(vs[i], vs[j]) < before.get(vs[i], vs[j]) {
                return false;
            }
        }
    }
    true
}

/// First liftable pair at `s` in lexicographic edge-id order.
pub fn find_liftable_pair(g: &MultiGraph, s: VertexId) -> Result<(EdgeId, EdgeId), LiftingError> {
    check_hypotheses(g, s)?;
    let before = LambdaTable::new(g);
    find_with_table(g, s, &before)
}

fn find_with_table(g: &MultiGraph, s: VertexId, before: &LambdaTable) -> Result<(EdgeId, EdgeId), LiftingError> {
    let inc: Vec<EdgeId> = g.incident(s).collect();
    for i in 0..inc.len() {
        for j in i + 1..inc.len() {
            if pair_preserves(g, s, inc[i], inc[j], before) {
                return Ok((inc[i], inc[j]));
            }
        }
    }
    Err(LiftingError::NotFound(s))
}

/// Lift pairs until every degree is `k` or `k + 1`, keeping `g` k-edge-connected.
///
/// Repeatedly takes the lowest-id vertex of degree at least `k + 2` and lifts its
/// first liftable pair.
pub fn reduce_degrees(g: &MultiGraph, k: usize) -> Result<ReductionResult, LiftingError> {
    if k < 2 {
        return Err(LiftingError::InvalidTarget(k));
    }
    if let Some(cut) = edge_connectivity_violation(g, k) {
        return Err(LiftingError::NotKEdgeConnected { k, cut });
    }
    let mut h = g.clone();
    let mut script = LiftingScript::new();
    loop {
        let Some(s) = h.vertices().find(|&v| h.degree(v) >= k + 2) else { break };
        let before = LambdaTable::new(&h);
        let (e, f) = find_with_table(&h, s, &before)?;
        script.lift(&mut h, e, f).expect("liftable pair is adjacent");
    }
    Ok(ReductionResult { reduced: h, script, k })
}
