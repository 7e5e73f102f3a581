//! L(C_{t,r}) minors in line graphs of high vertex connectivity.
//!
//! The root H of g is recovered. S is the set of vertices of H with degree at least
//! 15t − 6. If g is (30t − 15)-vertex-connected, two facts are checked on H: S is
//! (15t − 6)-edge-connected and S covers every edge. A failure there means the input
//! does not meet the connectivity argument, and it is reported as such.
//!
//! A vertex of H with degree at least tr gives a K_{tr} clique in g, which holds
//! L(C_{t,r}) directly. Otherwise a C_{t,r} immersion with terminals in S is searched
//! for in H and turned into a minor of L(H) = g.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{check_simple, immersion_to_minor, root_graph, verify_minor, LineGraphError, MinorCertificate};
use crate::budget::SearchBudget;
use crate::connectivity::{internally_disjoint_paths, set_k_edge_connected};
use crate::generators::cycle_multi;
use crate::graph::{MultiGraph, VertexId};
use crate::immersion::ImmersionCertificate;
use crate::packing::{find_ctr, find_ctr_rooted};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AnalysisChecks {
    /// Degree threshold 15t − 6 defining S.
    pub threshold: usize,
    /// Vertex connectivity 30t − 15 under which the checks below must hold.
    pub required_connectivity: usize,
    pub connectivity_met: bool,
    /// `None` when the connectivity requirement is not met.
    pub s_edge_connected: Option<bool>,
    pub s_vertex_cover: Option<bool>,
    pub max_root_degree: usize,
}

/// K_{tr} clique in g from the edges at one root vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Shortcut {
    pub root_vertex: VertexId,
    pub degree: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "status")]
pub enum LineGraphOutcome {
    Clique { certificate: MinorCertificate, shortcut: Shortcut },
    Immersion { certificate: MinorCertificate, immersion: ImmersionCertificate },
    NotFound { stage: String },
}

impl LineGraphOutcome {
    pub fn certificate(&self) -> Option<&MinorCertificate> {
        match self {
            LineGraphOutcome::Clique { certificate, .. } | LineGraphOutcome::Immersion { certificate, .. } => Some(certificate),
            LineGraphOutcome::NotFound { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LineGraphAnalysis {
    pub root: MultiGraph,
    pub s: BTreeSet<VertexId>,
    pub checks: AnalysisChecks,
    pub outcome: LineGraphOutcome,
    pub diagnostics: Vec<String>,
}

/// Whether every pair of non-adjacent vertices is joined by `k` internally disjoint
/// paths and there are more than `k` vertices.
fn vertex_connected(g: &MultiGraph, k: usize) -> bool {
    if g.vertex_count() <= k || g.min_degree() < k {
        return false;
    }
    let vs: Vec<VertexId> = g.vertices().collect();
    for (i, &x) in vs.iter().enumerate() {
        let nb = g.neighbors(x);
        for &y in &vs[i + 1..] {
            if !nb.contains(&y) && internally_disjoint_paths(g, x, y, k).len() < k {
                return false;
            }
        }
    }
    true
}

/// Rewrite a minor of L(root) built on `root.line_graph()` into one on `g`. Both
/// share vertex ids; each line edge becomes the edge of `g` with the same ends.
fn onto_host(g: &MultiGraph, line: &MultiGraph, cert: MinorCertificate) -> Result<MinorCertificate, LineGraphError> {
    let mut edge_witness = BTreeMap::new();
    for (pe, le) in cert.edge_witness {
        let rec = line.edge(le).ok_or_else(|| LineGraphError::Internal(format!("unknown line edge {le}")))?;
        let he = *g.edges_between(rec.u, rec.v).first().ok_or_else(|| LineGraphError::Internal(format!("{} and {} are not adjacent", rec.u, rec.v)))?;
        edge_witness.insert(pe, he);
    }
    Ok(MinorCertificate { pattern: cert.pattern, branch_sets: cert.branch_sets, edge_witness })
}

/// L(C_{t,r}) in the K_{tr} clique formed by the edges at `v`.
fn clique_model(g: &MultiGraph, root: &MultiGraph, v: VertexId, t: usize, r: usize) -> Result<MinorCertificate, LineGraphError> {
    let pattern = cycle_multi(t, r).map_err(|e| LineGraphError::Internal(e.to_string()))?.line_graph().graph;
    let image: BTreeMap<VertexId, VertexId> = pattern.vertices().zip(root.incident(v).map(|e| VertexId(e.0))).collect();
    let branch_sets = image.iter().map(|(&p, &h)| (p, BTreeSet::from([h]))).collect();
    let mut edge_witness = BTreeMap::new();
    for pe in pattern.edges() {
        let he = *g.edges_between(image[&pe.u], image[&pe.v]).first().ok_or_else(|| LineGraphError::Internal("clique edge missing".into()))?;
        edge_witness.insert(pe.id, he);
    }
    Ok(MinorCertificate { pattern, branch_sets, edge_witness })
}

/// Look for an L(C_{t,r}) minor in the line graph `g`.
pub fn analyze_line_graph(g: &MultiGraph, t: usize, r: usize, budget: SearchBudget) -> Result<LineGraphAnalysis, LineGraphError> {
    check_simple(g)?;
    if t == 0 || r < 3 {
        return Err(LineGraphError::Internal(format!("need t >= 1 and r >= 3, got t={t}, r={r}")));
    }
    let root = root_graph(g)?;
    let threshold = 15 * t - 6;
    let required = 30 * t - 15;
    let s: BTreeSet<VertexId> = root.vertices().filter(|&v| root.degree(v) >= threshold).collect();
    let mut diagnostics = Vec::new();
    let connectivity_met = vertex_connected(g, required);
    let (mut s_edge_connected, mut s_vertex_cover) = (None, None);
    if connectivity_met {
        let ec = s.len() >= 2 && set_k_edge_connected(&root, &s, threshold);
        let cover = root.edges().all(|e| s.contains(&e.u) || s.contains(&e.v));
        if !ec {
            diagnostics.push(format!("input precondition: S is not {threshold}-edge-connected in the root"));
        }
        if !cover {
            diagnostics.push("input precondition: S does not cover every root edge".to_string());
        }
        s_edge_connected = Some(ec);
        s_vertex_cover = Some(cover);
    } else {
        diagnostics.push(format!("graph is not {required}-vertex-connected; structural checks skipped"));
    }
    let checks = AnalysisChecks {
        threshold,
        required_connectivity: required,
        connectivity_met,
        s_edge_connected,
        s_vertex_cover,
        max_root_degree: root.max_degree(),
    };

    let hub = root.vertices().filter(|&v| root.degree(v) >= t * r).max_by_key(|&v| (root.degree(v), std::cmp::Reverse(v)));
    let outcome = if let Some(v) = hub {
        let certificate = clique_model(g, &root, v, t, r)?;
        LineGraphOutcome::Clique { certificate, shortcut: Shortcut { root_vertex: v, degree: root.degree(v) } }
    } else {
        let rooted = if s.len() >= r { find_ctr_rooted(&root, &s, t, r, budget) } else { None };
        let found = match rooted {
            Some(c) => Some(c),
            None => {
                diagnostics.push(format!("no C_{{{t},{r}}} with terminals in S (|S| = {}); trying all terminals", s.len()));
                find_ctr(&root, t, r, budget)
            }
        };
        match found {
            Some(immersion) => {
                let line = root.line_graph().graph;
                let minor = immersion_to_minor(&root, &immersion)?;
                LineGraphOutcome::Immersion { certificate: onto_host(g, &line, minor)?, immersion }
            }
            None => LineGraphOutcome::NotFound { stage: format!("no C_{{{t},{r}}} immersion in the root within budget") },
        }
    };
    if let Some(c) = outcome.certificate() {
        verify_minor(g, c).map_err(|v| LineGraphError::Internal(format!("analysis produced an invalid minor: {v}")))?;
    }
    Ok(LineGraphAnalysis { root, s, checks, outcome, diagnostics })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::complete;

    #[test]
    fn line_graph_of_the_pattern() {
        let g = cycle_multi(2, 4).unwrap().line_graph().graph;
        let a = analyze_line_graph(&g, 2, 4, SearchBudget::default()).unwrap();
        assert!(matches!(a.outcome, LineGraphOutcome::Immersion { .. }), "{:?}", a.outcome);
        assert!(!a.checks.connectivity_met);
        verify_minor(&g, a.outcome.certificate().unwrap()).unwrap();
    }

    #[test]
    fn big_clique_takes_the_shortcut() {
        let g = complete(8);
        let a = analyze_line_graph(&g, 2, 4, SearchBudget::default()).unwrap();
        match &a.outcome {
            LineGraphOutcome::Clique { shortcut, certificate } => {
                assert_eq!(shortcut.degree, 8);
                verify_minor(&g, certificate).unwrap();
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tripled_cycle_line_graph() {
        let g = cycle_multi(3, 8).unwrap().line_graph().graph;
        let a = analyze_line_graph(&g, 2, 4, SearchBudget::default()).unwrap();
        assert!(a.outcome.certificate().is_some(), "{:?}", a.diagnostics);
    }

    #[test]
    fn non_line_graphs_are_refused() {
        let claw = MultiGraph::from_edge_list(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(analyze_line_graph(&claw, 1, 3, SearchBudget::default()).unwrap_err(), LineGraphError::NotALineGraph);
    }

    #[test]
    fn vertex_connectivity_of_small_graphs() {
        assert!(vertex_connected(&complete(6), 5));
        assert!(!vertex_connected(&complete(6), 6));
        assert!(vertex_connected(&cycle_multi(1, 7).unwrap(), 2));
        assert!(!vertex_connected(&cycle_multi(1, 7).unwrap(), 3));
    }
}
