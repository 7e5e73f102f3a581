//! Edge-disjoint tree packings and the C_{t,r} pipeline built on them.

mod comb;
mod gauge;
mod pipeline;
mod spanning;
mod steiner;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeId, MultiGraph, VertexId};
use crate::path::Path;

pub use comb::{comb_or_star, longest_marked_path, verify_comb_structure, CombKind, CombStructure};
pub use gauge::{gauge_augment, gauge_augment_longest, GaugeCase, GaugeOutcome};
pub use pipeline::{find_ctr, find_ctr_rooted, find_ctr_traced, CtrRun};
pub use spanning::pack_spanning_trees;
pub use steiner::{pack_steiner_trees, SteinerOutcome};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PackingError {
    #[error("no {wanted} edge-disjoint spanning trees: {}", .witness)]
    Infeasible { wanted: usize, witness: PartitionWitness },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("only {marked} marked vertices, no structure with {t} of them")]
    TooFewMarked { marked: usize, t: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("internal error: {0}")]
    Internal(String),
}

/// Vertex partition crossed by fewer than s(|P| − 1) edges, which rules out s
/// edge-disjoint spanning trees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PartitionWitness {
    pub classes: Vec<BTreeSet<VertexId>>,
    pub crossing: usize,
    /// s(|P| − 1).
    pub required: usize,
}

impl std::fmt::Display for PartitionWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} classes crossed by {} edges, need {}", self.classes.len(), self.crossing, self.required)
    }
}

impl PartitionWitness {
    /// Recount the crossing edges and compare with s(|P| − 1).
    pub fn check(&self, g: &MultiGraph, s: usize) -> bool {
        let mut class_of = BTreeMap::new();
        for (i, c) in self.classes.iter().enumerate() {
            for &v in c {
                if class_of.insert(v, i).is_some() {
                    return false;
                }
            }
        }
        if class_of.len() != g.vertex_count() {
            return false;
        }
        let crossing = g.edges().filter(|e| class_of[&e.u] != class_of[&e.v]).count();
        crossing == self.crossing && crossing < s * (self.classes.len().saturating_sub(1))
    }
}

/// Pairwise edge-disjoint trees, each containing every vertex of `spanned`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TreePacking {
    pub trees: Vec<BTreeSet<EdgeId>>,
    pub spanned: BTreeSet<VertexId>,
}

/// Vertices of an edge set.
pub(crate) fn edge_vertices(g: &MultiGraph, edges: &BTreeSet<EdgeId>) -> BTreeSet<VertexId> {
    edges.iter().filter_map(|&e| g.edge(e)).flat_map(|r| [r.u, r.v]).collect()
}

/// Check that `edges` form a tree (acyclic, connected) containing all of `must`.
pub fn check_tree(g: &MultiGraph, edges: &BTreeSet<EdgeId>, must: &BTreeSet<VertexId>) -> Result<(), String> {
    let verts = edge_vertices(g, edges);
    if edges.is_empty() {
        if must.len() <= 1 {
            return Ok(());
        }
        return Err(format!("empty tree cannot hold {} vertices", must.len()));
    }
    let mut parent: BTreeMap<VertexId, VertexId> = verts.iter().map(|&v| (v, v)).collect();
    fn find(p: &mut BTreeMap<VertexId, VertexId>, x: VertexId) -> VertexId {
        let mut r = x;
        while p[&r] != r {
            r = p[&r];
        }
        let mut y = x;
        while p[&y] != r {
            let next = p[&y];
            p.insert(y, r);
            y = next;
        }
        r
    }
    for &e in edges {
        let rec = g.edge(e).ok_or_else(|| format!("unknown edge {e}"))?;
        let (a, b) = (find(&mut parent, rec.u), find(&mut parent, rec.v));
        if a == b {
            return Err(format!("edge {e} closes a cycle"));
        }
        parent.insert(a, b);
    }
    if edges.len() + 1 != verts.len() {
        return Err("edge set is disconnected".into());
    }
    if let Some(v) = must.iter().find(|v| !parent.contains_key(v)) {
        return Err(format!("tree misses {v}"));
    }
    Ok(())
}

/// Pairwise edge-disjointness plus [`check_tree`] for every tree.
pub fn verify_packing(g: &MultiGraph, packing: &TreePacking) -> Result<(), String> {
    let mut owner: BTreeMap<EdgeId, usize> = BTreeMap::new();
    for (i, t) in packing.trees.iter().enumerate() {
        for &e in t {
            if let Some(j) = owner.insert(e, i) {
                return Err(format!("edge {e} is in trees {j} and {i}"));
            }
        }
        check_tree(g, t, &packing.spanned).map_err(|m| format!("tree {i}: {m}"))?;
    }
    Ok(())
}

/// The unique path between `a` and `b` in the forest `edges`.
pub fn tree_path(g: &MultiGraph, edges: &BTreeSet<EdgeId>, a: VertexId, b: VertexId) -> Option<Path> {
    if a == b {
        return Some(Path::trivial(a));
    }
    let mut adj: BTreeMap<VertexId, Vec<(EdgeId, VertexId)>> = BTreeMap::new();
    for &e in edges {
        let r = g.edge(e)?;
        adj.entry(r.u).or_default().push((e, r.v));
        adj.entry(r.v).or_default().push((e, r.u));
    }
    let mut pred: BTreeMap<VertexId, (EdgeId, VertexId)> = BTreeMap::new();
    let mut q = VecDeque::from([a]);
    let mut seen = BTreeSet::from([a]);
    while let Some(x) = q.pop_front() {
        if x == b {
            break;
        }
        for &(e, y) in adj.get(&x).into_iter().flatten() {
            if seen.insert(y) {
                pred.insert(y, (e, x));
                q.push_back(y);
            }
        }
    }
    if !seen.contains(&b) {
        return None;
    }
    let mut vertices = vec![b];
    let mut es = Vec::new();
    let mut cur = b;
    while cur != a {
        let (e, p) = pred[&cur];
        es.push(e);
        vertices.push(p);
        cur = p;
    }
    vertices.reverse();
    es.reverse();
    Some(Path { vertices, edges: es })
}
