//! Greedy packing of edge-disjoint S-trees.
//!
//! Each tree is grown from the smallest vertex of S by repeatedly attaching the
//! nearest unreached vertex of S along a shortest path in the unused edges, then
//! pruned of leaves outside S. When S falls apart in the unused edges, earlier trees
//! trade edges: a tree edge whose ends lie in different unused components is swapped
//! for an unused edge reconnecting the two halves of its tree, whenever that lowers
//! the number of unused components meeting S.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::{edge_vertices, pack_spanning_trees, verify_packing, PackingError, TreePacking};
use crate::graph::{EdgeId, MultiGraph, VertexId};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "status")]
pub enum SteinerOutcome {
    Complete { packing: TreePacking },
    /// Fewer trees than asked for.
    BestEffort { packing: TreePacking, wanted: usize, diagnostics: Vec<String> },
}

impl SteinerOutcome {
    pub fn packing(&self) -> &TreePacking {
        match self {
            SteinerOutcome::Complete { packing } | SteinerOutcome::BestEffort { packing, .. } => packing,
        }
    }

    pub fn is_complete(&self) -> bool {
        matches!(self, SteinerOutcome::Complete { .. })
    }
}

/// `k` edge-disjoint trees each containing `s`, as many as the heuristic finds.
pub fn pack_steiner_trees(g: &MultiGraph, s: &BTreeSet<VertexId>, k: usize) -> Result<SteinerOutcome, PackingError> {
    if s.len() < 2 {
        return Err(PackingError::InvalidInput(format!("terminal set has {} vertices, need at least 2", s.len())));
    }
    if let Some(v) = s.iter().find(|v| !g.has_vertex(**v)) {
        return Err(PackingError::InvalidInput(format!("{v} is not a vertex")));
    }
    let mut diagnostics = Vec::new();
    if s == g.vertex_set() {
        match pack_spanning_trees(g, k) {
            Ok(packing) => return Ok(SteinerOutcome::Complete { packing }),
            Err(PackingError::Infeasible { witness, .. }) => diagnostics.push(format!("spanning packing infeasible: {witness}")),
            Err(e) => return Err(e),
        }
    }
    let mut free: BTreeSet<EdgeId> = g.edge_ids().collect();
    let mut trees: Vec<BTreeSet<EdgeId>> = Vec::new();
    while trees.len() < k {
        let tree = match grow(g, &free, s) {
            Some(t) => t,
            None => {
                let swaps = repair(g, &mut trees, &mut free, s);
                match (swaps > 0).then(|| grow(g, &free, s)).flatten() {
                    Some(t) => {
                        diagnostics.push(format!("tree {} needed {swaps} swaps", trees.len()));
                        t
                    }
                    None => {
                        diagnostics.push(format!(
                            "tree {}: unused edges leave S in {} components after {swaps} swaps",
                            trees.len(),
                            s_components(g, &free, s)
                        ));
                        break;
                    }
                }
            }
        };
        for e in &tree {
            free.remove(e);
        }
        trees.push(tree);
    }
    let packing = TreePacking { trees, spanned: s.clone() };
    verify_packing(g, &packing).map_err(PackingError::Internal)?;
    if packing.trees.len() == k {
        Ok(SteinerOutcome::Complete { packing })
    } else {
        Ok(SteinerOutcome::BestEffort { packing, wanted: k, diagnostics })
    }
}

/// Shortest-path growth in `free` from min(S), pruned to S-leaves.
fn grow(g: &MultiGraph, free: &BTreeSet<EdgeId>, s: &BTreeSet<VertexId>) -> Option<BTreeSet<EdgeId>> {
    let &root = s.first()?;
    let mut in_tree = BTreeSet::from([root]);
    let mut edges = BTreeSet::new();
    while s.iter().any(|v| !in_tree.contains(v)) {
        let mut pred: BTreeMap<VertexId, (EdgeId, VertexId)> = BTreeMap::new();
        let mut q: VecDeque<VertexId> = in_tree.iter().copied().collect();
        let mut seen = in_tree.clone();
        let mut hit = None;
        while let Some(x) = q.pop_front() {
            if s.contains(&x) && !in_tree.contains(&x) {
                hit = Some(x);
                break;
            }
            for e in g.incident(x) {
                if !free.contains(&e) || edges.contains(&e) {
                    continue;
                }
                let y = g.edge(e).unwrap().other(x).unwrap();
                if seen.insert(y) {
                    pred.insert(y, (e, x));
                    q.push_back(y);
                }
            }
        }
        let mut cur = hit?;
        while !in_tree.contains(&cur) {
            let (e, p) = pred[&cur];
            edges.insert(e);
            in_tree.insert(cur);
            cur = p;
        }
    }
    prune(g, &mut edges, s);
    Some(edges)
}

/// Drop leaves outside `s` until none remain.
fn prune(g: &MultiGraph, edges: &mut BTreeSet<EdgeId>, s: &BTreeSet<VertexId>) {
    loop {
        let mut deg: BTreeMap<VertexId, Vec<EdgeId>> = BTreeMap::new();
        for &e in edges.iter() {
            let r = g.edge(e).unwrap();
            deg.entry(r.u).or_default().push(e);
            deg.entry(r.v).or_default().push(e);
        }
        let leaves: Vec<EdgeId> = deg.iter().filter(|(v, es)| es.len() == 1 && !s.contains(v)).map(|(_, es)| es[0]).collect();
        if leaves.is_empty() {
            return;
        }
        for e in leaves {
            edges.remove(&e);
        }
    }
}

fn components(g: &MultiGraph, free: &BTreeSet<EdgeId>) -> BTreeMap<VertexId, usize> {
    let mut comp = BTreeMap::new();
    let mut next = 0;
    for v in g.vertices() {
        if comp.contains_key(&v) {
            continue;
        }
        let reach = g.reachable_from(v, |e| free.contains(&e));
        for x in reach {
            comp.insert(x, next);
        }
        next += 1;
    }
    comp
}

fn s_components(g: &MultiGraph, free: &BTreeSet<EdgeId>, s: &BTreeSet<VertexId>) -> usize {
    let comp = components(g, free);
    s.iter().map(|v| comp[v]).collect::<BTreeSet<_>>().len()
}

/// Edge swaps between earlier trees and the unused edges; returns how many were made.
fn repair(g: &MultiGraph, trees: &mut [BTreeSet<EdgeId>], free: &mut BTreeSet<EdgeId>, s: &BTreeSet<VertexId>) -> usize {
    let mut swaps = 0;
    let mut score = s_components(g, free, s);
    let limit = 4 * g.vertex_count();
    'again: while score > 1 && swaps < limit {
        let comp = components(g, free);
        for j in 0..trees.len() {
            let tree: Vec<EdgeId> = trees[j].iter().copied().collect();
            for &f in &tree {
                let rf = g.edge(f).unwrap();
                if comp[&rf.u] == comp[&rf.v] {
                    continue;
                }
                let mut rest = trees[j].clone();
                rest.remove(&f);
                let side = g.reachable_from(rf.u, |e| rest.contains(&e));
                let verts = edge_vertices(g, &trees[j]);
                for &e in free.iter() {
                    let re = g.edge(e).unwrap();
                    if !(verts.contains(&re.u) && verts.contains(&re.v)) || side.contains(&re.u) == side.contains(&re.v) {
                        continue;
                    }
                    let mut trial = free.clone();
                    trial.remove(&e);
                    trial.insert(f);
                    let new_score = s_components(g, &trial, s);
                    if new_score < score {
                        *free = trial;
                        rest.insert(e);
                        trees[j] = rest;
                        score = new_score;
                        swaps += 1;
                        continue 'again;
                    }
                }
            }
        }
        break;
    }
    swaps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{cycle_multi, grid};

    #[test]
    fn whole_vertex_set_uses_spanning_packing() {
        let g = cycle_multi(3, 5).unwrap();
        let out = pack_steiner_trees(&g, g.vertex_set(), 2).unwrap();
        assert!(out.is_complete());
        assert!(out.packing().trees.iter().all(|t| t.len() == 4));
    }

    #[test]
    fn alternate_vertices_of_tripled_cycle() {
        let g = cycle_multi(3, 8).unwrap();
        let s: BTreeSet<VertexId> = (0..8).step_by(2).map(VertexId).collect();
        let out = pack_steiner_trees(&g, &s, 2).unwrap();
        assert!(out.is_complete(), "{out:?}");
        verify_packing(&g, out.packing()).unwrap();
    }

    #[test]
    fn grid_corners_best_effort() {
        // corners of a grid have degree 2, so at most two trees reach them
        let g = grid(4).unwrap();
        let s = BTreeSet::from([VertexId(0), VertexId(3), VertexId(12), VertexId(15)]);
        let out = pack_steiner_trees(&g, &s, 3).unwrap();
        match &out {
            SteinerOutcome::BestEffort { packing, wanted: 3, diagnostics } => {
                assert!((1..=2).contains(&packing.trees.len()));
                assert!(!diagnostics.is_empty());
            }
            other => panic!("{other:?}"),
        }
        verify_packing(&g, out.packing()).unwrap();
    }

    #[test]
    fn rejects_tiny_terminal_sets() {
        let g = cycle_multi(2, 3).unwrap();
        assert!(pack_steiner_trees(&g, &BTreeSet::from([VertexId(0)]), 1).is_err());
    }
}
