//! Small-scale search for a cycle joining two rails of a block.
//!
//! A block is a graph whose boundary is a matching cut: entry edges e_1..e_w and exit
//! edges f_1..f_w, each pendant (its outer end has degree one). A rail system is w
//! vertex-disjoint paths, rail i running through e_i and f_i. The search looks for a
//! rail system and a cycle that shares no edge with any rail but meets two different
//! rails. Exhaustive over rail systems, so only usable on tiny blocks.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::budget::SearchBudget;
use crate::connectivity::internally_disjoint_paths;
use crate::graph::{EdgeId, MultiGraph, VertexId};
use crate::path::Path;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RailsBlock {
    pub graph: MultiGraph,
    pub entries: Vec<EdgeId>,
    pub exits: Vec<EdgeId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RailsCycle {
    /// Rail i runs from the outer end of entry i to the outer end of exit i.
    pub rails: Vec<Path>,
    /// Closed walk: first vertex equals last.
    pub cycle: Path,
    /// Indices of two rails the cycle meets.
    pub meets: (usize, usize),
}

impl RailsBlock {
    /// (outer, inner) ends of a pendant boundary edge.
    fn ends(&self, e: EdgeId) -> Option<(VertexId, VertexId)> {
        let rec = self.graph.edge(e)?;
        if self.graph.degree(rec.u) == 1 {
            Some((rec.u, rec.v))
        } else if self.graph.degree(rec.v) == 1 {
            Some((rec.v, rec.u))
        } else {
            None
        }
    }

    /// The block without its boundary edges and their outer ends.
    fn interior(&self) -> Option<MultiGraph> {
        let mut h = self.graph.clone();
        for &e in self.entries.iter().chain(&self.exits) {
            let (outer, _) = self.ends(e)?;
            h.remove_vertex(outer).ok()?;
        }
        Some(h)
    }
}

/// Rail system plus rail-joining cycle, or `None` when there is none or the budget
/// runs out. Returns `None` for malformed blocks (boundary edges not pendant, or
/// entry and exit counts differing).
pub fn rails_cycle_search(block: &RailsBlock, budget: SearchBudget) -> Option<RailsCycle> {
    let w = block.entries.len();
    if w < 2 || block.exits.len() != w {
        return None;
    }
    let interior = block.interior()?;
    let mut meter = budget.start();
    let mut rails: Vec<Path> = Vec::with_capacity(w);
    let mut used = BTreeSet::new();
    search(block, &interior, &mut rails, &mut used, &mut meter)
}

fn search(
    block: &RailsBlock,
    interior: &MultiGraph,
    rails: &mut Vec<Path>,
    used: &mut BTreeSet<VertexId>,
    meter: &mut crate::budget::Meter,
) -> Option<RailsCycle> {
    if !meter.tick() {
        return None;
    }
    let i = rails.len();
    if i == block.entries.len() {
        return joining_cycle(interior, rails);
    }
    let (o1, a) = block.ends(block.entries[i])?;
    let (o2, b) = block.ends(block.exits[i])?;
    if used.contains(&a) || used.contains(&b) {
        return None;
    }
    for core in simple_paths(interior, a, b, used) {
        let head = Path::from_walk(&block.graph, o1, &[block.entries[i]]).ok()?;
        let tail = Path::from_walk(&block.graph, b, &[block.exits[i]]).ok()?;
        let rail = head.concat(&core).concat(&tail);
        debug_assert_eq!(rail.end(), o2);
        used.extend(core.vertices.iter().copied());
        rails.push(rail);
        let found = search(block, interior, rails, used, meter);
        let rail = rails.pop().unwrap();
        for v in &rail.vertices {
            used.remove(v);
        }
        if found.is_some() {
            return found;
        }
        if meter.exhausted() {
            return None;
        }
    }
    None
}

fn joining_cycle(interior: &MultiGraph, rails: &[Path]) -> Option<RailsCycle> {
    let rail_edges: BTreeSet<EdgeId> = rails.iter().flat_map(|p| p.edges.iter().copied()).collect();
    let free = interior.without_edges(&rail_edges);
    for s in 0..rails.len() {
        for t in s + 1..rails.len() {
            for &a in rails[s].internal_vertices() {
                for &b in rails[t].internal_vertices() {
                    let two = internally_disjoint_paths(&free, a, b, 2);
                    if two.len() == 2 {
                        let cycle = two[0].concat(&two[1].reversed());
                        return Some(RailsCycle { rails: rails.to_vec(), cycle, meets: (s, t) });
                    }
                }
            }
        }
    }
    None
}

/// All vertex-simple a–b paths avoiding `blocked` vertices.
fn simple_paths(g: &MultiGraph, a: VertexId, b: VertexId, blocked: &BTreeSet<VertexId>) -> Vec<Path> {
    fn dfs(g: &MultiGraph, b: VertexId, blocked: &BTreeSet<VertexId>, cur: &mut Path, out: &mut Vec<Path>) {
        let x = cur.end();
        if x == b {
            out.push(cur.clone());
            return;
        }
        for e in g.incident(x).collect::<Vec<_>>() {
            let y = g.edge(e).unwrap().other(x).unwrap();
            if blocked.contains(&y) || cur.contains_vertex(y) {
                continue;
            }
            cur.vertices.push(y);
            cur.edges.push(e);
            dfs(g, b, blocked, cur, out);
            cur.vertices.pop();
            cur.edges.pop();
        }
    }
    let mut out = Vec::new();
    dfs(g, b, blocked, &mut Path::trivial(a), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 2x3 ladder on 0..6 (top 0,2,4; bottom 1,3,5) with pendant ends 6..10, and
    /// optionally a second copy of the middle rung.
    fn ladder_block(double_middle: bool) -> RailsBlock {
        let mut edges = vec![(0, 2), (2, 4), (1, 3), (3, 5), (0, 1), (2, 3), (4, 5)];
        edges.extend([(6, 0), (7, 1), (4, 8), (5, 9)]);
        if double_middle {
            edges.push((2, 3));
        }
        let graph = MultiGraph::from_edge_list(10, &edges).unwrap();
        RailsBlock { graph, entries: vec![EdgeId(7), EdgeId(8)], exits: vec![EdgeId(9), EdgeId(10)] }
    }

    #[test]
    fn plain_ladder_has_no_joining_cycle() {
        // the only rail system is the two sides; the rungs left over form a forest
        assert!(rails_cycle_search(&ladder_block(false), SearchBudget::default()).is_none());
    }

    #[test]
    fn doubled_rung_closes_a_cycle() {
        let block = ladder_block(true);
        let found = rails_cycle_search(&block, SearchBudget::default()).unwrap();
        assert_eq!(found.meets, (0, 1));
        assert_eq!(found.cycle.start(), found.cycle.end());
        assert_eq!(found.cycle.len(), 2);
        let cyc: BTreeSet<_> = found.cycle.edges.iter().collect();
        assert_eq!(cyc, BTreeSet::from([&EdgeId(5), &EdgeId(11)]));
        for rail in &found.rails {
            rail.check_in(&block.graph).unwrap();
            assert!(rail.edges.iter().all(|e| !cyc.contains(e)));
        }
        let v0: BTreeSet<_> = found.rails[0].vertices.iter().collect();
        assert!(found.rails[1].vertices.iter().all(|v| !v0.contains(v)));
    }

    #[test]
    fn tiny_budget_gives_up() {
        assert!(rails_cycle_search(&ladder_block(true), SearchBudget::new(1, 1000)).is_none());
    }

    #[test]
    fn rejects_non_pendant_boundary() {
        let mut block = ladder_block(true);
        block.entries[0] = EdgeId(0);
        assert!(rails_cycle_search(&block, SearchBudget::default()).is_none());
    }
}
