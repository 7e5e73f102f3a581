//! Root recovery: a multigraph H with L(H) equal to a given simple graph.
//!
//! A root corresponds to a family of cliques covering every edge with each vertex in
//! at most two cliques (the stars of H). The search grows cliques from the first
//! uncovered edge: extend a clique at one end by the other end, or open a new clique
//! on the edge.

use std::collections::BTreeSet;

use super::{check_simple, LineGraphError};
use crate::graph::{EdgeId, MultiGraph, VertexId};

pub const DEFAULT_ROOT_CEILING: usize = 60;

const NODE_LIMIT: u64 = 5_000_000;

struct Search<'a> {
    g: &'a MultiGraph,
    edges: Vec<(VertexId, VertexId)>,
    cliques: Vec<BTreeSet<VertexId>>,
    member: std::collections::BTreeMap<VertexId, Vec<usize>>,
    nodes: u64,
}

impl Search<'_> {
    fn covered(&self, a: VertexId, b: VertexId) -> bool {
        self.member[&a].iter().any(|c| self.cliques[*c].contains(&b))
    }

    fn fits(&self, c: usize, x: VertexId) -> bool {
        self.member[&x].len() < 2 && self.cliques[c].iter().all(|&y| !self.g.edges_between(x, y).is_empty())
    }

    fn join(&mut self, c: usize, x: VertexId) {
        self.cliques[c].insert(x);
        self.member.get_mut(&x).unwrap().push(c);
    }

    fn leave(&mut self, c: usize, x: VertexId) {
        self.cliques[c].remove(&x);
        self.member.get_mut(&x).unwrap().pop();
    }

    fn run(&mut self, mut idx: usize) -> Result<bool, LineGraphError> {
        self.nodes += 1;
        if self.nodes > NODE_LIMIT {
            return Err(LineGraphError::SearchLimit(NODE_LIMIT));
        }
        while idx < self.edges.len() && self.covered(self.edges[idx].0, self.edges[idx].1) {
            idx += 1;
        }
        let Some(&(a, b)) = self.edges.get(idx) else { return Ok(true) };
        for (x, y) in [(a, b), (b, a)] {
            for c in self.member[&x].clone() {
                if self.fits(c, y) {
                    self.join(c, y);
                    if self.run(idx + 1)? {
                        return Ok(true);
                    }
                    self.leave(c, y);
                }
            }
        }
        if self.member[&a].len() < 2 && self.member[&b].len() < 2 {
            let c = self.cliques.len();
            self.cliques.push(BTreeSet::new());
            self.join(c, a);
            self.join(c, b);
            if self.run(idx + 1)? {
                return Ok(true);
            }
            self.leave(c, b);
            self.leave(c, a);
            self.cliques.pop();
        }
        Ok(false)
    }
}

/// [`root_graph_with_ceiling`] with the default ceiling of 60 vertices.
pub fn root_graph(g: &MultiGraph) -> Result<MultiGraph, LineGraphError> {
    root_graph_with_ceiling(g, DEFAULT_ROOT_CEILING)
}

/// Some H with L(H) = g. Edge `x` of H stands for vertex `x` of `g`, so
/// `H.line_graph()` has exactly the adjacencies of `g`. Parallel edges in H are
/// allowed. `g` must be simple and connected.
pub fn root_graph_with_ceiling(g: &MultiGraph, ceiling: usize) -> Result<MultiGraph, LineGraphError> {
    check_simple(g)?;
    if g.vertex_count() > ceiling {
        return Err(LineGraphError::TooLarge { size: g.vertex_count(), ceiling });
    }
    if g.vertex_count() == 0 || !g.is_connected() {
        return Err(LineGraphError::Disconnected);
    }
    let mut edges: Vec<(VertexId, VertexId)> = g.edges().map(|e| (e.u.min(e.v), e.u.max(e.v))).collect();
    edges.sort();
    let mut search = Search { g, edges, cliques: Vec::new(), member: g.vertices().map(|v| (v, Vec::new())).collect(), nodes: 0 };
    if !search.run(0)? {
        return Err(LineGraphError::NotALineGraph);
    }
    let mut h = MultiGraph::with_vertices(search.cliques.len() as u32);
    for v in g.vertices() {
        let ends: Vec<VertexId> = search.member[&v].iter().map(|&c| VertexId(c as u32)).collect();
        let (x, y) = match ends[..] {
            [x, y] => (x, y),
            [x] => (x, h.add_fresh_vertex()),
            _ => (h.add_fresh_vertex(), h.add_fresh_vertex()),
        };
        h.insert_edge(EdgeId(v.0), x, y).map_err(|e| LineGraphError::Internal(e.to_string()))?;
    }
    Ok(h)
}
