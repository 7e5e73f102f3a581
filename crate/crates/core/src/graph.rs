//! Loopless multigraphs with stable edge identities.
//!
//! Every edge carries an [`EdgeId`] that is never reused within the lifetime of a
//! graph value: lifting and contraction allocate fresh ids, so paths and scripts
//! recorded against a graph stay meaningful after it is edited.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("edge {id} would be a loop at {at}")]
    Loop { id: EdgeId, at: VertexId },
    #[error("edge id {0} is already in use")]
    DuplicateEdge(EdgeId),
    #[error("edges {0} and {1} do not share an endpoint")]
    NonAdjacentEdges(EdgeId, EdgeId),
    #[error("cannot lift {0} with itself")]
    SameEdge(EdgeId),
    #[error("edge sequence is not a path: {0}")]
    NotAPath(String),
    #[error("vertex set is empty")]
    EmptySet,
    #[error("not a subgraph: {0}")]
    NotASubgraph(String),
}

/// An undirected edge record. `u` and `v` are always distinct.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub u: VertexId,
    pub v: VertexId,
}

impl Edge {
    pub fn has(&self, x: VertexId) -> bool {
        self.u == x || self.v == x
    }

    /// The endpoint opposite `x`, if `x` is an endpoint.
    pub fn other(&self, x: VertexId) -> Option<VertexId> {
        if self.u == x {
            Some(self.v)
        } else if self.v == x {
            Some(self.u)
        } else {
            None
        }
    }

    /// Endpoints in ascending order.
    pub fn ends(&self) -> (VertexId, VertexId) {
        if self.u <= self.v {
            (self.u, self.v)
        } else {
            (self.v, self.u)
        }
    }
}

/// A loopless multigraph.
#[derive(Clone, Debug, Default)]
pub struct MultiGraph {
    vertices: BTreeSet<VertexId>,
    edges: BTreeMap<EdgeId, Edge>,
    incidence: BTreeMap<VertexId, BTreeSet<EdgeId>>,
    next_edge: u32,
}

impl PartialEq for MultiGraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges
    }
}

impl Eq for MultiGraph {}

/// Result of lifting a pair of edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lift {
    /// The shared vertex the pair was lifted off.
    pub pivot: VertexId,
    /// The new edge, or `None` when the lift would have produced a loop.
    pub created: Option<EdgeId>,
}

/// Explicit subgraph specification: a vertex set and an edge set. Nothing is
/// implied; edges must have both ends in `vertices`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subgraph {
    pub vertices: BTreeSet<VertexId>,
    pub edges: BTreeSet<EdgeId>,
}

impl Subgraph {
    pub fn new(vertices: BTreeSet<VertexId>, edges: BTreeSet<EdgeId>) -> Self {
        Subgraph { vertices, edges }
    }

    /// The subgraph formed by `edges` and their endpoints.
    pub fn from_edges(g: &MultiGraph, edges: impl IntoIterator<Item = EdgeId>) -> Result<Self, GraphError> {
        let mut sub = Subgraph::default();
        for e in edges {
            let rec = g.edge(e).ok_or(GraphError::UnknownEdge(e))?;
            sub.vertices.insert(rec.u);
            sub.vertices.insert(rec.v);
            sub.edges.insert(e);
        }
        Ok(sub)
    }

    pub fn check_in(&self, g: &MultiGraph) -> Result<(), GraphError> {
        for &v in &self.vertices {
            if !g.has_vertex(v) {
                return Err(GraphError::NotASubgraph(format!("vertex {v} not in host")));
            }
        }
        for &e in &self.edges {
            let rec = g
                .edge(e)
                .ok_or_else(|| GraphError::NotASubgraph(format!("edge {e} not in host")))?;
            if !self.vertices.contains(&rec.u) || !self.vertices.contains(&rec.v) {
                return Err(GraphError::NotASubgraph(format!("edge {e} has an endpoint outside the vertex set")));
            }
        }
        Ok(())
    }

    /// Materialise the subgraph as a graph with the host's ids.
    pub fn to_graph(&self, g: &MultiGraph) -> MultiGraph {
        g.subgraph(&self.vertices, &self.edges)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BridgeKind {
    Trivial,
    Nontrivial,
}

/// A Tutte bridge of a subgraph `H` in `G`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bridge {
    pub kind: BridgeKind,
    pub edges: BTreeSet<EdgeId>,
    pub attachments: BTreeSet<VertexId>,
    /// Vertices of the bridge outside `H`; empty for trivial bridges.
    pub nucleus: BTreeSet<VertexId>,
}

/// Line graph together with the edge-to-vertex correspondence.
///
/// The vertex representing edge `e` has the same numeric id as `e`.
#[derive(Clone, Debug)]
pub struct LineGraph {
    pub graph: MultiGraph,
    pub vertex_of: BTreeMap<EdgeId, VertexId>,
    pub edge_of: BTreeMap<VertexId, EdgeId>,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    vertices: Vec<VertexId>,
    edges: Vec<Edge>,
}

impl Serialize for MultiGraph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        GraphRepr {
            vertices: self.vertices.iter().copied().collect(),
            edges: self.edges.values().copied().collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MultiGraph {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = GraphRepr::deserialize(deserializer)?;
        let mut g = MultiGraph::new();
        for v in repr.vertices {
            g.add_vertex(v);
        }
        for e in repr.edges {
            g.insert_edge(e.id, e.u, e.v).map_err(serde::de::Error::custom)?;
        }
        Ok(g)
    }
}

impl MultiGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Graph on vertices `0..n` with no edges.
    pub fn with_vertices(n: u32) -> Self {
        let mut g = Self::new();
        for v in 0..n {
            g.add_vertex(VertexId(v));
        }
        g
    }

    /// Build from an edge list over vertices `0..n`; edge ids follow list order.
    pub fn from_edge_list(n: u32, edges: &[(u32, u32)]) -> Result<Self, GraphError> {
        let mut g = Self::with_vertices(n);
        for &(u, v) in edges {
            g.add_edge(VertexId(u), VertexId(v))?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, v: VertexId) -> bool {
        self.incidence.entry(v).or_default();
        self.vertices.insert(v)
    }

    /// Add a vertex with an id one larger than the current maximum.
    pub fn add_fresh_vertex(&mut self) -> VertexId {
        let v = self.vertices.last().map_or(VertexId(0), |v| VertexId(v.0 + 1));
        self.add_vertex(v);
        v
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<EdgeId, GraphError> {
        let id = EdgeId(self.next_edge);
        self.insert_edge(id, u, v)?;
        Ok(id)
    }

    /// Insert an edge under a caller-chosen id.
    pub fn insert_edge(&mut self, id: EdgeId, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        if self.edges.contains_key(&id) {
            return Err(GraphError::DuplicateEdge(id));
        }
        for x in [u, v] {
            if !self.vertices.contains(&x) {
                return Err(GraphError::UnknownVertex(x));
            }
        }
        if u == v {
            return Err(GraphError::Loop { id, at: u });
        }
        self.edges.insert(id, Edge { id, u, v });
        self.incidence.entry(u).or_default().insert(id);
        self.incidence.entry(v).or_default().insert(id);
        self.next_edge = self.next_edge.max(id.0 + 1);
        Ok(())
    }

    pub fn remove_edge(&mut self, e: EdgeId) -> Result<Edge, GraphError> {
        let rec = self.edges.remove(&e).ok_or(GraphError::UnknownEdge(e))?;
        for x in [rec.u, rec.v] {
            if let Some(inc) = self.incidence.get_mut(&x) {
                inc.remove(&e);
            }
        }
        Ok(rec)
    }

    /// Remove a vertex together with its incident edges.
    pub fn remove_vertex(&mut self, v: VertexId) -> Result<Vec<Edge>, GraphError> {
        if !self.vertices.remove(&v) {
            return Err(GraphError::UnknownVertex(v));
        }
        let inc = self.incidence.remove(&v).unwrap_or_default();
        let mut removed = Vec::with_capacity(inc.len());
        for e in inc {
            let rec = self.edges.remove(&e).expect("incidence out of sync");
            if let Some(other) = rec.other(v) {
                if let Some(s) = self.incidence.get_mut(&other) {
                    s.remove(&e);
                }
            }
            removed.push(rec);
        }
        Ok(removed)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().copied()
    }

    pub fn vertex_set(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.values()
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.keys().copied()
    }

    pub fn edge(&self, e: EdgeId) -> Option<&Edge> {
        self.edges.get(&e)
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    pub fn has_edge(&self, e: EdgeId) -> bool {
        self.edges.contains_key(&e)
    }

    /// Id that the next call to [`MultiGraph::add_edge`] will use.
    pub fn next_edge_id(&self) -> EdgeId {
        EdgeId(self.next_edge)
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.incidence.get(&v).map_or(0, |s| s.len())
    }

    pub fn max_degree(&self) -> usize {
        self.vertices.iter().map(|&v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.vertices.iter().map(|&v| self.degree(v)).min().unwrap_or(0)
    }

    /// Edges incident to `v`, ascending by id.
    pub fn incident(&self, v: VertexId) -> impl Iterator<Item = EdgeId> + '_ {
        self.incidence.get(&v).into_iter().flat_map(|s| s.iter().copied())
    }

    pub fn neighbors(&self, v: VertexId) -> BTreeSet<VertexId> {
        self.incident(v).filter_map(|e| self.edges[&e].other(v)).collect()
    }

    pub fn edges_between(&self, u: VertexId, v: VertexId) -> Vec<EdgeId> {
        self.incident(u).filter(|e| self.edges[e].other(u) == Some(v)).collect()
    }

    /// δ(X): edges with exactly one end in `x`.
    pub fn boundary(&self, x: &BTreeSet<VertexId>) -> BTreeSet<EdgeId> {
        let mut out = BTreeSet::new();
        for &v in x {
            for e in self.incident(v) {
                let other = self.edges[&e].other(v).unwrap();
                if !x.contains(&other) {
                    out.insert(e);
                }
            }
        }
        out
    }

    /// N(X): vertices outside `x` adjacent to some member of `x`.
    pub fn neighborhood(&self, x: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
        let mut out = BTreeSet::new();
        for &v in x {
            for e in self.incident(v) {
                let other = self.edges[&e].other(v).unwrap();
                if !x.contains(&other) {
                    out.insert(other);
                }
            }
        }
        out
    }

    /// Subgraph with the given vertices and edges (edges must have ends among `vertices`;
    /// others are dropped).
    pub fn subgraph(&self, vertices: &BTreeSet<VertexId>, edges: &BTreeSet<EdgeId>) -> MultiGraph {
        let mut g = MultiGraph::new();
        for &v in vertices {
            if self.has_vertex(v) {
                g.add_vertex(v);
            }
        }
        for &e in edges {
            if let Some(rec) = self.edges.get(&e) {
                if g.has_vertex(rec.u) && g.has_vertex(rec.v) {
                    g.insert_edge(e, rec.u, rec.v).expect("valid edge");
                }
            }
        }
        g.next_edge = g.next_edge.max(self.next_edge);
        g
    }

    /// Subgraph induced by `vertices`.
    pub fn induced(&self, vertices: &BTreeSet<VertexId>) -> MultiGraph {
        let edges = self
            .edges
            .values()
            .filter(|e| vertices.contains(&e.u) && vertices.contains(&e.v))
            .map(|e| e.id)
            .collect();
        self.subgraph(vertices, &edges)
    }

    /// Subgraph formed by the given edges and their endpoints.
    pub fn edge_subgraph(&self, edges: &BTreeSet<EdgeId>) -> MultiGraph {
        let mut vs = BTreeSet::new();
        for e in edges {
            if let Some(rec) = self.edges.get(e) {
                vs.insert(rec.u);
                vs.insert(rec.v);
            }
        }
        self.subgraph(&vs, edges)
    }

    /// Same vertices, minus the given edges.
    pub fn without_edges(&self, removed: &BTreeSet<EdgeId>) -> MultiGraph {
        let mut g = self.clone();
        for &e in removed {
            let _ = g.remove_edge(e);
        }
        g
    }

    /// Connected components, each as a vertex set, ordered by smallest vertex.
    pub fn components(&self) -> Vec<BTreeSet<VertexId>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &s in &self.vertices {
            if seen.contains(&s) {
                continue;
            }
            let comp = self.reachable_from(s, |_| true);
            seen.extend(comp.iter().copied());
            out.push(comp);
        }
        out
    }

    /// Vertices reachable from `s` using only edges accepted by `allow`.
    pub fn reachable_from(&self, s: VertexId, allow: impl Fn(EdgeId) -> bool) -> BTreeSet<VertexId> {
        let mut seen = BTreeSet::new();
        if !self.has_vertex(s) {
            return seen;
        }
        seen.insert(s);
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for e in self.incident(x) {
                if !allow(e) {
                    continue;
                }
                let y = self.edges[&e].other(x).unwrap();
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    pub fn is_connected(&self) -> bool {
        match self.vertices.first() {
            None => true,
            Some(&s) => self.reachable_from(s, |_| true).len() == self.vertices.len(),
        }
    }

    /// Shortest path (by edge count) from `s` to any vertex of `targets`, using allowed edges.
    /// Ties are broken toward lower edge ids.
    pub fn shortest_path(
        &self,
        s: VertexId,
        targets: &BTreeSet<VertexId>,
        allow: impl Fn(EdgeId) -> bool,
    ) -> Option<(Vec<VertexId>, Vec<EdgeId>)> {
        if !self.has_vertex(s) {
            return None;
        }
        let mut pred: BTreeMap<VertexId, (VertexId, EdgeId)> = BTreeMap::new();
        let mut seen = BTreeSet::from([s]);
        let mut queue = VecDeque::from([s]);
        let mut hit = None;
        if targets.contains(&s) {
            hit = Some(s);
        }
        while hit.is_none() {
            let Some(x) = queue.pop_front() else { break };
            for e in self.incident(x) {
                if !allow(e) {
                    continue;
                }
                let y = self.edges[&e].other(x).unwrap();
                if seen.insert(y) {
                    pred.insert(y, (x, e));
                    if targets.contains(&y) {
                        hit = Some(y);
                        break;
                    }
                    queue.push_back(y);
                }
            }
        }
        let end = hit?;
        let mut vs = vec![end];
        let mut es = Vec::new();
        let mut cur = end;
        while cur != s {
            let (p, e) = pred[&cur];
            es.push(e);
            vs.push(p);
            cur = p;
        }
        vs.reverse();
        es.reverse();
        Some((vs, es))
    }

    /// Cut-edges (edges whose removal disconnects their component). Parallel edges are
    /// never cut-edges.
    pub fn cut_edges(&self) -> BTreeSet<EdgeId> {
        let dense = Dense::new(self);
        let n = dense.n();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut out = BTreeSet::new();
        let mut timer = 0;
        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            // iterative DFS: (vertex, parent edge index, next adjacency position)
            let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
            disc[root] = timer;
            low[root] = timer;
            timer += 1;
            while let Some(&mut (x, pe, ref mut pos)) = stack.last_mut() {
                if *pos < dense.adj[x].len() {
                    let (ei, y) = dense.adj[x][*pos];
                    *pos += 1;
                    if ei == pe {
                        continue;
                    }
                    if disc[y] == usize::MAX {
                        disc[y] = timer;
                        low[y] = timer;
                        timer += 1;
                        stack.push((y, ei, 0));
                    } else {
                        low[x] = low[x].min(disc[y]);
                    }
                } else {
                    stack.pop();
                    if let Some(&(p, _, _)) = stack.last() {
                        low[p] = low[p].min(low[x]);
                        if low[x] > disc[p] {
                            out.insert(dense.edge_ids[pe]);
                        }
                    }
                }
            }
        }
        out
    }

    /// Lift the pair `{e, f}` off their shared vertex.
    ///
    /// Both edges are deleted; if their far ends differ a fresh edge joining them is
    /// added, otherwise (the lift would create a loop) nothing is added. When the two
    /// edges are parallel the lower-id shared endpoint is used as the pivot.
    pub fn lift_pair(&mut self, e: EdgeId, f: EdgeId) -> Result<Lift, GraphError> {
        if e == f {
            return Err(GraphError::SameEdge(e));
        }
        let a = *self.edge(e).ok_or(GraphError::UnknownEdge(e))?;
        let b = *self.edge(f).ok_or(GraphError::UnknownEdge(f))?;
        let pivot = [a.u, a.v]
            .into_iter()
            .filter(|&x| b.has(x))
            .min()
            .ok_or(GraphError::NonAdjacentEdges(e, f))?;
        self.lift_pair_at(e, f, pivot)
    }

    /// Lift `{e, f}` off the specified shared vertex `pivot`.
    pub fn lift_pair_at(&mut self, e: EdgeId, f: EdgeId, pivot: VertexId) -> Result<Lift, GraphError> {
        if e == f {
            return Err(GraphError::SameEdge(e));
        }
        let a = *self.edge(e).ok_or(GraphError::UnknownEdge(e))?;
        let b = *self.edge(f).ok_or(GraphError::UnknownEdge(f))?;
        let (Some(x), Some(y)) = (a.other(pivot), b.other(pivot)) else {
            return Err(GraphError::NonAdjacentEdges(e, f));
        };
        self.remove_edge(e)?;
        self.remove_edge(f)?;
        let created = if x == y { None } else { Some(self.add_edge(x, y)?) };
        Ok(Lift { pivot, created })
    }

    /// Lift a path given as an edge sequence starting at `start`. Returns the edge
    /// joining the two ends, or `None` if the walk is closed.
    pub fn lift_path(&mut self, start: VertexId, path: &[EdgeId]) -> Result<Option<EdgeId>, GraphError> {
        let walk = self.trace_walk(start, path)?;
        let mut seen = BTreeSet::new();
        for &e in path {
            if !seen.insert(e) {
                return Err(GraphError::NotAPath(format!("edge {e} repeated")));
            }
        }
        if path.is_empty() {
            return Err(GraphError::NotAPath("empty".into()));
        }
        let mut current = path[0];
        for (i, &next) in path.iter().enumerate().skip(1) {
            let pivot = walk[i];
            match self.lift_pair_at(current, next, pivot)?.created {
                Some(c) => current = c,
                None => {
                    // closed prefix: only possible at the final step of a closed walk
                    if i + 1 != path.len() {
                        return Err(GraphError::NotAPath("walk closes before its end".into()));
                    }
                    return Ok(None);
                }
            }
        }
        Ok(Some(current))
    }

    /// Vertex sequence of the walk that starts at `start` and follows `path`.
    pub fn trace_walk(&self, start: VertexId, path: &[EdgeId]) -> Result<Vec<VertexId>, GraphError> {
        if !self.has_vertex(start) {
            return Err(GraphError::UnknownVertex(start));
        }
        let mut walk = vec![start];
        let mut cur = start;
        for &e in path {
            let rec = self.edge(e).ok_or(GraphError::UnknownEdge(e))?;
            cur = rec
                .other(cur)
                .ok_or_else(|| GraphError::NotAPath(format!("edge {e} does not continue the walk at {cur}")))?;
            walk.push(cur);
        }
        Ok(walk)
    }

    /// Identify the vertices of `s` into one vertex (the smallest id of `s`), deleting
    /// loops. Edges keep their ids; `k` edges from `s` to an outside vertex become `k`
    /// parallel edges.
    pub fn contract_set(&self, s: &BTreeSet<VertexId>) -> Result<(MultiGraph, VertexId), GraphError> {
        let &rep = s.first().ok_or(GraphError::EmptySet)?;
        for &v in s {
            if !self.has_vertex(v) {
                return Err(GraphError::UnknownVertex(v));
            }
        }
        let mut g = MultiGraph::new();
        for v in self.vertices() {
            if !s.contains(&v) || v == rep {
                g.add_vertex(v);
            }
        }
        let map = |x: VertexId| if s.contains(&x) { rep } else { x };
        for rec in self.edges() {
            let (u, v) = (map(rec.u), map(rec.v));
            if u != v {
                g.insert_edge(rec.id, u, v)?;
            }
        }
        g.next_edge = g.next_edge.max(self.next_edge);
        Ok((g, rep))
    }

    /// The (simple) line graph. Parallel edges contribute one adjacency.
    pub fn line_graph(&self) -> LineGraph {
        let mut graph = MultiGraph::new();
        let mut vertex_of = BTreeMap::new();
        let mut edge_of = BTreeMap::new();
        for &e in self.edges.keys() {
            let v = VertexId(e.0);
            graph.add_vertex(v);
            vertex_of.insert(e, v);
            edge_of.insert(v, e);
        }
        let mut pairs = BTreeSet::new();
        for x in self.vertices() {
            let inc: Vec<EdgeId> = self.incident(x).collect();
            for i in 0..inc.len() {
                for j in i + 1..inc.len() {
                    pairs.insert((inc[i], inc[j]));
                }
            }
        }
        for (a, b) in pairs {
            graph.add_edge(vertex_of[&a], vertex_of[&b]).expect("distinct line vertices");
        }
        LineGraph { graph, vertex_of, edge_of }
    }

    /// Tutte bridges of the subgraph `h`.
    pub fn tutte_bridges(&self, h: &Subgraph) -> Result<Vec<Bridge>, GraphError> {
        h.check_in(self)?;
        let mut out = Vec::new();
        for rec in self.edges() {
            if !h.edges.contains(&rec.id) && h.vertices.contains(&rec.u) && h.vertices.contains(&rec.v) {
                out.push(Bridge {
                    kind: BridgeKind::Trivial,
                    edges: BTreeSet::from([rec.id]),
                    attachments: BTreeSet::from([rec.u, rec.v]),
                    nucleus: BTreeSet::new(),
                });
            }
        }
        let outside: BTreeSet<VertexId> = self.vertices().filter(|v| !h.vertices.contains(v)).collect();
        let rest = self.induced(&outside);
        for comp in rest.components() {
            let mut edges = BTreeSet::new();
            let mut attachments = BTreeSet::new();
            for &v in &comp {
                for e in self.incident(v) {
                    edges.insert(e);
                    let other = self.edges[&e].other(v).unwrap();
                    if h.vertices.contains(&other) {
                        attachments.insert(other);
                    }
                }
            }
            out.push(Bridge { kind: BridgeKind::Nontrivial, edges, attachments, nucleus: comp });
        }
        Ok(out)
    }

    /// Graphviz rendering; `highlight` edges are drawn bold with the given colour index.
    pub fn to_dot(&self, highlight: &BTreeMap<EdgeId, usize>, marked: &BTreeSet<VertexId>) -> String {
        const COLOURS: [&str; 8] = ["red", "blue", "darkgreen", "orange", "purple", "brown", "magenta", "cyan"];
        let mut s = String::from("graph G {\n  node [shape=circle, fontsize=10];\n");
        for v in self.vertices() {
            if marked.contains(&v) {
                s.push_str(&format!("  {} [style=filled, fillcolor=black, fontcolor=white];\n", v.0));
            } else {
                s.push_str(&format!("  {};\n", v.0));
            }
        }
        for rec in self.edges() {
            match highlight.get(&rec.id) {
                Some(&c) => s.push_str(&format!(
                    "  {} -- {} [label=\"{}\", color={}, penwidth=2.5];\n",
                    rec.u.0,
                    rec.v.0,
                    rec.id.0,
                    COLOURS[c % COLOURS.len()]
                )),
                None => s.push_str(&format!("  {} -- {} [label=\"{}\", color=gray];\n", rec.u.0, rec.v.0, rec.id.0)),
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Dense index view used by the flow and search routines.
#[derive(Clone, Debug)]
pub(crate) struct Dense {
    pub ids: Vec<VertexId>,
    pub index: BTreeMap<VertexId, usize>,
    pub edge_ids: Vec<EdgeId>,
    pub ends: Vec<(usize, usize)>,
    /// adj[x] = (edge index, neighbour index), ascending by edge id.
    pub adj: Vec<Vec<(usize, usize)>>,
}

impl Dense {
    pub fn new(g: &MultiGraph) -> Self {
        let ids: Vec<VertexId> = g.vertices().collect();
        let index: BTreeMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut edge_ids = Vec::with_capacity(g.edge_count());
        let mut ends = Vec::with_capacity(g.edge_count());
        let mut adj = vec![Vec::new(); ids.len()];
        for (ei, rec) in g.edges().enumerate() {
            let (a, b) = (index[&rec.u], index[&rec.v]);
            edge_ids.push(rec.id);
            ends.push((a, b));
            adj[a].push((ei, b));
            adj[b].push((ei, a));
        }
        Dense { ids, index, edge_ids, ends, adj }
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: u32) -> VertexId {
        VertexId(x)
    }

    #[test]
    fn lift_distinct_ends_adds_edge() {
        // s = 0 joined to 1 and 2
        let mut g = MultiGraph::from_edge_list(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let before = g.degree(v(0));
        let lift = g.lift_pair(EdgeId(0), EdgeId(1)).unwrap();
        assert_eq!(lift.pivot, v(0));
        let c = lift.created.unwrap();
        assert_eq!(g.edge(c).unwrap().ends(), (v(1), v(2)));
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.degree(v(0)), before - 2);
        assert_eq!(g.edges_between(v(1), v(2)).len(), 2);
    }

    #[test]
    fn lift_parallel_pair_deletes_both() {
        let mut g = MultiGraph::from_edge_list(2, &[(0, 1), (0, 1), (0, 1)]).unwrap();
        let lift = g.lift_pair(EdgeId(0), EdgeId(1)).unwrap();
        assert_eq!(lift.created, None);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn lift_errors() {
        let mut g = MultiGraph::from_edge_list(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(g.lift_pair(EdgeId(0), EdgeId(1)), Err(GraphError::NonAdjacentEdges(EdgeId(0), EdgeId(1))));
        assert_eq!(g.lift_pair(EdgeId(0), EdgeId(9)), Err(GraphError::UnknownEdge(EdgeId(9))));
        assert_eq!(g.lift_pair(EdgeId(0), EdgeId(0)), Err(GraphError::SameEdge(EdgeId(0))));
    }

    #[test]
    fn edge_ids_are_never_reused() {
        let mut g = MultiGraph::from_edge_list(3, &[(0, 1), (1, 2)]).unwrap();
        g.remove_edge(EdgeId(1)).unwrap();
        let e = g.add_edge(v(0), v(2)).unwrap();
        assert_eq!(e, EdgeId(2));
    }

    #[test]
    fn single_edge_path_lift_is_identity_on_ends() {
        let mut g = MultiGraph::from_edge_list(2, &[(0, 1)]).unwrap();
        let e = g.lift_path(v(0), &[EdgeId(0)]).unwrap();
        assert_eq!(e, Some(EdgeId(0)));
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn closed_walk_lifts_to_nothing() {
        let mut g = MultiGraph::from_edge_list(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let e = g.lift_path(v(0), &[EdgeId(0), EdgeId(1), EdgeId(2)]).unwrap();
        assert_eq!(e, None);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn lift_path_rejects_broken_walk() {
        let mut g = MultiGraph::from_edge_list(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(matches!(g.lift_path(v(0), &[EdgeId(0), EdgeId(1)]), Err(GraphError::NotAPath(_))));
    }

    #[test]
    fn contract_single_vertex_is_identity() {
        let g = MultiGraph::from_edge_list(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let (h, rep) = g.contract_set(&BTreeSet::from([v(2)])).unwrap();
        assert_eq!(rep, v(2));
        assert_eq!(h, g);
    }

    #[test]
    fn contract_part_of_k23() {
        // parts {0,1} and {2,3,4}
        let edges: Vec<(u32, u32)> = [0, 1].iter().flat_map(|&a| [2, 3, 4].map(move |b| (a, b))).collect();
        let g = MultiGraph::from_edge_list(5, &edges).unwrap();
        let (h, rep) = g.contract_set(&BTreeSet::from([v(2), v(3), v(4)])).unwrap();
        assert_eq!(h.vertex_count(), 3);
        assert_eq!(h.edges_between(v(0), rep).len(), 3);
        assert_eq!(h.edges_between(v(1), rep).len(), 3);
        assert_eq!(h.edge_count(), 6);
    }

    #[test]
    fn contract_errors() {
        let g = MultiGraph::with_vertices(2);
        assert_eq!(g.contract_set(&BTreeSet::new()).unwrap_err(), GraphError::EmptySet);
        assert_eq!(g.contract_set(&BTreeSet::from([v(7)])).unwrap_err(), GraphError::UnknownVertex(v(7)));
    }

    #[test]
    fn line_graph_of_triangle() {
        let g = MultiGraph::from_edge_list(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let lg = g.line_graph();
        assert_eq!(lg.graph.vertex_count(), 3);
        assert_eq!(lg.graph.edge_count(), 3);
        assert!(lg.graph.vertices().all(|x| lg.graph.degree(x) == 2));
    }

    #[test]
    fn line_graph_is_simple_over_parallel_edges() {
        let g = MultiGraph::from_edge_list(2, &[(0, 1), (0, 1), (0, 1)]).unwrap();
        let lg = g.line_graph();
        assert_eq!(lg.graph.edge_count(), 3);
    }

    #[test]
    fn bridges_of_whole_graph_are_empty() {
        let g = MultiGraph::from_edge_list(3, &[(0, 1), (1, 2)]).unwrap();
        let h = Subgraph::new(g.vertex_set().clone(), g.edge_ids().collect());
        assert!(g.tutte_bridges(&h).unwrap().is_empty());
    }

    #[test]
    fn bridges_of_cycle_relative_to_one_vertex() {
        let edges: Vec<(u32, u32)> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
        let g = MultiGraph::from_edge_list(6, &edges).unwrap();
        let h = Subgraph::new(BTreeSet::from([v(0)]), BTreeSet::new());
        let bridges = g.tutte_bridges(&h).unwrap();
        assert_eq!(bridges.len(), 1);
        assert_eq!(bridges[0].kind, BridgeKind::Nontrivial);
        assert_eq!(bridges[0].edges.len(), 6);
        assert_eq!(bridges[0].attachments, BTreeSet::from([v(0)]));
    }

    #[test]
    fn bridges_reject_non_subgraph() {
        let g = MultiGraph::from_edge_list(3, &[(0, 1), (1, 2)]).unwrap();
        let h = Subgraph::new(BTreeSet::from([v(0)]), BTreeSet::from([EdgeId(0)]));
        assert!(matches!(g.tutte_bridges(&h), Err(GraphError::NotASubgraph(_))));
    }

    #[test]
    fn cut_edges_ignore_parallel_classes() {
        let g = MultiGraph::from_edge_list(4, &[(0, 1), (0, 1), (1, 2), (2, 3), (3, 1)]).unwrap();
        assert!(g.cut_edges().is_empty());
        let g = MultiGraph::from_edge_list(4, &[(0, 1), (1, 2), (2, 3), (3, 1)]).unwrap();
        assert_eq!(g.cut_edges(), BTreeSet::from([EdgeId(0)]));
    }

    #[test]
    fn json_round_trip() {
        let mut g = MultiGraph::from_edge_list(3, &[(0, 1), (1, 2), (0, 1)]).unwrap();
        g.remove_edge(EdgeId(1)).unwrap();
        let text = serde_json::to_string(&g).unwrap();
        assert_eq!(text, r#"{"vertices":[0,1,2],"edges":[{"id":0,"u":0,"v":1},{"id":2,"u":0,"v":1}]}"#);
        let back: MultiGraph = serde_json::from_str(&text).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<MultiGraph>(r#"{"vertices":[0],"edges":[{"id":0,"u":0,"v":0}]}"#).is_err());
    }
}
