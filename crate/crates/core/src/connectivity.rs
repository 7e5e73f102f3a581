//! Edge and vertex connectivity via unit-capacity flows, with explicit path and cut
//! witnesses.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flow::Residual;
use crate::graph::{Dense, EdgeId, MultiGraph, VertexId};
use crate::path::{Path, PathFamily};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConnectivityError {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("endpoints coincide at {0}")]
    SameVertex(VertexId),
    #[error("terminal set is empty")]
    EmptySet,
    #[error("source and target sets share {0}")]
    OverlappingSets(VertexId),
}

/// `side` together with δ(side).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EdgeCut {
    pub side: BTreeSet<VertexId>,
    pub cut_edges: BTreeSet<EdgeId>,
}

impl EdgeCut {
    pub fn of_side(g: &MultiGraph, side: BTreeSet<VertexId>) -> Self {
        let cut_edges = g.boundary(&side);
        EdgeCut { side, cut_edges }
    }

    pub fn size(&self) -> usize {
        self.cut_edges.len()
    }

    /// Whether removing the cut edges leaves no path from `a` to `b`.
    pub fn separates(&self, g: &MultiGraph, a: &BTreeSet<VertexId>, b: &BTreeSet<VertexId>) -> bool {
        let mut reach = BTreeSet::new();
        for &s in a {
            if !reach.contains(&s) {
                reach.extend(g.reachable_from(s, |e| !self.cut_edges.contains(&e)));
            }
        }
        b.iter().all(|v| !reach.contains(v))
    }
}

/// Outcome of a bounded path request.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PathsOrCut {
    Paths(PathFamily),
    /// Fewer than the requested number of paths exist; the cut is a minimum separator.
    Infeasible(EdgeCut),
}

fn check_vertex(g: &MultiGraph, v: VertexId) -> Result<(), ConnectivityError> {
    if g.has_vertex(v) {
        Ok(())
    } else {
        Err(ConnectivityError::UnknownVertex(v))
    }
}

/// Edge-flow network over a dense view: one arc pair per edge, capacity 1 each way.
struct EdgeFlow {
    dense: Dense,
    net: Residual,
    arcs: Vec<usize>,
    sources: Vec<bool>,
    sinks: Vec<bool>,
    value: i64,
}

impl EdgeFlow {
    fn run(g: &MultiGraph, a: &BTreeSet<VertexId>, b: &BTreeSet<VertexId>, limit: usize) -> Self {
        let dense = Dense::new(g);
        let mut net = Residual::new(dense.n());
        let arcs = dense.ends.iter().map(|&(x, y)| net.add(x, y, 1, 1)).collect();
        let mut sources = vec![false; dense.n()];
        let mut sinks = vec![false; dense.n()];
        for v in a {
            sources[dense.index[v]] = true;
        }
        for v in b {
            sinks[dense.index[v]] = true;
        }
        let value = net.augment(&sources, &sinks, limit.min(i64::MAX as usize) as i64);
        EdgeFlow { dense, net, arcs, sources, sinks, value }
    }

    fn min_cut(&self, g: &MultiGraph) -> EdgeCut {
        let reach = self.net.reachable(&self.sources);
        let side = (0..self.dense.n()).filter(|&i| reach[i]).map(|i| self.dense.ids[i]).collect();
        EdgeCut::of_side(g, side)
    }

    /// Decompose the flow into paths, always leaving a vertex along its lowest-id
    /// edge that carries flow outward.
    fn paths(&self) -> Vec<Path> {
        let n = self.dense.n();
        let mut out: Vec<Vec<(EdgeId, usize)>> = vec![Vec::new(); n];
        for (ei, &arc) in self.arcs.iter().enumerate() {
            let (x, y) = self.dense.ends[ei];
            let f = 1 - self.net.residual(arc);
            if f > 0 {
                out[x].push((self.dense.edge_ids[ei], y));
            } else if f < 0 {
                out[y].push((self.dense.edge_ids[ei], x));
            }
        }
        for list in out.iter_mut() {
            list.sort();
            list.reverse(); // pop lowest id first
        }
        let mut result = Vec::new();
        for s in 0..n {
            if !self.sources[s] {
                continue;
            }
            while !out[s].is_empty() {
                let mut vertices = vec![self.dense.ids[s]];
                let mut edges = Vec::new();
                let mut cur = s;
                while !self.sinks[cur] {
                    let Some((e, y)) = out[cur].pop() else { break };
                    edges.push(e);
                    vertices.push(self.dense.ids[y]);
                    cur = y;
                }
                debug_assert!(self.sinks[cur], "flow decomposition stalled");
                result.push(Path { vertices, edges }.simplify());
            }
        }
        result
    }
}

/// λ(u, v): the maximum number of edge-disjoint u–v paths.
pub fn lambda(g: &MultiGraph, u: VertexId, v: VertexId) -> Result<usize, ConnectivityError> {
    check_vertex(g, u)?;
    check_vertex(g, v)?;
    if u == v {
        return Err(ConnectivityError::SameVertex(u));
    }
    Ok(EdgeFlow::run(g, &BTreeSet::from([u]), &BTreeSet::from([v]), usize::MAX).value as usize)
}

/// min(λ(u, v), cap); cheaper than [`lambda`] when only a threshold matters.
pub fn lambda_capped(g: &MultiGraph, u: VertexId, v: VertexId, cap: usize) -> usize {
    EdgeFlow::run(g, &BTreeSet::from([u]), &BTreeSet::from([v]), cap).value as usize
}

/// A minimum u–v edge cut, with `u` on the `side`.
pub fn min_cut(g: &MultiGraph, u: VertexId, v: VertexId) -> Result<EdgeCut, ConnectivityError> {
    check_vertex(g, u)?;
    check_vertex(g, v)?;
    if u == v {
        return Err(ConnectivityError::SameVertex(u));
    }
    Ok(EdgeFlow::run(g, &BTreeSet::from([u]), &BTreeSet::from([v]), usize::MAX).min_cut(g))
}

/// `k` pairwise edge-disjoint paths from `a` to `b`, or a cut of size below `k`.
///
/// Every returned path starts in `a`, ends in `b`, is vertex-simple, and has no
/// internal vertex in `a ∪ b`.
pub fn edge_disjoint_paths(
    g: &MultiGraph,
    a: &BTreeSet<VertexId>,
    b: &BTreeSet<VertexId>,
    k: usize,
) -> Result<PathsOrCut, ConnectivityError> {
    if a.is_empty() || b.is_empty() {
        return Err(ConnectivityError::EmptySet);
    }
    for &v in a.iter().chain(b) {
        check_vertex(g, v)?;
    }
    if let Some(&v) = a.intersection(b).next() {
        return Err(ConnectivityError::OverlappingSets(v));
    }
    let flow = EdgeFlow::run(g, a, b, k);
    if (flow.value as usize) < k {
        return Ok(PathsOrCut::Infeasible(flow.min_cut(g)));
    }
    let paths = flow.paths();
    Ok(PathsOrCut::Paths(PathFamily { paths, sources: a.clone(), targets: b.clone() }))
}

/// Maximum family of edge-disjoint `a`→`b` paths.
pub fn max_edge_disjoint_paths(g: &MultiGraph, a: &BTreeSet<VertexId>, b: &BTreeSet<VertexId>) -> PathFamily {
    let flow = EdgeFlow::run(g, a, b, usize::MAX);
    PathFamily { paths: flow.paths(), sources: a.clone(), targets: b.clone() }
}

/// `None` when `g` is k-edge-connected; otherwise a cut with fewer than `k` edges.
///
/// Uses a fixed root: every cut separates the root from some vertex.
pub fn edge_connectivity_violation(g: &MultiGraph, k: usize) -> Option<EdgeCut> {
    let root = g.vertices().next()?;
    set_connectivity_violation_from(g, root, g.vertices().skip(1), k)
}

pub fn is_k_edge_connected(g: &MultiGraph, k: usize) -> bool {
    edge_connectivity_violation(g, k).is_none()
}

/// `None` when no set of fewer than `k` edges separates two members of `s`.
pub fn set_connectivity_violation(g: &MultiGraph, s: &BTreeSet<VertexId>, k: usize) -> Option<EdgeCut> {
    let mut it = s.iter().copied();
    let root = it.next()?;
    set_connectivity_violation_from(g, root, it, k)
}

pub fn set_k_edge_connected(g: &MultiGraph, s: &BTreeSet<VertexId>, k: usize) -> bool {
    set_connectivity_violation(g, s, k).is_none()
}

fn set_connectivity_violation_from(
    g: &MultiGraph,
    root: VertexId,
    others: impl Iterator<Item = VertexId>,
    k: usize,
) -> Option<EdgeCut> {
    if k == 0 {
        return None;
    }
    let comp = g.reachable_from(root, |_| true);
    let others: Vec<VertexId> = others.collect();
    if others.iter().any(|v| !comp.contains(v)) {
        return Some(EdgeCut { side: comp, cut_edges: BTreeSet::new() });
    }
    // cheap degree screen first
    for &v in std::iter::once(&root).chain(others.iter()) {
        if g.degree(v) < k {
            return Some(EdgeCut::of_side(g, BTreeSet::from([v])));
        }
    }
    for v in others {
        let flow = EdgeFlow::run(g, &BTreeSet::from([root]), &BTreeSet::from([v]), k);
        if (flow.value as usize) < k {
            return Some(flow.min_cut(g));
        }
    }
    None
}

/// Global edge connectivity (0 for disconnected graphs, `usize::MAX` for fewer than two vertices).
pub fn edge_connectivity(g: &MultiGraph) -> usize {
    let Some(root) = g.vertices().next() else { return usize::MAX };
    let mut best = usize::MAX;
    for v in g.vertices().skip(1) {
        best = best.min(lambda_capped(g, root, v, best));
    }
    best
}

/// Node-split network: vertex `i` becomes `2i` (in) and `2i+1` (out).
struct SplitFlow {
    dense: Dense,
    net: Residual,
    /// (arc index, edge index) of every edge arc.
    edge_arcs: Vec<(usize, usize)>,
    value: i64,
}

impl SplitFlow {
    fn run(
        g: &MultiGraph,
        a: &BTreeSet<VertexId>,
        b: &BTreeSet<VertexId>,
        free: &BTreeSet<VertexId>,
        limit: usize,
    ) -> Self {
        let dense = Dense::new(g);
        let n = dense.n();
        let mut net = Residual::new(2 * n);
        for i in 0..n {
            let cap = if free.contains(&dense.ids[i]) { i64::MAX / 4 } else { 1 };
            net.add(2 * i, 2 * i + 1, cap, 0);
        }
        let mut edge_arcs = Vec::new();
        for (ei, &(x, y)) in dense.ends.iter().enumerate() {
            edge_arcs.push((net.add(2 * x + 1, 2 * y, 1, 0), ei));
            edge_arcs.push((net.add(2 * y + 1, 2 * x, 1, 0), ei));
        }
        let mut sources = vec![false; 2 * n];
        let mut sinks = vec![false; 2 * n];
        for v in a {
            sources[2 * dense.index[v]] = true;
        }
        for v in b {
            sinks[2 * dense.index[v] + 1] = true;
        }
        let value = net.augment(&sources, &sinks, limit.min(i64::MAX as usize) as i64);
        SplitFlow { dense, net, edge_arcs, value }
    }

    fn paths(&self, a: &BTreeSet<VertexId>, b: &BTreeSet<VertexId>) -> Vec<Path> {
        let n = self.dense.n();
        // out-node -> list of (edge id, next vertex index)
        let mut next: Vec<Vec<(EdgeId, usize)>> = vec![Vec::new(); n];
        for &(arc, ei) in &self.edge_arcs {
            // forward arcs start with capacity 1; flow is what has been consumed
            if self.net.residual(arc) == 0 {
                let to = self.net.head(arc) / 2;
                let from = self.net.head(arc ^ 1) / 2;
                next[from].push((self.dense.edge_ids[ei], to));
            }
        }
        for list in next.iter_mut() {
            list.sort();
            list.reverse();
        }
        let mut result = Vec::new();
        for &s in a {
            let si = self.dense.index[&s];
            loop {
                // a unit leaving s either stops at s (s ∈ b) or continues along an edge
                let mut vertices = vec![s];
                let mut edges = Vec::new();
                let mut cur = si;
                let mut moved = false;
                while let Some((e, y)) = next[cur].pop() {
                    moved = true;
                    edges.push(e);
                    vertices.push(self.dense.ids[y]);
                    cur = y;
                    if b.contains(&self.dense.ids[y]) && next[y].is_empty() {
                        break;
                    }
                }
                if !moved {
                    break;
                }
                result.push(trim(Path { vertices, edges }.simplify(), a, b));
            }
        }
        for &s in a.intersection(b) {
            if !result.iter().any(|p| p.contains_vertex(s)) && self.value > result.len() as i64 {
                result.push(Path::trivial(s));
            }
        }
        result
    }
}

/// Cut a path down to its last visit of `a` and then first visit of `b`.
fn trim(p: Path, a: &BTreeSet<VertexId>, b: &BTreeSet<VertexId>) -> Path {
    let last_a = p.vertices.iter().rposition(|v| a.contains(v)).unwrap_or(0);
    let p = p.segment(last_a, p.vertices.len() - 1);
    let first_b = p.vertices.iter().position(|v| b.contains(v)).unwrap_or(p.vertices.len() - 1);
    p.segment(0, first_b)
}

/// A maximum family of pairwise vertex-disjoint `a`→`b` paths (Menger). Vertices of
/// `a ∩ b` yield zero-length paths.
pub fn vertex_disjoint_paths(g: &MultiGraph, a: &BTreeSet<VertexId>, b: &BTreeSet<VertexId>) -> PathFamily {
    vertex_disjoint_paths_limited(g, a, b, usize::MAX)
}

pub fn vertex_disjoint_paths_limited(
    g: &MultiGraph,
    a: &BTreeSet<VertexId>,
    b: &BTreeSet<VertexId>,
    limit: usize,
) -> PathFamily {
    let a: BTreeSet<VertexId> = a.iter().copied().filter(|&v| g.has_vertex(v)).collect();
    let b: BTreeSet<VertexId> = b.iter().copied().filter(|&v| g.has_vertex(v)).collect();
    if a.is_empty() || b.is_empty() {
        return PathFamily { paths: Vec::new(), sources: a, targets: b };
    }
    // Flow through a ∩ b is a trivial path; route those first so decomposition is direct.
    let common: Vec<VertexId> = a.intersection(&b).copied().take(limit).collect();
    let mut paths: Vec<Path> = common.iter().map(|&v| Path::trivial(v)).collect();
    if paths.len() < limit {
        let used: BTreeSet<VertexId> = common.iter().copied().collect();
        let mut h = g.clone();
        for &v in &used {
            h.remove_vertex(v).unwrap();
        }
        let a2: BTreeSet<VertexId> = a.difference(&used).copied().collect();
        let b2: BTreeSet<VertexId> = b.difference(&used).copied().collect();
        if !a2.is_empty() && !b2.is_empty() {
            let flow = SplitFlow::run(&h, &a2, &b2, &BTreeSet::new(), limit - paths.len());
            paths.extend(flow.paths(&a2, &b2));
        }
    }
    PathFamily { paths, sources: a, targets: b }
}

/// Up to `limit` paths from `x` to `y` that share only their ends (x ≠ y).
pub fn internally_disjoint_paths(g: &MultiGraph, x: VertexId, y: VertexId, limit: usize) -> Vec<Path> {
    if x == y || !g.has_vertex(x) || !g.has_vertex(y) {
        return Vec::new();
    }
    let a = BTreeSet::from([x]);
    let b = BTreeSet::from([y]);
    let free = BTreeSet::from([x, y]);
    let flow = SplitFlow::run(g, &a, &b, &free, limit);
    let n = flow.dense.n();
    let mut next: Vec<Vec<(EdgeId, usize)>> = vec![Vec::new(); n];
    for &(arc, ei) in &flow.edge_arcs {
        if flow.net.residual(arc) == 0 {
            let to = flow.net.head(arc) / 2;
            let from = flow.net.head(arc ^ 1) / 2;
            next[from].push((flow.dense.edge_ids[ei], to));
        }
    }
    for list in next.iter_mut() {
        list.sort();
        list.reverse();
    }
    let xi = flow.dense.index[&x];
    let yi = flow.dense.index[&y];
    let mut out = Vec::new();
    while let Some((e, mut cur)) = next[xi].pop() {
        let mut vertices = vec![x, flow.dense.ids[cur]];
        let mut edges = vec![e];
        while cur != yi {
            let Some((e, nxt)) = next[cur].pop() else { break };
            edges.push(e);
            vertices.push(flow.dense.ids[nxt]);
            cur = nxt;
        }
        out.push(Path { vertices, edges }.simplify());
    }
    out
}

/// Pairwise λ for all vertex pairs of `g`, as a map keyed by ordered pairs (u < v).
pub fn lambda_matrix(g: &MultiGraph) -> BTreeMap<(VertexId, VertexId), usize> {
    let vs: Vec<VertexId> = g.vertices().collect();
    let mut out = BTreeMap::new();
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            out.insert((vs[i], vs[j]), lambda(g, vs[i], vs[j]).unwrap());
        }
    }
    out
}

/// All-pairs λ computed from an equivalent flow tree: `n − 1` max-flow runs, after
/// which λ(x, y) is the smallest tree weight on the x–y tree path.
#[derive(Clone, Debug)]
pub struct LambdaTable {
    index: BTreeMap<VertexId, usize>,
    ids: Vec<VertexId>,
    values: Vec<Vec<usize>>,
}

impl LambdaTable {
    pub fn new(g: &MultiGraph) -> Self {
        let dense = Dense::new(g);
        let n = dense.n();
        let mut base = Residual::new(n);
        for &(x, y) in &dense.ends {
            base.add(x, y, 1, 1);
        }
        let mut parent = vec![0usize; n];
        let mut weight = vec![0usize; n];
        for s in 1..n {
            let t = parent[s];
            let mut net = base.clone();
            let mut src = vec![false; n];
            let mut snk = vec![false; n];
            src[s] = true;
            snk[t] = true;
            weight[s] = net.augment(&src, &snk, i64::MAX) as usize;
            let side = net.reachable(&src);
            for i in s + 1..n {
                if side[i] && parent[i] == t {
                    parent[i] = s;
                }
            }
        }
        let mut tree = vec![Vec::new(); n];
        for s in 1..n {
            tree[s].push((parent[s], weight[s]));
            tree[parent[s]].push((s, weight[s]));
        }
        let mut values = vec![vec![usize::MAX; n]; n];
        for root in 0..n {
            let mut stack = vec![(root, usize::MAX, usize::MAX)];
            while let Some((x, from, m)) = stack.pop() {
                values[root][x] = m;
                for &(y, w) in &tree[x] {
                    if y != from {
                        stack.push((y, x, m.min(w)));
                    }
                }
            }
        }
        LambdaTable { index: dense.index, ids: dense.ids, values }
    }

    pub fn get(&self, u: VertexId, v: VertexId) -> usize {
        self.values[self.index[&u]][self.index[&v]]
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.ids
    }
}
