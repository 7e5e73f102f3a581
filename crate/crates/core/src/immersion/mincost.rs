//! Shortest families of edge-disjoint paths (successive shortest paths, unit costs).

use std::collections::{BTreeSet, VecDeque};

use crate::graph::{Dense, EdgeId, MultiGraph, VertexId};
use crate::path::Path;

/// Min-cost flow on a fixed graph with a per-call edge mask.
pub(crate) struct Router {
    pub dense: Dense,
}

/// Arc layout: undirected edge `i` gives arcs 4i (a->b), 4i+1 (its reverse),
/// 4i+2 (b->a), 4i+3 (its reverse).
impl Router {
    pub fn new(g: &MultiGraph) -> Self {
        Router { dense: Dense::new(g) }
    }

    fn tail_head(&self, arc: usize) -> (usize, usize) {
        let (a, b) = self.dense.ends[arc / 4];
        match arc % 4 {
            0 | 3 => (a, b),
            _ => (b, a),
        }
    }

    /// `t` edge-disjoint paths from `s` to `d` of least total length, as dense edge
    /// index walks from `s`. Edges with `blocked[i]` are unavailable.
    pub fn paths(&self, s: usize, d: usize, t: usize, blocked: &[bool]) -> Option<Vec<Vec<usize>>> {
        if s == d {
            return None;
        }
        let n = self.dense.n();
        let m = self.dense.ends.len();
        let mut cap = vec![0i32; 4 * m];
        for i in 0..m {
            if !blocked[i] {
                cap[4 * i] = 1;
                cap[4 * i + 2] = 1;
            }
        }
        let cost = |arc: usize| if arc.is_multiple_of(2) { 1i64 } else { -1 };
        // outgoing arcs per vertex
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
        for i in 0..m {
            if blocked[i] {
                continue;
            }
            for k in 0..4 {
                let arc = 4 * i + k;
                out[self.tail_head(arc).0].push(arc);
            }
        }
        for _ in 0..t {
            // SPFA: residual graph can carry negative arcs
            let mut dist = vec![i64::MAX; n];
            let mut pred = vec![usize::MAX; n];
            let mut inq = vec![false; n];
            let mut q = VecDeque::from([s]);
            dist[s] = 0;
            inq[s] = true;
            while let Some(x) = q.pop_front() {
                inq[x] = false;
                for &arc in &out[x] {
                    if cap[arc] == 0 {
                        continue;
                    }
                    let y = self.tail_head(arc).1;
                    let nd = dist[x] + cost(arc);
                    if nd < dist[y] {
                        dist[y] = nd;
                        pred[y] = arc;
                        if !inq[y] {
                            inq[y] = true;
                            q.push_back(y);
                        }
                    }
                }
            }
            if dist[d] == i64::MAX {
                return None;
            }
            let mut y = d;
            while y != s {
                let arc = pred[y];
                cap[arc] -= 1;
                cap[arc ^ 1] += 1;
                y = self.tail_head(arc).0;
            }
        }
        // flow on arc 4i (a->b) is cap[4i+1]; on 4i+2 (b->a) it is cap[4i+3]
        let mut flow_out: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for i in 0..m {
            let (a, b) = self.dense.ends[i];
            if cap[4 * i + 1] > 0 {
                flow_out[a].push((i, b));
            }
            if cap[4 * i + 3] > 0 {
                flow_out[b].push((i, a));
            }
        }
        let mut result = Vec::with_capacity(t);
        for _ in 0..t {
            let mut walk = Vec::new();
            let mut x = s;
            while x != d {
                let (i, y) = flow_out[x].remove(0);
                walk.push(i);
                x = y;
            }
            result.push(walk);
        }
        Some(result)
    }

    /// Whether `t` edge-disjoint `s`–`d` paths avoid the blocked edges.
    pub fn has_flow(&self, s: usize, d: usize, t: usize, blocked: &[bool]) -> bool {
        if s == d {
            return true;
        }
        let n = self.dense.n();
        // flow[i] = +1 when edge i carries a->b, -1 for b->a
        let mut flow = vec![0i8; self.dense.ends.len()];
        for _ in 0..t {
            let mut pred: Vec<Option<(usize, usize)>> = vec![None; n];
            let mut seen = vec![false; n];
            seen[s] = true;
            let mut q = VecDeque::from([s]);
            'bfs: while let Some(x) = q.pop_front() {
                for &(i, y) in &self.dense.adj[x] {
                    if blocked[i] || seen[y] {
                        continue;
                    }
                    let forward = self.dense.ends[i].0 == x && self.dense.ends[i].1 == y;
                    let ok = if forward { flow[i] < 1 } else { flow[i] > -1 };
                    if ok {
                        seen[y] = true;
                        pred[y] = Some((i, x));
                        if y == d {
                            break 'bfs;
                        }
                        q.push_back(y);
                    }
                }
            }
            if !seen[d] {
                return false;
            }
            let mut y = d;
            while let Some((i, x)) = pred[y] {
                if self.dense.ends[i].0 == x && self.dense.ends[i].1 == y {
                    flow[i] += 1;
                } else {
                    flow[i] -= 1;
                }
                y = x;
            }
        }
        true
    }

    pub fn to_path(&self, s: usize, walk: &[usize]) -> Path {
        let mut vertices = vec![self.dense.ids[s]];
        let mut x = s;
        for &i in walk {
            let (a, b) = self.dense.ends[i];
            x = if a == x { b } else { a };
            vertices.push(self.dense.ids[x]);
        }
        Path { vertices, edges: walk.iter().map(|&i| self.dense.edge_ids[i]).collect() }.simplify()
    }
}

/// `t` edge-disjoint `a`–`b` paths of least total length avoiding `forbidden`, or
/// `None` when fewer than `t` exist.
pub fn min_cost_disjoint_paths(
    g: &MultiGraph,
    a: VertexId,
    b: VertexId,
    t: usize,
    forbidden: &BTreeSet<EdgeId>,
) -> Option<Vec<Path>> {
    let router = Router::new(g);
    let (&s, &d) = (router.dense.index.get(&a)?, router.dense.index.get(&b)?);
    let blocked: Vec<bool> = router.dense.edge_ids.iter().map(|e| forbidden.contains(e)).collect();
    let walks = router.paths(s, d, t, &blocked)?;
    Some(walks.iter().map(|w| router.to_path(s, w)).collect())
}
