//! Stars, combs and marked paths inside a tree.
//!
//! Given a tree and a marked set X, look for (in this order)
//! - a subdivided star with at least t rays, all ending in X;
//! - a subdivided comb: a spine whose ends are in X and at least t internal spine
//!   vertices carrying a tooth that ends in X;
//! - a path through at least t vertices of X.
//!
//! Each test is exact. A star centre needs t neighbours whose side of the tree holds
//! a marked vertex. For combs a dynamic program over the rooted tree gives the
//! largest number of tooth-capable internal vertices on a spine between two marked
//! vertices. The marked path comes from the heaviest path with unit weight on X.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::{check_tree, edge_vertices, PackingError};
use crate::graph::{EdgeId, MultiGraph, VertexId};
use crate::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum CombKind {
    Path,
    Star,
    Comb,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CombStructure {
    pub kind: CombKind,
    /// Every edge of the structure.
    pub host_tree: BTreeSet<EdgeId>,
    /// Path: the marked vertices along it. Star: ray ends. Comb: spine start, tooth
    /// ends in spine order, spine end.
    pub marked_leaves: Vec<VertexId>,
    /// The path itself, or the comb spine.
    pub spine: Option<Path>,
    pub center: Option<VertexId>,
    /// Star rays from the centre, or comb teeth from the spine.
    pub branches: Vec<Path>,
}

struct Rooted {
    order: Vec<VertexId>,
    parent: BTreeMap<VertexId, Option<(EdgeId, VertexId)>>,
    children: BTreeMap<VertexId, Vec<(EdgeId, VertexId)>>,
    adj: BTreeMap<VertexId, Vec<(EdgeId, VertexId)>>,
    /// Subtree holds a marked vertex.
    has_x: BTreeMap<VertexId, bool>,
    /// Something outside the subtree is marked.
    up_x: BTreeMap<VertexId, bool>,
}

impl Rooted {
    fn new(g: &MultiGraph, tree: &BTreeSet<EdgeId>, x: &BTreeSet<VertexId>) -> Result<Self, PackingError> {
        check_tree(g, tree, x).map_err(PackingError::InvalidInput)?;
        let mut verts = edge_vertices(g, tree);
        verts.extend(x.iter().copied());
        let mut adj: BTreeMap<VertexId, Vec<(EdgeId, VertexId)>> = verts.iter().map(|&v| (v, Vec::new())).collect();
        for &e in tree {
            let r = g.edge(e).unwrap();
            adj.get_mut(&r.u).unwrap().push((e, r.v));
            adj.get_mut(&r.v).unwrap().push((e, r.u));
        }
        let Some(&root) = verts.first() else {
            return Err(PackingError::InvalidInput("empty tree".into()));
        };
        let mut order = vec![root];
        let mut parent = BTreeMap::from([(root, None)]);
        let mut children: BTreeMap<VertexId, Vec<(EdgeId, VertexId)>> = BTreeMap::new();
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            i += 1;
            for &(e, y) in &adj[&v] {
                if let std::collections::btree_map::Entry::Vacant(slot) = parent.entry(y) {
                    slot.insert(Some((e, v)));
                    children.entry(v).or_default().push((e, y));
                    order.push(y);
                }
            }
        }
        let mut sub: BTreeMap<VertexId, usize> = BTreeMap::new();
        for &v in order.iter().rev() {
            let own = usize::from(x.contains(&v));
            let below: usize = children.get(&v).into_iter().flatten().map(|(_, c)| sub[c]).sum();
            sub.insert(v, own + below);
        }
        let total = x.len();
        let has_x = sub.iter().map(|(&v, &k)| (v, k > 0)).collect();
        let up_x = sub.iter().map(|(&v, &k)| (v, total > k)).collect();
        Ok(Rooted { order, parent, children, adj, has_x, up_x })
    }

    fn kids(&self, v: VertexId) -> &[(EdgeId, VertexId)] {
        self.children.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    fn x_children(&self, v: VertexId) -> usize {
        self.kids(v).iter().filter(|(_, c)| self.has_x[c]).count()
    }

    /// Whether the side of edge (v, y) away from v holds a marked vertex.
    fn side_marked(&self, v: VertexId, y: VertexId) -> bool {
        match self.parent[&v] {
            Some((_, p)) if p == y => self.up_x[&v],
            _ => self.has_x[&y],
        }
    }

    /// Path from `start` into the branch through `first`, ending at the nearest marked
    /// vertex of that branch.
    fn ray(&self, start: VertexId, via: (EdgeId, VertexId), x: &BTreeSet<VertexId>) -> Path {
        let mut pred: BTreeMap<VertexId, (EdgeId, VertexId)> = BTreeMap::from([(via.1, (via.0, start))]);
        let mut q = VecDeque::from([via.1]);
        let mut hit = via.1;
        while let Some(v) = q.pop_front() {
            if x.contains(&v) {
                hit = v;
                break;
            }
            for &(e, y) in &self.adj[&v] {
                if y != start && !pred.contains_key(&y) {
                    pred.insert(y, (e, v));
                    q.push_back(y);
                }
            }
        }
        let mut vertices = vec![hit];
        let mut edges = Vec::new();
        let mut cur = hit;
        while cur != start {
            let (e, p) = pred[&cur];
            edges.push(e);
            vertices.push(p);
            cur = p;
        }
        vertices.reverse();
        edges.reverse();
        Path { vertices, edges }
    }

    /// Descend from `v` along `choice` pointers; returns the vertices and edges below v.
    fn chain(&self, v: VertexId, choice: &BTreeMap<VertexId, Option<(EdgeId, VertexId)>>) -> (Vec<VertexId>, Vec<EdgeId>) {
        let mut vs = Vec::new();
        let mut es = Vec::new();
        let mut cur = v;
        while let Some(Some((e, c))) = choice.get(&cur) {
            es.push(*e);
            vs.push(*c);
            cur = *c;
        }
        (vs, es)
    }
}

/// A downward run from `top`: the first edge and child, then the rest of the run.
type Arm = Option<((EdgeId, VertexId), (Vec<VertexId>, Vec<EdgeId>))>;

fn path_from_parts(top: VertexId, left: Arm, right: Arm) -> Path {
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    if let Some(((e, c), (vs, es))) = left {
        for (v, e) in vs.iter().rev().zip(es.iter().rev()) {
            vertices.push(*v);
            edges.push(*e);
        }
        vertices.push(c);
        edges.push(e);
    }
    vertices.push(top);
    if let Some(((e, c), (vs, es))) = right {
        edges.push(e);
        vertices.push(c);
        vertices.extend(vs);
        edges.extend(es);
    }
    Path { vertices, edges }
}

/// Path through the most vertices of `x` in the tree.
pub fn longest_marked_path(g: &MultiGraph, tree: &BTreeSet<EdgeId>, x: &BTreeSet<VertexId>) -> Result<Path, PackingError> {
    let rt = Rooted::new(g, tree, x)?;
    let w = |v: VertexId| usize::from(x.contains(&v));
    let mut down: BTreeMap<VertexId, usize> = BTreeMap::new();
    let mut choice: BTreeMap<VertexId, Option<(EdgeId, VertexId)>> = BTreeMap::new();
    let mut best = (0usize, rt.order[0], None, None);
    for &v in rt.order.iter().rev() {
        let mut ranked: Vec<(usize, (EdgeId, VertexId))> = rt.kids(v).iter().map(|&(e, c)| (down[&c], (e, c))).collect();
        ranked.sort_by(|a, b| b.0.cmp(&a.0).then(a.1 .1.cmp(&b.1 .1)));
        let first = ranked.first().copied();
        down.insert(v, w(v) + first.map_or(0, |f| f.0));
        choice.insert(v, first.map(|f| f.1));
        let through = w(v) + ranked.iter().take(2).map(|r| r.0).sum::<usize>();
        if through > best.0 {
            best = (through, v, ranked.first().map(|r| r.1), ranked.get(1).map(|r| r.1));
        }
    }
    let (_, top, l, r) = best;
    let left = l.map(|lc| (lc, rt.chain(lc.1, &choice)));
    let right = r.map(|rc| (rc, rt.chain(rc.1, &choice)));
    Ok(path_from_parts(top, left, right))
}

/// A star, comb or marked path with at least `t` marked leaves (vertices, for the
/// path), checked in that order.
pub fn comb_or_star(g: &MultiGraph, tree: &BTreeSet<EdgeId>, x: &BTreeSet<VertexId>, t: usize) -> Result<CombStructure, PackingError> {
    let rt = Rooted::new(g, tree, x)?;

    // star
    for &v in &rt.order {
        let rays: Vec<(EdgeId, VertexId)> = rt.adj[&v].iter().copied().filter(|&(_, y)| rt.side_marked(v, y)).collect();
        if rays.len() >= t && t >= 1 {
            let branches: Vec<Path> = rays.iter().map(|&r| rt.ray(v, r, x)).collect();
            return Ok(CombStructure {
                kind: CombKind::Star,
                host_tree: branches.iter().flat_map(|p| p.edges.iter().copied()).collect(),
                marked_leaves: branches.iter().map(Path::end).collect(),
                spine: None,
                center: Some(v),
                branches,
            });
        }
    }

    // comb: f[v] = most tooth-capable vertices on a downward spine from v to a marked
    // vertex, counting v itself when it is internal
    const NONE: i64 = i64::MIN / 4;
    let mut f: BTreeMap<VertexId, i64> = BTreeMap::new();
    let mut choice: BTreeMap<VertexId, Option<(EdgeId, VertexId)>> = BTreeMap::new();
    // (score, top, left arm, right arm)
    type Best = (i64, VertexId, Option<(EdgeId, VertexId)>, Option<(EdgeId, VertexId)>);
    let mut best: Best = (NONE, rt.order[0], None, None);
    for &v in rt.order.iter().rev() {
        let kx = rt.x_children(v);
        let mut val = if x.contains(&v) { 0 } else { NONE };
        let mut pick = None;
        let mut ranked: Vec<(i64, (EdgeId, VertexId))> = Vec::new();
        for &(e, c) in rt.kids(v) {
            if f[&c] == NONE {
                continue;
            }
            ranked.push((f[&c], (e, c)));
            // v internal, spine continues into c: another marked child must remain
            let here = f[&c] + i64::from(kx >= 2);
            if here > val {
                val = here;
                pick = Some((e, c));
            }
        }
        f.insert(v, val);
        choice.insert(v, pick);
        ranked.sort_by(|a, b| b.0.cmp(&a.0).then(a.1 .1.cmp(&b.1 .1)));
        if x.contains(&v) {
            if let Some(&(val, c)) = ranked.first() {
                if val > best.0 {
                    best = (val, v, Some(c), None);
                }
            }
        }
        if ranked.len() >= 2 {
            let val = ranked[0].0 + ranked[1].0 + i64::from(kx >= 3 || rt.up_x[&v]);
            if val > best.0 {
                best = (val, v, Some(ranked[0].1), Some(ranked[1].1));
            }
        }
    }
    if best.0 >= t as i64 && t >= 1 {
        let (_, top, l, r) = best;
        let left = l.map(|lc| (lc, rt.chain(lc.1, &choice)));
        let right = r.map(|rc| (rc, rt.chain(rc.1, &choice)));
        let spine = path_from_parts(top, left, right);
        let on_spine: BTreeSet<VertexId> = spine.vertices.iter().copied().collect();
        let mut branches = Vec::new();
        for i in 1..spine.vertices.len().saturating_sub(1) {
            let w = spine.vertices[i];
            let off = rt.adj[&w].iter().copied().find(|&(_, y)| !on_spine.contains(&y) && rt.side_marked(w, y));
            if let Some(via) = off {
                branches.push(rt.ray(w, via, x));
            }
        }
        let mut marked_leaves = vec![spine.start()];
        marked_leaves.extend(branches.iter().map(Path::end));
        marked_leaves.push(spine.end());
        let mut host_tree: BTreeSet<EdgeId> = spine.edges.iter().copied().collect();
        host_tree.extend(branches.iter().flat_map(|p| p.edges.iter().copied()));
        return Ok(CombStructure { kind: CombKind::Comb, host_tree, marked_leaves, spine: Some(spine), center: None, branches });
    }

    let path = longest_marked_path(g, tree, x)?;
    let marked: Vec<VertexId> = path.vertices.iter().copied().filter(|v| x.contains(v)).collect();
    if marked.len() >= t {
        return Ok(CombStructure {
            kind: CombKind::Path,
            host_tree: path.edges.iter().copied().collect(),
            marked_leaves: marked,
            spine: Some(path),
            center: None,
            branches: Vec::new(),
        });
    }
    Err(PackingError::TooFewMarked { marked: x.len(), t })
}

/// Structural check of a [`comb_or_star`] result against its tree.
pub fn verify_comb_structure(g: &MultiGraph, tree: &BTreeSet<EdgeId>, x: &BTreeSet<VertexId>, t: usize, s: &CombStructure) -> Result<(), String> {
    let mut all: Vec<EdgeId> = Vec::new();
    for p in s.spine.iter().chain(&s.branches) {
        p.check_in(g).map_err(|e| e.to_string())?;
        if !p.is_simple() {
            return Err("structure path repeats a vertex".into());
        }
        all.extend(p.edges.iter().copied());
    }
    let set: BTreeSet<EdgeId> = all.iter().copied().collect();
    if set.len() != all.len() {
        return Err("structure uses an edge twice".into());
    }
    if set != s.host_tree || !set.is_subset(tree) {
        return Err("host edges do not match the tree".into());
    }
    let marked = |v: &VertexId| x.contains(v);
    match s.kind {
        CombKind::Path => {
            let p = s.spine.as_ref().ok_or("path without spine")?;
            let want: Vec<VertexId> = p.vertices.iter().copied().filter(marked).collect();
            if want != s.marked_leaves || want.len() < t {
                return Err(format!("path holds {} marked vertices, need {t}", want.len()));
            }
        }
        CombKind::Star => {
            let c = s.center.ok_or("star without centre")?;
            if s.branches.len() < t {
                return Err(format!("{} rays, need {t}", s.branches.len()));
            }
            let mut seen = BTreeSet::from([c]);
            for r in &s.branches {
                if r.start() != c || !marked(&r.end()) || r.is_empty() {
                    return Err("ray does not run from the centre to a marked vertex".into());
                }
                for &v in &r.vertices[1..] {
                    if !seen.insert(v) {
                        return Err(format!("rays meet at {v}"));
                    }
                }
            }
            if s.marked_leaves != s.branches.iter().map(Path::end).collect::<Vec<_>>() {
                return Err("leaf list does not match the rays".into());
            }
        }
        CombKind::Comb => {
            let sp = s.spine.as_ref().ok_or("comb without spine")?;
            if !marked(&sp.start()) || !marked(&sp.end()) || sp.is_empty() {
                return Err("spine ends are not marked".into());
            }
            if s.branches.len() < t {
                return Err(format!("{} teeth, need {t}", s.branches.len()));
            }
            let mut seen: BTreeSet<VertexId> = sp.vertices.iter().copied().collect();
            let mut last = 0;
            for tooth in &s.branches {
                let at = sp.position(tooth.start()).ok_or("tooth off the spine")?;
                if at == 0 || at + 1 == sp.vertices.len() || at <= last {
                    return Err("teeth must sit on distinct internal spine vertices in order".into());
                }
                last = at;
                if !marked(&tooth.end()) || tooth.is_empty() {
                    return Err("tooth does not end at a marked vertex".into());
                }
                for &v in &tooth.vertices[1..] {
                    if !seen.insert(v) {
                        return Err(format!("tooth meets the comb again at {v}"));
                    }
                }
            }
            let mut leaves = vec![sp.start()];
            leaves.extend(s.branches.iter().map(Path::end));
            leaves.push(sp.end());
            if leaves != s.marked_leaves {
                return Err("leaf list does not match the comb".into());
            }
        }
    }
    Ok(())
}
