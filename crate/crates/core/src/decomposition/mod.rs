//! Tree-decompositions and the ring-decompositions extracted from them.
//!
//! Properties checked on a decomposition `(T, Y)` of `g`:
//! - W1: every vertex and every edge (both ends) lies in some bag;
//! - W2: the bags containing any vertex form a subtree;
//! - W3 (linked): for tree vertices t, t' and every k, either k disjoint paths join
//!   Y_t and Y_t', or some bag on the tree path between them has fewer than k vertices;
//! - W4: bags are pairwise distinct;
//! - W5: for every t and every component B of T − t, the bags of B hold a vertex
//!   outside Y_t.

mod gates;
mod ring;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::connectivity::vertex_disjoint_paths_limited;
use crate::generators::Decomposed;
use crate::graph::{MultiGraph, VertexId};

pub use gates::{avoid_u_window, find_gates, GateWindow, GatesReport};
pub use ring::{absorb, build_ring, connectify, discover_ring, verify_ring, Connectified, RingDecomposition, RingReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompositionError {
    #[error("malformed decomposition: {0}")]
    MalformedDecomposition(String),
    #[error("decomposition has {size} tree vertices, above the ceiling of {ceiling}")]
    TooLarge { size: usize, ceiling: usize },
    #[error("gate window holds {got} gates, at least {needed} needed")]
    WindowTooSmall { got: usize, needed: usize },
    #[error("ring of length {length} is too short; need {needed}")]
    TooShort { length: usize, needed: usize },
}

fn malformed(msg: impl Into<String>) -> DecompositionError {
    DecompositionError::MalformedDecomposition(msg.into())
}

/// A tree with a bag of host vertices on every tree vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawDecomposition")]
pub struct TreeDecomposition {
    tree: MultiGraph,
    bags: BTreeMap<VertexId, BTreeSet<VertexId>>,
}

#[derive(Deserialize)]
struct RawDecomposition {
    tree: MultiGraph,
    bags: BTreeMap<VertexId, BTreeSet<VertexId>>,
}

impl TryFrom<RawDecomposition> for TreeDecomposition {
    type Error = DecompositionError;

    fn try_from(raw: RawDecomposition) -> Result<Self, Self::Error> {
        TreeDecomposition::unchecked(raw.tree, raw.bags)
    }
}

impl TreeDecomposition {
    /// Decomposition of `g`; fails unless `tree` is a tree with a bag on every vertex
    /// and W1 and W2 hold.
    pub fn new(
        g: &MultiGraph,
        tree: MultiGraph,
        bags: BTreeMap<VertexId, BTreeSet<VertexId>>,
    ) -> Result<Self, DecompositionError> {
        let td = TreeDecomposition::unchecked(tree, bags)?;
        let report = verify_td(g, &td)?;
        if !report.w1 || !report.w2 {
            return Err(malformed(report.problems.join("; ")));
        }
        Ok(td)
    }

    /// Shape checks only: `tree` is a tree and every tree vertex has a bag.
    fn unchecked(tree: MultiGraph, bags: BTreeMap<VertexId, BTreeSet<VertexId>>) -> Result<Self, DecompositionError> {
        if tree.vertex_count() == 0 {
            return Err(malformed("empty tree"));
        }
        if tree.edge_count() + 1 != tree.vertex_count() || !tree.is_connected() {
            return Err(malformed("tree is not a tree"));
        }
        if bags.keys().ne(tree.vertices().collect::<Vec<_>>().iter()) {
            return Err(malformed("bags do not match tree vertices"));
        }
        Ok(TreeDecomposition { tree, bags })
    }

    pub fn from_decomposed(d: &Decomposed) -> Result<Self, DecompositionError> {
        let n = d.bags.len() as u32;
        let edges: Vec<(u32, u32)> = d.tree_edges.iter().map(|&(a, b)| (a as u32, b as u32)).collect();
        let tree = MultiGraph::from_edge_list(n, &edges).map_err(|e| malformed(e.to_string()))?;
        let bags = d.bags.iter().enumerate().map(|(i, b)| (VertexId(i as u32), b.clone())).collect();
        TreeDecomposition::new(&d.graph, tree, bags)
    }

    pub fn tree(&self) -> &MultiGraph {
        &self.tree
    }

    pub fn bags(&self) -> &BTreeMap<VertexId, BTreeSet<VertexId>> {
        &self.bags
    }

    pub fn bag(&self, t: VertexId) -> &BTreeSet<VertexId> {
        &self.bags[&t]
    }

    /// Largest bag size minus one.
    pub fn width(&self) -> usize {
        self.bags.values().map(BTreeSet::len).max().unwrap_or(0).saturating_sub(1)
    }

    /// Tree vertices on the path from `a` to `b`, inclusive.
    pub fn tree_path(&self, a: VertexId, b: VertexId) -> Vec<VertexId> {
        let (vs, _) = self.tree.shortest_path(a, &BTreeSet::from([b]), |_| true).unwrap_or((vec![a], vec![]));
        vs
    }

    /// Components of T − t as vertex sets.
    fn branches(&self, t: VertexId) -> Vec<BTreeSet<VertexId>> {
        let mut seen = BTreeSet::from([t]);
        let mut out = Vec::new();
        for start in self.tree.neighbors(t) {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = BTreeSet::from([start]);
            seen.insert(start);
            let mut q = VecDeque::from([start]);
            while let Some(x) = q.pop_front() {
                for y in self.tree.neighbors(x) {
                    if seen.insert(y) {
                        comp.insert(y);
                        q.push_back(y);
                    }
                }
            }
            out.push(comp);
        }
        out
    }
}

/// Which of W1, W2, W4, W5 hold, with a note per failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TdReport {
    pub w1: bool,
    pub w2: bool,
    pub w4: bool,
    pub w5: bool,
    pub width: usize,
    pub problems: Vec<String>,
}

impl TdReport {
    pub fn all(&self) -> bool {
        self.w1 && self.w2 && self.w4 && self.w5
    }
}

pub fn verify_td(g: &MultiGraph, td: &TreeDecomposition) -> Result<TdReport, DecompositionError> {
    for (t, bag) in &td.bags {
        if let Some(v) = bag.iter().find(|v| !g.has_vertex(**v)) {
            return Err(malformed(format!("bag {t} holds {v}, which is not a host vertex")));
        }
    }
    let mut problems = Vec::new();
    let mut holders: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for (&t, bag) in &td.bags {
        for &v in bag {
            holders.entry(v).or_default().push(t);
        }
    }

    let mut w1 = true;
    if let Some(v) = g.vertices().find(|v| !holders.contains_key(v)) {
        w1 = false;
        problems.push(format!("W1: vertex {v} is in no bag"));
    }
    if let Some(e) = g.edges().find(|e| !td.bags.values().any(|b| b.contains(&e.u) && b.contains(&e.v))) {
        w1 = false;
        problems.push(format!("W1: no bag holds both ends of {}", e.id));
    }

    let mut w2 = true;
    for (v, ts) in &holders {
        let inside: BTreeSet<VertexId> = ts.iter().copied().collect();
        let links = td.tree.edges().filter(|e| inside.contains(&e.u) && inside.contains(&e.v)).count();
        if links + 1 != inside.len() {
            w2 = false;
            problems.push(format!("W2: bags holding {v} are not connected in the tree"));
            break;
        }
    }

    let mut w4 = true;
    let mut seen: BTreeMap<&BTreeSet<VertexId>, VertexId> = BTreeMap::new();
    for (&t, bag) in &td.bags {
        if let Some(&first) = seen.get(bag) {
            w4 = false;
            problems.push(format!("W4: bags {first} and {t} are equal"));
            break;
        }
        seen.insert(bag, t);
    }

    let mut w5 = true;
    'outer: for &t in td.bags.keys() {
        let own = &td.bags[&t];
        for branch in td.branches(t) {
            if branch.iter().all(|b| td.bags[b].is_subset(own)) {
                w5 = false;
                problems.push(format!("W5: a branch at {t} adds nothing beyond its bag"));
                break 'outer;
            }
        }
    }
    Ok(TdReport { w1, w2, w4, w5, width: td.width(), problems })
}

/// A tree-vertex pair and a `k` for which W3 fails.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkViolation {
    pub t: VertexId,
    pub u: VertexId,
    pub k: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LinkedReport {
    pub linked: bool,
    pub violation: Option<LinkViolation>,
    pub pairs_checked: usize,
    pub sampled: bool,
}

/// Full W3 check over every pair of tree vertices; refuses trees above `ceiling`.
pub fn verify_linked(g: &MultiGraph, td: &TreeDecomposition, ceiling: usize) -> Result<LinkedReport, DecompositionError> {
    let n = td.tree.vertex_count();
    if n > ceiling {
        return Err(DecompositionError::TooLarge { size: n, ceiling });
    }
    let ts: Vec<VertexId> = td.tree.vertices().collect();
    let mut pairs = Vec::new();
    for i in 0..ts.len() {
        for j in i + 1..ts.len() {
            pairs.push((ts[i], ts[j]));
        }
    }
    Ok(check_pairs(g, td, &pairs, false))
}

/// W3 on `samples` seeded random pairs; a passing report is evidence, not proof.
pub fn verify_linked_sampled(g: &MultiGraph, td: &TreeDecomposition, samples: usize, seed: u64) -> LinkedReport {
    let ts: Vec<VertexId> = td.tree.vertices().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(samples);
    if ts.len() >= 2 {
        for _ in 0..samples {
            let two: Vec<&VertexId> = ts.choose_multiple(&mut rng, 2).collect();
            pairs.push((*two[0], *two[1]));
        }
    }
    check_pairs(g, td, &pairs, true)
}

fn check_pairs(g: &MultiGraph, td: &TreeDecomposition, pairs: &[(VertexId, VertexId)], sampled: bool) -> LinkedReport {
    for (i, &(t, u)) in pairs.iter().enumerate() {
        let narrowest = td.tree_path(t, u).iter().map(|x| td.bags[x].len()).min().unwrap_or(0);
        let found = vertex_disjoint_paths_limited(g, &td.bags[&t], &td.bags[&u], narrowest).len();
        if found < narrowest {
            return LinkedReport {
                linked: false,
                violation: Some(LinkViolation { t, u, k: found + 1 }),
                pairs_checked: i + 1,
                sampled,
            };
        }
    }
    LinkedReport { linked: true, violation: None, pairs_checked: pairs.len(), sampled }
}

/// Min-fill elimination decomposition of `g` (any graph; parallel edges ignored).
/// Bags contained in a neighbouring bag are merged away.
pub fn heuristic_td(g: &MultiGraph) -> TreeDecomposition {
    let mut adj: BTreeMap<VertexId, BTreeSet<VertexId>> = g.vertices().map(|v| (v, g.neighbors(v))).collect();
    let mut order = Vec::new();
    let mut bag_of: BTreeMap<VertexId, BTreeSet<VertexId>> = BTreeMap::new();
    while !adj.is_empty() {
        let fill = |v: &VertexId, adj: &BTreeMap<VertexId, BTreeSet<VertexId>>| {
            let nb: Vec<&VertexId> = adj[v].iter().collect();
            let mut missing = 0;
            for i in 0..nb.len() {
                for j in i + 1..nb.len() {
                    if !adj[nb[i]].contains(nb[j]) {
                        missing += 1;
                    }
                }
            }
            missing
        };
        let v = *adj.keys().min_by_key(|v| (fill(v, &adj), adj[*v].len(), **v)).unwrap();
        let nb = adj.remove(&v).unwrap();
        for &a in &nb {
            let set = adj.get_mut(&a).unwrap();
            set.remove(&v);
            set.extend(nb.iter().copied().filter(|&b| b != a));
        }
        let mut bag = nb.clone();
        bag.insert(v);
        bag_of.insert(v, bag);
        order.push(v);
    }
    if order.is_empty() {
        let mut tree = MultiGraph::new();
        tree.add_vertex(VertexId(0));
        return TreeDecomposition { tree, bags: BTreeMap::from([(VertexId(0), BTreeSet::new())]) };
    }
    let pos: BTreeMap<VertexId, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    // node i carries the bag of order[i]; its parent is the earliest-eliminated later neighbour
    let mut parent: Vec<Option<usize>> = vec![None; order.len()];
    for (i, v) in order.iter().enumerate() {
        parent[i] = bag_of[v].iter().filter(|&&x| x != *v).map(|x| pos[x]).min();
    }
    // link roots of separate components in a chain
    let roots: Vec<usize> = (0..order.len()).filter(|&i| parent[i].is_none()).collect();
    for w in roots.windows(2) {
        parent[w[0]] = Some(w[1]);
    }
    let mut bags: Vec<Option<BTreeSet<VertexId>>> = order.iter().map(|v| Some(bag_of[v].clone())).collect();
    // merge a node into its parent when its bag adds nothing, and a parent into a child
    // holding all of it
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..order.len() {
            let (Some(p), Some(bi)) = (parent[i], bags[i].clone()) else { continue };
            let bp = bags[p].clone().unwrap();
            if bi.is_subset(&bp) {
                bags[i] = None;
                for c in parent.iter_mut() {
                    if *c == Some(i) {
                        *c = Some(p);
                    }
                }
                parent[i] = None;
                changed = true;
            } else if bp.is_subset(&bi) {
                bags[p] = None;
                let grand = parent[p];
                for (c, slot) in parent.iter_mut().enumerate() {
                    if *slot == Some(p) && c != i {
                        *slot = Some(i);
                    }
                }
                parent[i] = grand;
                parent[p] = None;
                changed = true;
            }
        }
    }
    let alive: Vec<usize> = (0..order.len()).filter(|&i| bags[i].is_some()).collect();
    let id: BTreeMap<usize, u32> = alive.iter().enumerate().map(|(k, &i)| (i, k as u32)).collect();
    let mut tree = MultiGraph::with_vertices(alive.len() as u32);
    let mut out = BTreeMap::new();
    for &i in &alive {
        if let Some(p) = parent[i] {
            tree.add_edge(VertexId(id[&i]), VertexId(id[&p])).expect("tree edge");
        }
        out.insert(VertexId(id[&i]), bags[i].take().unwrap());
    }
    TreeDecomposition { tree, bags: out }
}

/// Checks of the tree-degree bound Δ(T) ≤ (w + 1)d and of the component count
/// "g − Y_t has at least deg_T(t) components" for every tree vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DegreeBoundReport {
    pub max_tree_degree: usize,
    pub bound: usize,
    pub degree_bound_holds: bool,
    pub component_bound_holds: bool,
    /// Tree vertex where g − Y_t has fewer components than its tree degree.
    pub component_failure: Option<VertexId>,
}

pub fn degree_bound_check(g: &MultiGraph, td: &TreeDecomposition, d: usize) -> DegreeBoundReport {
    let max_tree_degree = td.tree.max_degree();
    let bound = (td.width() + 1) * d;
    let mut component_failure = None;
    for (&t, bag) in &td.bags {
        let mut h = g.clone();
        for &v in bag {
            let _ = h.remove_vertex(v);
        }
        if h.components().len() < td.tree.degree(t) {
            component_failure = Some(t);
            break;
        }
    }
    DegreeBoundReport {
        max_tree_degree,
        bound,
        degree_bound_holds: max_tree_degree <= bound,
        component_bound_holds: component_failure.is_none(),
        component_failure,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{caterpillar_of_cliques, cycle, grid, ladder};

    fn single_bag(g: &MultiGraph) -> TreeDecomposition {
        let mut tree = MultiGraph::new();
        tree.add_vertex(VertexId(0));
        TreeDecomposition::new(g, tree, BTreeMap::from([(VertexId(0), g.vertex_set().clone())])).unwrap()
    }

    fn path_td(g: &MultiGraph, bags: &[&[u32]]) -> Result<TreeDecomposition, DecompositionError> {
        let n = bags.len() as u32;
        let edges: Vec<(u32, u32)> = (1..n).map(|i| (i - 1, i)).collect();
        let tree = MultiGraph::from_edge_list(n, &edges).unwrap();
        let bags = bags.iter().enumerate().map(|(i, b)| (VertexId(i as u32), b.iter().map(|&v| VertexId(v)).collect())).collect();
        TreeDecomposition::new(g, tree, bags)
    }

    #[test]
    fn single_bag_is_lean() {
        let g = cycle(5).unwrap();
        let td = single_bag(&g);
        let rep = verify_td(&g, &td).unwrap();
        assert!(rep.all(), "{rep:?}");
        assert!(verify_linked(&g, &td, 200).unwrap().linked);
        let deg = degree_bound_check(&g, &td, 2);
        assert_eq!(deg.max_tree_degree, 0);
        assert!(deg.degree_bound_holds && deg.component_bound_holds);
    }

    #[test]
    fn equal_adjacent_bags_fail_w4() {
        let g = MultiGraph::from_edge_list(3, &[(0, 1), (1, 2)]).unwrap();
        let td = path_td(&g, &[&[0, 1], &[0, 1], &[1, 2]]).unwrap();
        let rep = verify_td(&g, &td).unwrap();
        assert!(rep.w1 && rep.w2 && !rep.w4);
        // the middle bag adds nothing to the branch holding it
        assert!(!rep.w5);
    }

    #[test]
    fn construction_rejects_broken_cover() {
        let g = MultiGraph::from_edge_list(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(path_td(&g, &[&[0, 1], &[1, 2]]).is_err());
        // vertex 1 in two bags that are not adjacent
        assert!(path_td(&g, &[&[0, 1, 2], &[0], &[1]]).is_err());
    }

    #[test]
    fn natural_decompositions_are_lean() {
        for d in [ladder(6).unwrap(), caterpillar_of_cliques(4, 6, 2, 2).unwrap(), caterpillar_of_cliques(3, 4, 2, 0).unwrap()] {
            let td = TreeDecomposition::from_decomposed(&d).unwrap();
            let rep = verify_td(&d.graph, &td).unwrap();
            assert!(rep.all(), "{rep:?}");
            assert!(verify_linked(&d.graph, &td, 200).unwrap().linked);
            let deg = degree_bound_check(&d.graph, &td, d.graph.max_degree());
            assert!(deg.degree_bound_holds && deg.component_bound_holds);
        }
    }

    #[test]
    fn path_of_cliques_meets_component_count_exactly() {
        // separator bags of a path of cliques split the host into exactly two pieces
        let d = caterpillar_of_cliques(3, 4, 1, 0).unwrap();
        let td = TreeDecomposition::from_decomposed(&d).unwrap();
        for (&t, bag) in td.bags() {
            if bag.len() == 1 {
                let mut h = d.graph.clone();
                h.remove_vertex(*bag.iter().next().unwrap()).unwrap();
                assert_eq!(h.components().len(), td.tree().degree(t));
            }
        }
    }

    #[test]
    fn linked_through_narrow_bag() {
        // two triangles joined by a doubled path through the single vertex 2
        let g = MultiGraph::from_edge_list(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]).unwrap();
        let td = path_td(&g, &[&[0, 1, 2], &[2], &[2, 3, 4]]).unwrap();
        let rep = verify_linked(&g, &td, 200).unwrap();
        assert!(rep.linked);
        assert!(matches!(verify_linked(&g, &td, 2), Err(DecompositionError::TooLarge { size: 3, ceiling: 2 })));
    }

    #[test]
    fn unlinked_pair_is_reported() {
        // bags {0,1} and {3,4} with every bag between of size 2, but only one
        // vertex-disjoint path: 0-2-3 (1 and 4 are leaves on 0 and 3)
        let g = MultiGraph::from_edge_list(5, &[(0, 1), (0, 2), (2, 3), (3, 4)]).unwrap();
        let td = path_td(&g, &[&[0, 1], &[0, 2, 3], &[3, 4]]).unwrap();
        let rep = verify_linked(&g, &td, 200).unwrap();
        assert!(!rep.linked);
        assert_eq!(rep.violation.unwrap().k, 2);
        assert!(!verify_linked_sampled(&g, &td, 20, 1).linked);
    }

    #[test]
    fn heuristic_widths() {
        let tree = MultiGraph::from_edge_list(6, &[(0, 1), (1, 2), (1, 3), (3, 4), (3, 5)]).unwrap();
        let td = heuristic_td(&tree);
        assert!(verify_td(&tree, &td).unwrap().w1);
        assert_eq!(td.width(), 1);
        for n in [3, 5, 9] {
            let g = cycle(n).unwrap();
            let td = heuristic_td(&g);
            let rep = verify_td(&g, &td).unwrap();
            assert!(rep.w1 && rep.w2, "{rep:?}");
            assert_eq!(td.width(), 2);
        }
        let j5 = grid(5).unwrap();
        let td = heuristic_td(&j5);
        let rep = verify_td(&j5, &td).unwrap();
        assert!(rep.w1 && rep.w2 && rep.w4, "{rep:?}");
        assert!(td.width() <= 5);
    }

    #[test]
    fn json_round_trip() {
        let d = ladder(3).unwrap();
        let td = TreeDecomposition::from_decomposed(&d).unwrap();
        let text = serde_json::to_string(&td).unwrap();
        assert!(text.starts_with(r#"{"tree":"#) && text.contains(r#""bags":{"0":[0,1,2,3]"#), "{text}");
        let back: TreeDecomposition = serde_json::from_str(&text).unwrap();
        assert_eq!(back, td);
        let broken = text.replace(r#""bags":{"0":[0,1,2,3],"#, r#""bags":{"#);
        assert!(serde_json::from_str::<TreeDecomposition>(&broken).is_err());
    }
}
