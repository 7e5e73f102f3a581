//! Exhaustive searches for tiny instances, used to cross-check the fast paths.
//!
//! Every search checks its size limits first and refuses outright when they are
//! exceeded; running out of time is also an error. A `None` answer returned within
//! budget is definitive.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::connectivity::EdgeCut;
use crate::graph::{EdgeId, MultiGraph, VertexId};
use crate::immersion::ImmersionCertificate;
use crate::linegraph::MinorCertificate;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{what} is {size}, oracle limit is {limit}")]
    BudgetRefusal { what: &'static str, size: usize, limit: usize },
    #[error("oracle ran out of time after {0:?}")]
    TimedOut(Duration),
    #[error("graph has {edges} edges, cut enumeration handles at most {limit}")]
    TooLarge { edges: usize, limit: usize },
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(VertexId),
    #[error("terminal set is empty")]
    EmptySet,
    #[error("terminal sets share vertex {0}")]
    Overlapping(VertexId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OracleBudget {
    pub max_vertices: usize,
    pub max_edges: usize,
    pub max_millis: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { max_vertices: 8, max_edges: 16, max_millis: 30_000 }
    }
}

impl OracleBudget {
    fn admit(&self, g: &MultiGraph) -> Result<Clock, OracleError> {
        if g.vertex_count() > self.max_vertices {
            return Err(OracleError::BudgetRefusal { what: "vertex count", size: g.vertex_count(), limit: self.max_vertices });
        }
        if g.edge_count() > self.max_edges {
            return Err(OracleError::BudgetRefusal { what: "edge count", size: g.edge_count(), limit: self.max_edges });
        }
        Ok(Clock { start: Instant::now(), limit: Duration::from_millis(self.max_millis), ticks: 0 })
    }
}

struct Clock {
    start: Instant,
    limit: Duration,
    ticks: u64,
}

impl Clock {
    fn tick(&mut self) -> Result<(), OracleError> {
        self.ticks += 1;
        if self.ticks.is_multiple_of(4096) && self.start.elapsed() > self.limit {
            return Err(OracleError::TimedOut(self.start.elapsed()));
        }
        Ok(())
    }
}

struct ImmersionSearch<'a> {
    g: &'a MultiGraph,
    h: &'a MultiGraph,
    pattern_vertices: Vec<VertexId>,
    pattern_edges: Vec<(EdgeId, VertexId, VertexId)>,
    terminals: BTreeMap<VertexId, VertexId>,
    used_host: BTreeSet<VertexId>,
    used_edges: BTreeSet<EdgeId>,
    routes: Vec<Vec<EdgeId>>,
    clock: Clock,
}

impl ImmersionSearch<'_> {
    fn place(&mut self, i: usize) -> Result<bool, OracleError> {
        self.clock.tick()?;
        if i == self.pattern_vertices.len() {
            return self.route(0);
        }
        let x = self.pattern_vertices[i];
        for y in self.g.vertices() {
            if self.used_host.contains(&y) || self.g.degree(y) < self.h.degree(x) {
                continue;
            }
            self.terminals.insert(x, y);
            self.used_host.insert(y);
            if self.place(i + 1)? {
                return Ok(true);
            }
            self.used_host.remove(&y);
            self.terminals.remove(&x);
        }
        Ok(false)
    }

    /// Each terminal still needs one free host edge per unrouted pattern edge at it.
    fn degrees_suffice(&self, next: usize) -> bool {
        let mut need: BTreeMap<VertexId, usize> = BTreeMap::new();
        for &(_, u, v) in &self.pattern_edges[next..] {
            *need.entry(u).or_default() += 1;
            *need.entry(v).or_default() += 1;
        }
        need.iter().all(|(x, &k)| {
            let t = self.terminals[x];
            self.g.incident(t).filter(|e| !self.used_edges.contains(e)).count() >= k
        })
    }

    fn route(&mut self, i: usize) -> Result<bool, OracleError> {
        self.clock.tick()?;
        if i == self.pattern_edges.len() {
            return Ok(true);
        }
        if !self.degrees_suffice(i) {
            return Ok(false);
        }
        let (_, u, v) = self.pattern_edges[i];
        // parallel pattern edges are interchangeable: keep their smallest host edges increasing
        let floor = match i.checked_sub(1).map(|j| self.pattern_edges[j]) {
            Some((_, pu, pv)) if (pu, pv) == (u, v) => self.routes[i - 1].iter().min().copied(),
            _ => None,
        };
        let (s, t) = (self.terminals[&u], self.terminals[&v]);
        let mut found = Vec::new();
        let mut visited = BTreeSet::from([s]);
        let mut stack = Vec::new();
        self.simple_paths(s, t, &mut visited, &mut stack, &mut found)?;
        for route in found {
            if let Some(f) = floor {
                if route.iter().min().copied() < Some(f) {
                    continue;
                }
            }
            self.used_edges.extend(route.iter().copied());
            self.routes.push(route);
            if self.route(i + 1)? {
                return Ok(true);
            }
            let route = self.routes.pop().unwrap();
            for e in route {
                self.used_edges.remove(&e);
            }
        }
        Ok(false)
    }

    fn simple_paths(
        &mut self,
        x: VertexId,
        t: VertexId,
        visited: &mut BTreeSet<VertexId>,
        stack: &mut Vec<EdgeId>,
        out: &mut Vec<Vec<EdgeId>>,
    ) -> Result<(), OracleError> {
        self.clock.tick()?;
        if x == t {
            out.push(stack.clone());
            return Ok(());
        }
        let incident: Vec<EdgeId> = self.g.incident(x).collect();
        for e in incident {
            if self.used_edges.contains(&e) {
                continue;
            }
            let y = self.g.edge(e).unwrap().other(x).unwrap();
            if !visited.insert(y) {
                continue;
            }
            stack.push(e);
            self.simple_paths(y, t, visited, stack, out)?;
            stack.pop();
            visited.remove(&y);
        }
        Ok(())
    }
}

/// Immersion of `h` in `g` by trying every injective terminal map and, for each, every
/// routing of the pattern edges along edge-disjoint simple paths.
pub fn brute_immersion(g: &MultiGraph, h: &MultiGraph, budget: OracleBudget) -> Result<Option<ImmersionCertificate>, OracleError> {
    let clock = budget.admit(g)?;
    if h.vertex_count() > g.vertex_count() || h.edge_count() > g.edge_count() {
        return Ok(None);
    }
    let mut pattern_edges: Vec<(EdgeId, VertexId, VertexId)> = h.edges().map(|e| (e.id, e.u.min(e.v), e.u.max(e.v))).collect();
    pattern_edges.sort_by_key(|&(id, u, v)| (u, v, id));
    let mut search = ImmersionSearch {
        g,
        h,
        pattern_vertices: h.vertices().collect(),
        pattern_edges,
        terminals: BTreeMap::new(),
        used_host: BTreeSet::new(),
        used_edges: BTreeSet::new(),
        routes: Vec::new(),
        clock,
    };
    if !search.place(0)? {
        return Ok(None);
    }
    let mut paths = BTreeMap::new();
    for (&(id, lo, _), route) in search.pattern_edges.iter().zip(&search.routes) {
        let rec = h.edge(id).unwrap();
        // routes run from the lower pattern end; flip when the edge is stored the other way
        let mut route = route.clone();
        if rec.u != lo {
            route.reverse();
        }
        paths.insert(id, route);
    }
    Ok(Some(ImmersionCertificate { pattern: h.clone(), terminals: search.terminals, paths }))
}

/// Largest host on which [`brute_minor`] enumerates connected vertex subsets.
const MINOR_VERTEX_CAP: usize = 16;

/// Minor model of `h` in `g`: one connected branch set per pattern vertex, chosen in
/// turn among all connected vertex subsets disjoint from the earlier ones, each
/// checked against the earlier sets for enough joining host edges.
pub fn brute_minor(g: &MultiGraph, h: &MultiGraph, budget: OracleBudget) -> Result<Option<MinorCertificate>, OracleError> {
    let mut clock = budget.admit(g)?;
    let n = g.vertex_count();
    if n > MINOR_VERTEX_CAP {
        return Err(OracleError::BudgetRefusal { what: "vertex count", size: n, limit: MINOR_VERTEX_CAP });
    }
    if h.vertex_count() > n {
        return Ok(None);
    }
    let hv: Vec<VertexId> = g.vertices().collect();
    let index: BTreeMap<VertexId, usize> = hv.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut nbr = vec![0u32; n];
    let mut count = vec![vec![0usize; n]; n];
    for e in g.edges() {
        let (a, b) = (index[&e.u], index[&e.v]);
        nbr[a] |= 1 << b;
        nbr[b] |= 1 << a;
        count[a][b] += 1;
        count[b][a] += 1;
    }
    let connected = |mask: u32| -> bool {
        let start = mask & mask.wrapping_neg();
        let mut seen = start;
        let mut frontier = start;
        while frontier != 0 {
            let i = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let new = nbr[i] & mask & !seen;
            seen |= new;
            frontier |= new;
        }
        seen == mask
    };
    let mut subsets = Vec::new();
    for mask in 1u32..(1u32 << n) {
        clock.tick()?;
        if connected(mask) {
            subsets.push(mask);
        }
    }
    subsets.sort_by_key(|m| (m.count_ones(), *m));

    // pattern vertices by decreasing degree; demand[i][j] = edges between them
    let mut order: Vec<VertexId> = h.vertices().collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(h.degree(v)), v));
    let pos: BTreeMap<VertexId, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let k = order.len();
    let mut demand = vec![vec![0usize; k]; k];
    for e in h.edges() {
        let (a, b) = (pos[&e.u], pos[&e.v]);
        demand[a][b] += 1;
        demand[b][a] += 1;
    }
    let between = |s: u32, t: u32| -> usize {
        let mut total = 0;
        let mut bits = s;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let mut other = t & nbr[i];
            while other != 0 {
                let j = other.trailing_zeros() as usize;
                other &= other - 1;
                total += count[i][j];
            }
        }
        total
    };

    fn dfs(
        i: usize,
        used: u32,
        chosen: &mut Vec<u32>,
        subsets: &[u32],
        demand: &[Vec<usize>],
        n: usize,
        between: &dyn Fn(u32, u32) -> usize,
        clock: &mut Clock,
    ) -> Result<bool, OracleError> {
        let k = demand.len();
        if i == k {
            return Ok(true);
        }
        if (n as u32 - used.count_ones()) < (k - i) as u32 {
            return Ok(false);
        }
        for &s in subsets {
            clock.tick()?;
            if s & used != 0 || (n as u32 - (used | s).count_ones()) < (k - i - 1) as u32 {
                continue;
            }
            if (0..i).all(|j| demand[i][j] == 0 || between(s, chosen[j]) >= demand[i][j]) {
                chosen.push(s);
                if dfs(i + 1, used | s, chosen, subsets, demand, n, between, clock)? {
                    return Ok(true);
                }
                chosen.pop();
            }
        }
        Ok(false)
    }

    let mut chosen = Vec::new();
    if !dfs(0, 0, &mut chosen, &subsets, &demand, n, &between, &mut clock)? {
        return Ok(None);
    }
    let set_of = |mask: u32| -> BTreeSet<VertexId> { (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| hv[i]).collect() };
    let branch_sets: BTreeMap<VertexId, BTreeSet<VertexId>> = order.iter().zip(&chosen).map(|(&v, &m)| (v, set_of(m))).collect();
    let mut spare: BTreeMap<(VertexId, VertexId), Vec<EdgeId>> = BTreeMap::new();
    let owner: BTreeMap<VertexId, VertexId> = branch_sets.iter().flat_map(|(&p, s)| s.iter().map(move |&x| (x, p))).collect();
    for e in g.edges() {
        if let (Some(&a), Some(&b)) = (owner.get(&e.u), owner.get(&e.v)) {
            if a != b {
                spare.entry((a.min(b), a.max(b))).or_default().push(e.id);
            }
        }
    }
    let mut edge_witness = BTreeMap::new();
    for pe in h.edges() {
        let list = spare.get_mut(&(pe.u.min(pe.v), pe.u.max(pe.v))).expect("demand checked");
        edge_witness.insert(pe.id, list.remove(0));
    }
    Ok(Some(MinorCertificate { pattern: h.clone(), branch_sets, edge_witness }))
}

/// Most edges [`brute_min_cut`] enumerates subsets of.
pub const CUT_EDGE_LIMIT: usize = 20;

/// Minimum A–B edge cut by trying edge subsets in order of size (then
/// lexicographically) until one disconnects A from B.
pub fn brute_min_cut(g: &MultiGraph, a: &BTreeSet<VertexId>, b: &BTreeSet<VertexId>) -> Result<EdgeCut, OracleError> {
    if g.edge_count() > CUT_EDGE_LIMIT {
        return Err(OracleError::TooLarge { edges: g.edge_count(), limit: CUT_EDGE_LIMIT });
    }
    if a.is_empty() || b.is_empty() {
        return Err(OracleError::EmptySet);
    }
    for &v in a.iter().chain(b) {
        if !g.has_vertex(v) {
            return Err(OracleError::UnknownVertex(v));
        }
    }
    if let Some(&v) = a.intersection(b).next() {
        return Err(OracleError::Overlapping(v));
    }
    let edges: Vec<EdgeId> = g.edge_ids().collect();
    let m = edges.len();
    let reach = |removed: &BTreeSet<EdgeId>| -> BTreeSet<VertexId> {
        let mut seen: BTreeSet<VertexId> = a.clone();
        let mut stack: Vec<VertexId> = a.iter().copied().collect();
        while let Some(x) = stack.pop() {
            for e in g.incident(x) {
                if removed.contains(&e) {
                    continue;
                }
                let y = g.edge(e).unwrap().other(x).unwrap();
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        seen
    };
    for size in 0..=m {
        let mut pick: Vec<usize> = (0..size).collect();
        loop {
            let removed: BTreeSet<EdgeId> = pick.iter().map(|&i| edges[i]).collect();
            let side = reach(&removed);
            if side.is_disjoint(b) {
                return Ok(EdgeCut::of_side(g, side));
            }
            // next combination in lexicographic order
            let Some(i) = (0..size).rev().find(|&i| pick[i] < m - size + i) else { break };
            pick[i] += 1;
            for j in i + 1..size {
                pick[j] = pick[j - 1] + 1;
            }
        }
    }
    unreachable!("removing every edge separates disjoint sets")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete, complete_bipartite, cycle, cycle_multi};
    use crate::immersion::verify_immersion;
    use crate::linegraph::verify_minor;

    #[test]
    fn self_immersion() {
        let g = cycle_multi(2, 3).unwrap();
        let cert = brute_immersion(&g, &g, OracleBudget::default()).unwrap().unwrap();
        verify_immersion(&g, &cert).unwrap();
    }

    #[test]
    fn k23_immerses_triangle() {
        let g = complete_bipartite(2, 3).unwrap();
        let cert = brute_immersion(&g, &cycle(3).unwrap(), OracleBudget::default()).unwrap().unwrap();
        verify_immersion(&g, &cert).unwrap();
    }

    #[test]
    fn k33_holds_no_root_of_k5() {
        // roots of K_5: multi-stars with five edges and triangles with multiplicities summing to five
        let g = complete_bipartite(3, 3).unwrap();
        let candidates: Vec<Vec<(u32, u32)>> = vec![
            vec![(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)],
            vec![(0, 1), (0, 1), (0, 2), (0, 2), (0, 3)],
            vec![(0, 1), (0, 1), (0, 1), (0, 2), (0, 2)],
            vec![(0, 1); 5],
            vec![(0, 1), (1, 2), (2, 0), (2, 0), (2, 0)],
            vec![(0, 1), (1, 2), (1, 2), (2, 0), (2, 0)],
        ];
        for edges in candidates {
            let n = edges.iter().map(|&(u, v)| u.max(v)).max().unwrap() + 1;
            let h = MultiGraph::from_edge_list(n, &edges).unwrap();
            assert_eq!(h.line_graph().graph.edge_count(), 10);
            assert_eq!(brute_immersion(&g, &h, OracleBudget::default()).unwrap(), None, "{edges:?}");
        }
    }

    #[test]
    fn refuses_large_hosts() {
        let g = complete(9);
        assert!(matches!(
            brute_immersion(&g, &cycle(3).unwrap(), OracleBudget::default()),
            Err(OracleError::BudgetRefusal { what: "vertex count", size: 9, limit: 8 })
        ));
    }

    #[test]
    fn edge_minor() {
        let g = cycle(5).unwrap();
        let h = MultiGraph::from_edge_list(2, &[(0, 1)]).unwrap();
        let cert = brute_minor(&g, &h, OracleBudget::default()).unwrap().unwrap();
        verify_minor(&g, &cert).unwrap();
    }

    #[test]
    fn cycle_has_no_k4_minor() {
        let g = cycle(6).unwrap();
        assert_eq!(brute_minor(&g, &complete(4), OracleBudget::default()).unwrap(), None);
        let tri = brute_minor(&g, &complete(3), OracleBudget::default()).unwrap().unwrap();
        verify_minor(&g, &tri).unwrap();
    }

    #[test]
    fn cut_of_a_single_edge() {
        let g = MultiGraph::from_edge_list(2, &[(0, 1)]).unwrap();
        let cut = brute_min_cut(&g, &BTreeSet::from([VertexId(0)]), &BTreeSet::from([VertexId(1)])).unwrap();
        assert_eq!(cut.cut_edges, BTreeSet::from([EdgeId(0)]));
    }

    #[test]
    fn cut_in_doubled_triangle() {
        let g = cycle_multi(2, 3).unwrap();
        let cut = brute_min_cut(&g, &BTreeSet::from([VertexId(0)]), &BTreeSet::from([VertexId(1)])).unwrap();
        assert_eq!(cut.size(), 4);
    }

    #[test]
    fn cut_refusals() {
        let big = cycle_multi(3, 7).unwrap();
        assert!(matches!(brute_min_cut(&big, &BTreeSet::from([VertexId(0)]), &BTreeSet::from([VertexId(1)])), Err(OracleError::TooLarge { edges: 21, limit: 20 })));
        let g = cycle(3).unwrap();
        let s = BTreeSet::from([VertexId(0)]);
        assert_eq!(brute_min_cut(&g, &s, &s), Err(OracleError::Overlapping(VertexId(0))));
    }
}
