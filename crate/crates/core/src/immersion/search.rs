//! Budgeted search for C_{t,r} immersions.
//!
//! Stages, in order: recognise `g` as C_{t,r} itself; for t = 2 try a supplied or
//! discovered ring decomposition; on small graphs run a complete search over cyclic
//! terminal sequences and simple-path routings; otherwise grow a chain of terminals,
//! routing `t` shortest edge-disjoint paths between consecutive ones and checking that
//! the chain can still be closed. Every certificate is verified before it is returned.

use std::collections::{BTreeSet, VecDeque};

use super::double::double_cycle_from_ring;
use super::mincost::Router;
use super::{verify_immersion, ImmersionCertificate};
use crate::budget::{Meter, SearchBudget};
use crate::decomposition::{discover_ring, RingDecomposition};
use crate::generators::cycle_multi;
use crate::graph::{MultiGraph, VertexId};
use crate::path::Path;

#[derive(Clone, Debug)]
pub struct CycleSearchOptions {
    pub budget: SearchBudget,
    /// Ring decomposition to try first (t = 2 only).
    pub ring: Option<RingDecomposition>,
    /// Look for a ring decomposition when none is supplied.
    pub discover_ring: bool,
    /// Restrict terminals to these vertices.
    pub terminals: Option<BTreeSet<VertexId>>,
    /// Graphs with at most this many edges get the complete search.
    pub exhaustive_edge_limit: usize,
    /// Candidates tried per chain position.
    pub branching: usize,
}

impl Default for CycleSearchOptions {
    fn default() -> Self {
        CycleSearchOptions {
            budget: SearchBudget::default(),
            ring: None,
            discover_ring: true,
            terminals: None,
            exhaustive_edge_limit: 16,
            branching: 6,
        }
    }
}

impl CycleSearchOptions {
    pub fn with_budget(budget: SearchBudget) -> Self {
        CycleSearchOptions { budget, ..Default::default() }
    }
}

/// C_{2,r} immersion in `g`, or `None` when none was found within `budget`.
pub fn find_double_cycle(g: &MultiGraph, r: usize, budget: SearchBudget) -> Option<ImmersionCertificate> {
    find_multi_cycle(g, 2, r, &CycleSearchOptions::with_budget(budget))
}

/// C_{t,r} immersion in `g` found by the staged search described in the module docs.
pub fn find_multi_cycle(g: &MultiGraph, t: usize, r: usize, opts: &CycleSearchOptions) -> Option<ImmersionCertificate> {
    if t == 0 || r < 2 {
        return None;
    }
    let accept = |cert: ImmersionCertificate| verify_immersion(g, &cert).is_ok().then_some(cert);
    if let Some(cert) = recognise(g, t, r, opts.terminals.as_ref()) {
        return accept(cert);
    }
    let allowed = |v: VertexId| opts.terminals.as_ref().is_none_or(|s| s.contains(&v));
    let eligible: Vec<VertexId> = g.vertices().filter(|&v| allowed(v) && g.degree(v) >= 2 * t).collect();
    if eligible.len() < r || g.edge_count() < t * r {
        return None;
    }
    if t == 2 && opts.terminals.is_none() {
        let ring = match &opts.ring {
            Some(ring) => Some(ring.clone()),
            None if opts.discover_ring && g.edge_count() > opts.exhaustive_edge_limit => discover_ring(g, r),
            None => None,
        };
        if let Some(cert) = ring.and_then(|ring| double_cycle_from_ring(g, &ring, r)).and_then(accept) {
            return Some(cert);
        }
    }
    let router = Router::new(g);
    let eligible: Vec<usize> = eligible.iter().map(|v| router.dense.index[v]).collect();
    let mut meter = opts.budget.start();
    let walks = if g.edge_count() <= opts.exhaustive_edge_limit {
        Exhaustive::new(&router, t, r, &mut meter).run(&eligible)
    } else {
        Chain::new(&router, t, r, opts.branching, &mut meter).run(&eligible)
    }?;
    accept(build(&router, t, r, walks))
}

/// Terminal sequence (dense indices) plus, for each consecutive pair including the
/// closing one, `t` edge-index walks.
type Routing = (Vec<usize>, Vec<Vec<Vec<usize>>>);

fn build(router: &Router, t: usize, r: usize, (seq, pieces): Routing) -> ImmersionCertificate {
    let terminals: Vec<VertexId> = seq.iter().map(|&x| router.dense.ids[x]).collect();
    let mut paths: Vec<Path> = Vec::with_capacity(t * r);
    for (i, walks) in pieces.iter().enumerate() {
        for w in walks {
            paths.push(router.to_path(seq[i], w));
        }
    }
    super::assemble(cycle_multi(t, r).expect("r >= 2"), terminals, paths)
}

/// Identity-style certificate when `g` is itself C_{t,r} (up to relabelling).
fn recognise(g: &MultiGraph, t: usize, r: usize, filter: Option<&BTreeSet<VertexId>>) -> Option<ImmersionCertificate> {
    if g.vertex_count() != r || g.edge_count() != t * r || g.vertices().any(|v| g.degree(v) != 2 * t) {
        return None;
    }
    if let Some(s) = filter {
        if !g.vertices().all(|v| s.contains(&v)) {
            return None;
        }
    }
    let start = g.vertices().next()?;
    let mut order = vec![start];
    let mut classes: Vec<Vec<_>> = Vec::new();
    if r == 2 {
        let other = g.vertices().nth(1)?;
        let all = g.edges_between(start, other);
        order.push(other);
        classes.push(all[..t].to_vec());
        classes.push(all[t..].to_vec());
    } else {
        let mut prev = None;
        let mut cur = start;
        for _ in 0..r {
            let next = g.neighbors(cur).into_iter().find(|&x| Some(x) != prev)?;
            let class = g.edges_between(cur, next);
            if class.len() != t || g.neighbors(cur).len() != 2 {
                return None;
            }
            classes.push(class);
            prev = Some(cur);
            cur = next;
            if cur == start {
                break;
            }
            order.push(cur);
        }
        if cur != start || order.len() != r {
            return None;
        }
    }
    let mut paths = Vec::with_capacity(t * r);
    for class in classes {
        paths.extend(class.into_iter().map(|e| Path { vertices: Vec::new(), edges: vec![e] }));
    }
    Some(super::assemble(cycle_multi(t, r).ok()?, order, paths))
}

/// Greedy chain growth with backtracking.
struct Chain<'a> {
    router: &'a Router,
    t: usize,
    r: usize,
    branching: usize,
    meter: &'a mut Meter,
    blocked: Vec<bool>,
    rdeg: Vec<usize>,
    seq: Vec<usize>,
    pieces: Vec<Vec<Vec<usize>>>,
}

impl<'a> Chain<'a> {
    fn new(router: &'a Router, t: usize, r: usize, branching: usize, meter: &'a mut Meter) -> Self {
        let m = router.dense.ends.len();
        let rdeg = router.dense.adj.iter().map(Vec::len).collect();
        Chain { router, t, r, branching, meter, blocked: vec![false; m], rdeg, seq: Vec::new(), pieces: Vec::new() }
    }

    fn run(mut self, eligible: &[usize]) -> Option<Routing> {
        let mut starts = eligible.to_vec();
        starts.sort_by_key(|&x| (std::cmp::Reverse(self.rdeg[x]), x));
        for &s in &starts {
            self.seq = vec![s];
            if self.extend(eligible) {
                return Some((self.seq, self.pieces));
            }
            if self.meter.exhausted() {
                return None;
            }
        }
        None
    }

    fn occupy(&mut self, walks: &[Vec<usize>], on: bool) {
        for w in walks {
            for &i in w {
                self.blocked[i] = on;
                let (a, b) = self.router.dense.ends[i];
                if on {
                    self.rdeg[a] -= 1;
                    self.rdeg[b] -= 1;
                } else {
                    self.rdeg[a] += 1;
                    self.rdeg[b] += 1;
                }
            }
        }
    }

    /// BFS distance from `s` over free edges.
    fn distances(&self, s: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.router.dense.n()];
        dist[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(x) = q.pop_front() {
            for &(i, y) in &self.router.dense.adj[x] {
                if !self.blocked[i] && dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    q.push_back(y);
                }
            }
        }
        dist
    }

    fn extend(&mut self, eligible: &[usize]) -> bool {
        if !self.meter.tick() {
            return false;
        }
        let (t, first, last) = (self.t, self.seq[0], *self.seq.last().unwrap());
        if self.seq.len() == self.r {
            return match self.router.paths(last, first, t, &self.blocked) {
                Some(walks) => {
                    self.pieces.push(walks);
                    true
                }
                None => false,
            };
        }
        let dist = self.distances(last);
        let mut near: Vec<usize> = eligible
            .iter()
            .copied()
            .filter(|&u| !self.seq.contains(&u) && self.rdeg[u] >= 2 * t && dist[u] != usize::MAX)
            .collect();
        let still_needed = self.r - self.seq.len();
        if near.len() < still_needed {
            return false;
        }
        near.sort_by_key(|&u| (dist[u], u));
        near.truncate(2 * self.branching);
        let mut routed: Vec<(usize, usize, Vec<Vec<usize>>)> = near
            .into_iter()
            .filter_map(|u| {
                let walks = self.router.paths(last, u, t, &self.blocked)?;
                Some((walks.iter().map(Vec::len).sum(), u, walks))
            })
            .collect();
        routed.sort_by_key(|(cost, u, _)| (*cost, *u));
        routed.truncate(self.branching);
        for (_, u, walks) in routed {
            self.occupy(&walks, true);
            let closable = self.rdeg[first] >= t && self.router.has_flow(u, first, t, &self.blocked);
            if closable {
                self.seq.push(u);
                self.pieces.push(walks.clone());
                if self.extend(eligible) {
                    return true;
                }
                self.seq.pop();
                self.pieces.pop();
            }
            self.occupy(&walks, false);
            if self.meter.exhausted() {
                return false;
            }
        }
        false
    }
}

/// Complete search for small graphs: every cyclic terminal sequence up to rotation
/// and reflection, every choice of simple paths.
struct Exhaustive<'a> {
    router: &'a Router,
    t: usize,
    r: usize,
    meter: &'a mut Meter,
    blocked: Vec<bool>,
}

impl<'a> Exhaustive<'a> {
    fn new(router: &'a Router, t: usize, r: usize, meter: &'a mut Meter) -> Self {
        let m = router.dense.ends.len();
        Exhaustive { router, t, r, meter, blocked: vec![false; m] }
    }

    fn run(mut self, eligible: &[usize]) -> Option<Routing> {
        let mut seq = Vec::with_capacity(self.r);
        self.sequences(eligible, &mut seq)
    }

    fn sequences(&mut self, eligible: &[usize], seq: &mut Vec<usize>) -> Option<Routing> {
        if seq.len() == self.r {
            // reflection: the second terminal precedes the last
            if self.r >= 3 && seq[1] > seq[self.r - 1] {
                return None;
            }
            let mut pieces = Vec::with_capacity(self.r);
            return self.route(seq, 0, &mut pieces).then(|| (seq.clone(), pieces));
        }
        for &u in eligible {
            // rotation: the first terminal is the smallest
            if seq.contains(&u) || seq.first().is_some_and(|&f| u < f) {
                continue;
            }
            seq.push(u);
            let found = self.sequences(eligible, seq);
            seq.pop();
            if found.is_some() {
                return found;
            }
            if self.meter.exhausted() {
                return None;
            }
        }
        None
    }

    fn pair(&self, seq: &[usize], i: usize) -> (usize, usize) {
        (seq[i], seq[(i + 1) % self.r])
    }

    /// Route pairs `i..` of the cyclic sequence.
    fn route(&mut self, seq: &[usize], i: usize, pieces: &mut Vec<Vec<Vec<usize>>>) -> bool {
        if !self.meter.tick() {
            return false;
        }
        if i == self.r {
            return true;
        }
        for j in i..self.r {
            let (a, b) = self.pair(seq, j);
            if !self.router.has_flow(a, b, self.t, &self.blocked) {
                return false;
            }
        }
        let (a, b) = self.pair(seq, i);
        let all = self.simple_paths(a, b);
        let mut chosen = Vec::with_capacity(self.t);
        self.choose(seq, i, &all, 0, &mut chosen, pieces)
    }

    fn choose(
        &mut self,
        seq: &[usize],
        i: usize,
        all: &[Vec<usize>],
        from: usize,
        chosen: &mut Vec<usize>,
        pieces: &mut Vec<Vec<Vec<usize>>>,
    ) -> bool {
        if chosen.len() == self.t {
            pieces.push(chosen.iter().map(|&k| all[k].clone()).collect());
            if self.route(seq, i + 1, pieces) {
                return true;
            }
            pieces.pop();
            return false;
        }
        for k in from..all.len() {
            if all[k].iter().any(|&e| self.blocked[e]) {
                continue;
            }
            all[k].iter().for_each(|&e| self.blocked[e] = true);
            chosen.push(k);
            let done = self.choose(seq, i, all, k + 1, chosen, pieces);
            chosen.pop();
            all[k].iter().for_each(|&e| self.blocked[e] = false);
            if done {
                return true;
            }
            if self.meter.exhausted() {
                return false;
            }
        }
        false
    }

    /// Every vertex-simple `a`–`b` path over free edges, as edge-index walks.
    fn simple_paths(&self, a: usize, b: usize) -> Vec<Vec<usize>> {
        fn dfs(me: &Exhaustive, x: usize, b: usize, on: &mut Vec<bool>, walk: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if x == b {
                out.push(walk.clone());
                return;
            }
            for &(i, y) in &me.router.dense.adj[x] {
                if me.blocked[i] || on[y] {
                    continue;
                }
                on[y] = true;
                walk.push(i);
                dfs(me, y, b, on, walk, out);
                walk.pop();
                on[y] = false;
            }
        }
        let mut on = vec![false; self.router.dense.n()];
        on[a] = true;
        let mut out = Vec::new();
        dfs(self, a, b, &mut on, &mut Vec::new(), &mut out);
        out
    }
}
