//! Gates: equal-size bags along a long tree path with a constant pairwise
//! intersection U, plus rails threading them.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::TreeDecomposition;
use crate::connectivity::vertex_disjoint_paths_limited;
use crate::graph::{MultiGraph, VertexId};
use crate::path::Path;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GatesReport {
    /// Tree vertices of the path the gates were taken from, in order.
    pub path_in_tree: Vec<VertexId>,
    /// Gate tree vertices t_1..t_n in path order.
    pub gates: Vec<VertexId>,
    /// Index of each gate in `path_in_tree`.
    pub positions: Vec<usize>,
    pub gate_bags: Vec<BTreeSet<VertexId>>,
    /// Common bag size.
    pub s: usize,
    /// Common pairwise intersection of the gate bags.
    pub u: BTreeSet<VertexId>,
    /// `s` vertex-disjoint paths from the first gate bag to the last.
    pub rails: Vec<Path>,
}

/// Gates `start .. start + len` of a report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateWindow {
    pub start: usize,
    pub len: usize,
}

/// Tree vertices of a longest path (two BFS sweeps, lowest ids on ties), starting at
/// the end with the smaller id.
fn longest_tree_path(tree: &MultiGraph) -> Vec<VertexId> {
    let far = |s: VertexId| -> (VertexId, BTreeMap<VertexId, VertexId>) {
        let mut pred = BTreeMap::new();
        let mut seen = BTreeSet::from([s]);
        let mut q = VecDeque::from([s]);
        let mut last = s;
        while let Some(x) = q.pop_front() {
            last = x;
            for y in tree.neighbors(x) {
                if seen.insert(y) {
                    pred.insert(y, x);
                    q.push_back(y);
                }
            }
        }
        (last, pred)
    };
    let Some(root) = tree.vertices().next() else { return Vec::new() };
    let (a, _) = far(root);
    let (b, pred) = far(a);
    let mut path = vec![b];
    while let Some(&p) = pred.get(path.last().unwrap()) {
        path.push(p);
    }
    // orient from the smaller end id
    if path.first() > path.last() {
        path.reverse();
    }
    path
}

/// Pick `n` of the bags (given by index, in order) whose pairwise intersections all
/// equal one set U. Bags containing a common vertex are refined recursively by
/// moving that vertex into U, most frequent vertex first.
fn select(bags: &[&BTreeSet<VertexId>], idx: &[usize], u: &BTreeSet<VertexId>, n: usize) -> Option<(Vec<usize>, BTreeSet<VertexId>)> {
    if idx.len() < n {
        return None;
    }
    // greedy: bags along a tree path meet in intervals, so the earliest-ending
    // choice is optimal
    let mut taken: Vec<usize> = Vec::new();
    let mut used: BTreeSet<VertexId> = BTreeSet::new();
    for &i in idx {
        let rest: BTreeSet<VertexId> = bags[i].difference(u).copied().collect();
        if rest.is_disjoint(&used) {
            used.extend(rest);
            taken.push(i);
            if taken.len() == n {
                return Some((taken, u.clone()));
            }
        }
    }
    let mut freq: BTreeMap<VertexId, usize> = BTreeMap::new();
    for &i in idx {
        for v in bags[i].difference(u) {
            *freq.entry(*v).or_default() += 1;
        }
    }
    let mut order: Vec<(usize, VertexId)> = freq.into_iter().filter(|&(_, c)| c >= n).map(|(v, c)| (c, v)).collect();
    order.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for (_, v) in order {
        let sub: Vec<usize> = idx.iter().copied().filter(|&i| bags[i].contains(&v)).collect();
        let mut u2 = u.clone();
        u2.insert(v);
        if let Some(found) = select(bags, &sub, &u2, n) {
            return Some(found);
        }
    }
    None
}

/// `n` gates on a longest path of the decomposition tree, with rails.
///
/// For s = 1, 2, … (smallest first) scans each maximal run of interior path
/// vertices whose bags have at least s vertices and collects the bags of size
/// exactly s; among those, picks `n` with a constant pairwise intersection. The
/// first choice that also admits `s` vertex-disjoint rails wins.
pub fn find_gates(g: &MultiGraph, td: &TreeDecomposition, n: usize) -> Option<GatesReport> {
    if n == 0 {
        return None;
    }
    let path = longest_tree_path(td.tree());
    if path.len() < n + 2 {
        return None;
    }
    let size = |p: usize| td.bag(path[p]).len();
    let interior: Vec<usize> = (1..path.len() - 1).collect();
    for s in 1..=td.width() + 1 {
        let mut runs: Vec<Vec<usize>> = Vec::new();
        let mut cur: Vec<usize> = Vec::new();
        for &p in &interior {
            if size(p) >= s {
                cur.push(p);
            } else if !cur.is_empty() {
                runs.push(std::mem::take(&mut cur));
            }
        }
        if !cur.is_empty() {
            runs.push(cur);
        }
        for run in runs {
            let cand: Vec<usize> = run.into_iter().filter(|&p| size(p) == s).collect();
            if cand.len() < n {
                continue;
            }
            let bags: Vec<&BTreeSet<VertexId>> = cand.iter().map(|&p| td.bag(path[p])).collect();
            let all: Vec<usize> = (0..cand.len()).collect();
            let Some((chosen, u)) = select(&bags, &all, &BTreeSet::new(), n) else { continue };
            let positions: Vec<usize> = chosen.iter().map(|&i| cand[i]).collect();
            let first = td.bag(path[positions[0]]);
            let last = td.bag(path[*positions.last().unwrap()]);
            let rails = vertex_disjoint_paths_limited(g, first, last, s).paths;
            if rails.len() < s {
                continue;
            }
            return Some(GatesReport {
                gates: positions.iter().map(|&p| path[p]).collect(),
                gate_bags: positions.iter().map(|&p| td.bag(path[p]).clone()).collect(),
                positions,
                path_in_tree: path,
                s,
                u,
                rails,
            });
        }
    }
    None
}

impl GatesReport {
    /// For every tree vertex, the index in `path_in_tree` where its tree path to the
    /// long path arrives.
    fn attachment(&self, td: &TreeDecomposition) -> BTreeMap<VertexId, usize> {
        let mut at: BTreeMap<VertexId, usize> = self.path_in_tree.iter().enumerate().map(|(i, &t)| (t, i)).collect();
        let mut q: VecDeque<VertexId> = self.path_in_tree.iter().copied().collect();
        while let Some(x) = q.pop_front() {
            let here = at[&x];
            for y in td.tree().neighbors(x) {
                if let std::collections::btree_map::Entry::Vacant(slot) = at.entry(y) {
                    slot.insert(here);
                    q.push_back(y);
                }
            }
        }
        at
    }

    /// Y[t_a, t_b): bags on the path from gate `a` to gate `b` inclusive, plus bags off
    /// the path hanging from a path vertex before gate `b`.
    pub fn y_range(&self, td: &TreeDecomposition, a: usize, b: usize) -> BTreeSet<VertexId> {
        let (pa, pb) = (self.positions[a], self.positions[b]);
        let on_path: BTreeSet<VertexId> = self.path_in_tree.iter().copied().collect();
        let mut out = BTreeSet::new();
        for (t, at) in self.attachment(td) {
            let hit = if on_path.contains(&t) { (pa..=pb).contains(&at) } else { (pa..pb).contains(&at) };
            if hit {
                out.extend(td.bag(t).iter().copied());
            }
        }
        out
    }

    /// The piece of rail `j` from its vertex in gate `a` to its vertex in gate `b`.
    pub fn rail_segment(&self, j: usize, a: usize, b: usize) -> Option<Path> {
        let rail = self.rails.get(j)?;
        let i = rail.vertices.iter().position(|v| self.gate_bags[a].contains(v))?;
        let k = rail.vertices.iter().position(|v| self.gate_bags[b].contains(v))?;
        (i <= k).then(|| rail.segment(i, k))
    }

    /// Rails of a window, cut to run between its first and last gate, without the
    /// zero-length rails sitting in U.
    pub fn window_rails(&self, window: GateWindow) -> Vec<Path> {
        let (a, b) = (window.start, window.start + window.len - 1);
        (0..self.rails.len())
            .filter(|&j| !(self.rails[j].is_empty() && self.u.contains(&self.rails[j].start())))
            .filter_map(|j| self.rail_segment(j, a, b))
            .collect()
    }

    /// Check the gate invariants against `td` and `g`; returns the first failure.
    pub fn check(&self, g: &MultiGraph, td: &TreeDecomposition) -> Result<(), String> {
        for (i, bag) in self.gate_bags.iter().enumerate() {
            if bag.len() != self.s {
                return Err(format!("gate {i} has {} vertices, expected {}", bag.len(), self.s));
            }
            for (j, other) in self.gate_bags.iter().enumerate().skip(i + 1) {
                let common: BTreeSet<VertexId> = bag.intersection(other).copied().collect();
                if common != self.u {
                    return Err(format!("gates {i} and {j} meet in {common:?}, not U"));
                }
            }
        }
        let (first, last) = (self.positions[0], *self.positions.last().unwrap());
        if let Some(p) = (first..=last).find(|&p| td.bag(self.path_in_tree[p]).len() < self.s) {
            return Err(format!("bag at path position {p} is smaller than the gates"));
        }
        let mut seen = BTreeSet::new();
        for rail in &self.rails {
            rail.check_in(g).map_err(|e| e.to_string())?;
            for v in &rail.vertices {
                if !seen.insert(*v) {
                    return Err(format!("rails share vertex {v}"));
                }
            }
        }
        // unit ranges two or more apart are disjoint outside U
        let units: Vec<BTreeSet<VertexId>> = (0..self.gates.len().saturating_sub(1))
            .map(|i| self.y_range(td, i, i + 1).difference(&self.u).copied().collect())
            .collect();
        for a in 0..units.len() {
            for b in a + 2..units.len() {
                if let Some(v) = units[a].intersection(&units[b]).next() {
                    return Err(format!("Y-ranges {a} and {b} share {v}"));
                }
            }
        }
        Ok(())
    }
}

/// First window of `m` consecutive gates whose Y-range, minus U, has no neighbour
/// of U.
pub fn avoid_u_window(report: &GatesReport, td: &TreeDecomposition, g: &MultiGraph, m: usize) -> Option<GateWindow> {
    if m < 2 || m > report.gates.len() {
        return None;
    }
    let nu: BTreeSet<VertexId> = g.neighborhood(&report.u).difference(&report.u).copied().collect();
    (0..=report.gates.len() - m).find_map(|start| {
        let range = report.y_range(td, start, start + m - 1);
        let clear = range.iter().all(|v| report.u.contains(v) || !nu.contains(v));
        clear.then_some(GateWindow { start, len: m })
    })
}
