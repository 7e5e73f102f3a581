//! Adding one parallel class to a C_{p,m} immersion with three spare trees.
//!
//! Let X be the terminals of C in cyclic order x_0 … x_{m−1}. New terminals
//! z_1 … z_n are picked from X in cyclic order, so the arcs of C between consecutive
//! picks are disjoint and each supplies p parallel paths. The extra path of each
//! class comes from the trees.
//!
//! - Long path: a path in one tree meets many vertices of X. A cyclically monotone
//!   subsequence of them gives z_1 … z_n whose path segments are disjoint. A second
//!   tree closes z_n back to z_1.
//! - Branching: a star, comb or marked path K in T_a has leaves Y. A cyclically
//!   monotone subsequence of Y (any order, for a star) is kept. A star, comb or path
//!   J in T_b over those leaves gives Z, monotone in both orders. Pairs
//!   (z_1, z_2), (z_3, z_4), … are joined in T_a, pairs (z_2, z_3), … in T_b, and T_c
//!   closes z_n back to z_1.
//!
//! Both orders being monotone makes the tree paths of each parity pairwise
//! edge-disjoint, because they follow disjoint intervals of a path, a comb spine or
//! distinct star rays.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::comb::{comb_or_star, longest_marked_path, CombKind, CombStructure};
use super::{check_tree, tree_path, PackingError};
use crate::generators::cycle_multi;
use crate::graph::{EdgeId, MultiGraph, VertexId};
use crate::immersion::{verify_immersion, ImmersionCertificate};
use crate::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "case")]
pub enum GaugeCase {
    /// One tree holds a path through the new terminals.
    LongPath,
    /// Structures in two trees, alternating connectors.
    Branching { first: CombKind, second: CombKind },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GaugeOutcome {
    pub certificate: ImmersionCertificate,
    pub case: GaugeCase,
    /// Which input trees acted as T_a, T_b, T_c (the long-path case uses two).
    pub roles: Vec<usize>,
    /// Largest n the chosen case supports.
    pub achievable: usize,
}

struct Plan {
    case: GaugeCase,
    roles: Vec<usize>,
    /// Positions on C of the picked terminals, cyclically increasing.
    picks: Vec<usize>,
    /// connectors[j] joins picks[j] and picks[j + 1]; the last one closes the cycle.
    connectors: Vec<Path>,
}

impl Plan {
    fn achievable(&self) -> usize {
        self.picks.len()
    }

    fn truncate(mut self, n: usize, g: &MultiGraph, trees: &[BTreeSet<EdgeId>; 3], x: &[VertexId]) -> Plan {
        if self.picks.len() > n {
            self.picks.truncate(n);
            self.connectors.truncate(n - 1);
            let close = *self.roles.last().unwrap();
            let path = tree_path(g, &trees[close], x[self.picks[n - 1]], x[self.picks[0]]).expect("spanning tree");
            self.connectors.push(path);
        }
        self
    }
}

/// C_{p+1,n} immersion from `c` (a C_{p,m} immersion) plus three trees spanning its
/// terminals, edge-disjoint from each other and from the paths of `c`.
pub fn gauge_augment(g: &MultiGraph, c: &ImmersionCertificate, trees: [&BTreeSet<EdgeId>; 3], n: usize) -> Result<GaugeOutcome, PackingError> {
    if n < 3 {
        return Err(PackingError::InvalidInput(format!("n = {n}, need at least 3")));
    }
    let (p, x) = check_preconditions(g, c, trees)?;
    let trees = [trees[0].clone(), trees[1].clone(), trees[2].clone()];
    let (long, branching) = plans(g, &trees, &x);
    let best_long = long.as_ref().map_or(0, Plan::achievable);
    let best_branch = branching.as_ref().map_or(0, Plan::achievable);
    let plan = match (long, branching) {
        (Some(l), _) if best_long >= n => l,
        (_, Some(b)) if best_branch >= n => b,
        _ => {
            return Err(PackingError::BudgetExceeded(format!(
                "C_{{{p},{}}} supports n <= {best_long} by a long path and n <= {best_branch} by branching, asked for {n}",
                x.len()
            )))
        }
    };
    let plan = plan.truncate(n, g, &trees, &x);
    finish(g, c, p, &x, plan)
}

/// [`gauge_augment`] with the largest n either case supports.
pub fn gauge_augment_longest(g: &MultiGraph, c: &ImmersionCertificate, trees: [&BTreeSet<EdgeId>; 3]) -> Result<GaugeOutcome, PackingError> {
    let (p, x) = check_preconditions(g, c, trees)?;
    let owned = [trees[0].clone(), trees[1].clone(), trees[2].clone()];
    let (long, branching) = plans(g, &owned, &x);
    let plan = [long, branching].into_iter().flatten().max_by_key(Plan::achievable);
    match plan {
        Some(plan) if plan.achievable() >= 3 => finish(g, c, p, &x, plan),
        other => Err(PackingError::BudgetExceeded(format!(
            "at most {} new terminals on C_{{{p},{}}}",
            other.map_or(0, |p| p.achievable()),
            x.len()
        ))),
    }
}

fn check_preconditions(g: &MultiGraph, c: &ImmersionCertificate, trees: [&BTreeSet<EdgeId>; 3]) -> Result<(usize, Vec<VertexId>), PackingError> {
    let pre = PackingError::PreconditionViolated;
    let m = c.pattern.vertex_count();
    let p = c.pattern.edge_count().checked_div(m).unwrap_or(0);
    match cycle_multi(p, m) {
        Ok(want) if want == c.pattern => {}
        _ => return Err(pre("certificate pattern is not C_{p,m}".into())),
    }
    verify_immersion(g, c).map_err(|v| pre(format!("certificate does not verify: {v}")))?;
    let x: Vec<VertexId> = (0..m as u32).map(|i| c.terminals[&VertexId(i)]).collect();
    let xs: BTreeSet<VertexId> = x.iter().copied().collect();
    let used = c.used_edges();
    for (i, t) in trees.iter().enumerate() {
        check_tree(g, t, &xs).map_err(|e| pre(format!("tree {i}: {e}")))?;
        if let Some(e) = t.intersection(&used).next() {
            return Err(pre(format!("tree {i} shares {e} with the certificate")));
        }
        for (j, u) in trees.iter().enumerate().skip(i + 1) {
            if let Some(e) = t.intersection(u).next() {
                return Err(pre(format!("trees {i} and {j} share {e}")));
            }
        }
    }
    Ok((p, x))
}

/// Longest subsequence (by position) with strictly increasing values.
fn lis(vals: &[usize]) -> Vec<usize> {
    let mut tails: Vec<usize> = Vec::new();
    let mut pred: Vec<Option<usize>> = vec![None; vals.len()];
    for i in 0..vals.len() {
        let k = tails.partition_point(|&j| vals[j] < vals[i]);
        pred[i] = k.checked_sub(1).map(|k| tails[k]);
        if k == tails.len() {
            tails.push(i);
        } else {
            tails[k] = i;
        }
    }
    let mut out = Vec::new();
    let mut cur = tails.last().copied();
    while let Some(i) = cur {
        out.push(i);
        cur = pred[i];
    }
    out.reverse();
    out
}

/// Longest subsequence whose values run monotonically (either direction) around a
/// cycle of length `m`. Returns positions, reordered so the values increase
/// cyclically.
fn cyclic_monotone(vals: &[usize], m: usize) -> Vec<usize> {
    let mut best: Vec<usize> = Vec::new();
    for dir in [false, true] {
        let v: Vec<usize> = vals.iter().map(|&a| if dir { (m - a) % m } else { a }).collect();
        for j in 0..v.len() {
            let rest: Vec<usize> = (j + 1..v.len()).filter(|&i| v[i] != v[j]).collect();
            let shifted: Vec<usize> = rest.iter().map(|&i| (v[i] + m - v[j]) % m).collect();
            let mut pick = vec![j];
            pick.extend(lis(&shifted).into_iter().map(|k| rest[k]));
            if pick.len() > best.len() {
                if dir {
                    pick.reverse();
                }
                best = pick;
            }
        }
    }
    best
}

/// Leaves of a structure in an order where disjoint intervals have edge-disjoint tree
/// paths, and whether that order may be rearranged freely.
fn leaf_order(s: &CombStructure) -> (Vec<VertexId>, bool) {
    (s.marked_leaves.clone(), s.kind == CombKind::Star)
}

/// Structure in `tree` over `marked` with the most leaves.
fn widest(g: &MultiGraph, tree: &BTreeSet<EdgeId>, marked: &BTreeSet<VertexId>) -> Option<CombStructure> {
    let (mut lo, mut hi) = (1usize, marked.len());
    let mut best = None;
    while lo <= hi {
        let mid = (lo + hi) / 2;
        match comb_or_star(g, tree, marked, mid) {
            Ok(s) => {
                best = Some(s);
                lo = mid + 1;
            }
            Err(_) => hi = mid - 1,
        }
    }
    best
}

fn plans(g: &MultiGraph, trees: &[BTreeSet<EdgeId>; 3], x: &[VertexId]) -> (Option<Plan>, Option<Plan>) {
    let m = x.len();
    let pos: BTreeMap<VertexId, usize> = x.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let xs: BTreeSet<VertexId> = x.iter().copied().collect();
    let join = |t: usize, a: usize, b: usize| tree_path(g, &trees[t], x[a], x[b]).expect("tree spans the terminals");

    let mut long: Option<Plan> = None;
    for a in 0..3 {
        let Ok(path) = longest_marked_path(g, &trees[a], &xs) else { continue };
        let along: Vec<usize> = path.vertices.iter().filter_map(|v| pos.get(v).copied()).collect();
        let chosen: Vec<usize> = cyclic_monotone(&along, m).into_iter().map(|k| along[k]).collect();
        if chosen.len() < 2 || long.as_ref().is_some_and(|l| l.achievable() >= chosen.len()) {
            continue;
        }
        let b = (a + 1) % 3;
        let mut connectors: Vec<Path> = chosen.windows(2).map(|w| path.between(x[w[0]], x[w[1]]).unwrap()).collect();
        connectors.push(join(b, *chosen.last().unwrap(), chosen[0]));
        long = Some(Plan { case: GaugeCase::LongPath, roles: vec![a, b], picks: chosen, connectors });
    }

    let mut branching: Option<Plan> = None;
    for (a, b, c) in [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)] {
        let Some(k) = widest(g, &trees[a], &xs) else { continue };
        let (leaves, free) = leaf_order(&k);
        let mut y: Vec<usize> = leaves.iter().map(|v| pos[v]).collect();
        if free {
            y.sort_unstable();
        } else {
            y = cyclic_monotone(&y, m).into_iter().map(|i| y[i]).collect();
        }
        if y.len() < 3 || branching.as_ref().is_some_and(|p| p.achievable() >= y.len()) {
            continue;
        }
        let rank: BTreeMap<VertexId, usize> = y.iter().enumerate().map(|(r, &i)| (x[i], r)).collect();
        let ys: BTreeSet<VertexId> = rank.keys().copied().collect();
        let Some(j) = widest(g, &trees[b], &ys) else { continue };
        let (jl, jfree) = leaf_order(&j);
        let ranks: Vec<usize> = jl.iter().map(|v| rank[v]).collect();
        let mut z: Vec<usize> = if jfree {
            ranks.clone()
        } else {
            let up = lis(&ranks);
            let rev: Vec<usize> = ranks.iter().rev().copied().collect();
            let down = lis(&rev);
            if up.len() >= down.len() {
                up.into_iter().map(|i| ranks[i]).collect()
            } else {
                down.into_iter().map(|i| rev[i]).collect()
            }
        };
        z.sort_unstable();
        let picks: Vec<usize> = z.iter().map(|&r| y[r]).collect();
        if picks.len() < 3 || branching.as_ref().is_some_and(|p| p.achievable() >= picks.len()) {
            continue;
        }
        let mut connectors: Vec<Path> = picks
            .windows(2)
            .enumerate()
            .map(|(i, w)| join(if i.is_multiple_of(2) { a } else { b }, w[0], w[1]))
            .collect();
        connectors.push(join(c, *picks.last().unwrap(), picks[0]));
        branching = Some(Plan { case: GaugeCase::Branching { first: k.kind, second: j.kind }, roles: vec![a, b, c], picks, connectors });
    }
    (long, branching)
}

/// Assemble C_{p+1,n}: class j takes C's p paths along the arc from pick j to pick
/// j + 1 plus connector j.
fn finish(g: &MultiGraph, c: &ImmersionCertificate, p: usize, x: &[VertexId], plan: Plan) -> Result<GaugeOutcome, PackingError> {
    let m = x.len();
    let n = plan.picks.len();
    let pattern = cycle_multi(p + 1, n).map_err(|e| PackingError::Internal(e.to_string()))?;
    let terminals: BTreeMap<VertexId, VertexId> = plan.picks.iter().enumerate().map(|(j, &i)| (VertexId(j as u32), x[i])).collect();
    let mut paths = BTreeMap::new();
    for j in 0..n {
        let (from, to) = (plan.picks[j], plan.picks[(j + 1) % n]);
        let steps = (to + m - from) % m;
        let steps = if steps == 0 { m } else { steps };
        for k in 0..p {
            let mut walk = Path::trivial(x[from]);
            for s in 0..steps {
                let class = (from + s) % m;
                let piece = c.host_path(g, EdgeId((p * class + k) as u32)).ok_or_else(|| PackingError::Internal("missing C path".into()))?;
                let piece = if piece.start() == walk.end() { piece } else { piece.reversed() };
                walk = walk.concat(&piece);
            }
            paths.insert(EdgeId(((p + 1) * j + k) as u32), walk.simplify());
        }
        let conn = &plan.connectors[j];
        let conn = if conn.start() == x[from] { conn.clone() } else { conn.reversed() };
        paths.insert(EdgeId(((p + 1) * j + p) as u32), conn);
    }
    let paths = pattern
        .edges()
        .map(|pe| {
            let path = &paths[&pe.id];
            let oriented = if path.start() == terminals[&pe.u] { path.clone() } else { path.reversed() };
            (pe.id, oriented.edges)
        })
        .collect();
    let certificate = ImmersionCertificate { pattern, terminals, paths };
    verify_immersion(g, &certificate).map_err(|v| PackingError::Internal(format!("assembled certificate fails: {v}")))?;
    Ok(GaugeOutcome { certificate, case: plan.case, roles: plan.roles, achievable: n })
}
