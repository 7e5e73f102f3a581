//! C_{t,r} immersions in highly edge-connected graphs.
//!
//! For t = 1 the graph is reduced to degrees 2 and 3 by lifting, a long cycle is
//! searched for, and the result is pulled back. For t ≥ 2 the graph is packed with
//! 3t − 2 edge-disjoint trees. A double cycle is grown inside the first four, then each
//! further triple of trees adds one parallel class. Intermediate classes are made as
//! long as the trees allow; the last is cut to length r.
//!
//! When a stage fails (too few trees, a short double cycle, a gauge step that cannot
//! reach r) the staged search in [`find_multi_cycle`] runs on the whole graph with what
//! is left of the budget. Every returned certificate is verified.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::gauge::{gauge_augment, gauge_augment_longest};
use super::{pack_spanning_trees, pack_steiner_trees, PackingError, TreePacking};
use crate::budget::SearchBudget;
use crate::graph::{MultiGraph, VertexId};
use crate::immersion::{find_multi_cycle, verify_immersion, CycleSearchOptions, ImmersionCertificate};
use crate::lifting::reduce_degrees;

/// Above this many vertices the t = 1 branch skips degree reduction, whose
/// connectivity bookkeeping grows quadratically.
const REDUCTION_VERTEX_LIMIT: usize = 80;

/// Outcome of a pipeline run with a stage log.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CtrRun {
    pub certificate: Option<ImmersionCertificate>,
    pub log: Vec<String>,
    /// Stage that ended an unsuccessful run. Stages that failed before the fallback
    /// search rescued the run only appear in the log.
    pub failed_stage: Option<String>,
}

impl CtrRun {
    fn note(&mut self, line: impl Into<String>) {
        self.log.push(line.into());
    }

    fn fail(&mut self, stage: &str, why: impl std::fmt::Display) {
        self.log.push(format!("{stage}: {why}"));
        self.failed_stage = Some(stage.to_string());
    }
}

/// C_{t,r} immersion in `g`, or `None` when none was found within `budget`.
pub fn find_ctr(g: &MultiGraph, t: usize, r: usize, budget: SearchBudget) -> Option<ImmersionCertificate> {
    find_ctr_traced(g, t, r, budget).certificate
}

/// C_{t,r} immersion with every terminal in `s`.
pub fn find_ctr_rooted(g: &MultiGraph, s: &BTreeSet<VertexId>, t: usize, r: usize, budget: SearchBudget) -> Option<ImmersionCertificate> {
    run(g, Some(s), t, r, budget).certificate
}

/// [`find_ctr`] with its stage log.
pub fn find_ctr_traced(g: &MultiGraph, t: usize, r: usize, budget: SearchBudget) -> CtrRun {
    run(g, None, t, r, budget)
}

fn run(g: &MultiGraph, s: Option<&BTreeSet<VertexId>>, t: usize, r: usize, budget: SearchBudget) -> CtrRun {
    let mut out = CtrRun { certificate: None, log: Vec::new(), failed_stage: None };
    if t == 0 || r < 3 {
        out.fail("input", format!("need t >= 1 and r >= 3, got t={t}, r={r}"));
        return out;
    }
    if let Some(s) = s {
        if s.len() < r || !s.iter().all(|v| g.has_vertex(*v)) {
            out.fail("input", format!("terminal set of {} vertices cannot hold {r} terminals", s.len()));
            return out;
        }
    }
    let meter = budget.start();
    let opts = |b: SearchBudget| CycleSearchOptions { terminals: s.cloned(), ..CycleSearchOptions::with_budget(b) };

    let staged = if t == 1 { single(g, r, &mut out, &opts(meter.remaining())) } else { layered(g, s, t, r, &mut out, &meter) };
    let found = staged.or_else(|| {
        out.note("fallback: staged search on the whole graph");
        find_multi_cycle(g, t, r, &opts(meter.remaining()))
    });
    match found {
        Some(cert) => match check(g, s, &cert) {
            Ok(()) => {
                out.note(format!("verified C_{{{t},{r}}} certificate after {} ms", meter.elapsed().as_millis()));
                out.certificate = Some(cert);
                out.failed_stage = None;
            }
            Err(why) => out.fail("verify", why),
        },
        None => out.fail("search", "no certificate within budget"),
    }
    out
}

fn check(g: &MultiGraph, s: Option<&BTreeSet<VertexId>>, cert: &ImmersionCertificate) -> Result<(), String> {
    verify_immersion(g, cert).map_err(|v| v.to_string())?;
    if let Some(s) = s {
        if let Some(v) = cert.terminal_set().difference(s).next() {
            return Err(format!("terminal {v} outside the root set"));
        }
    }
    Ok(())
}

/// t = 1: long cycle in the degree-reduced graph, pulled back.
fn single(g: &MultiGraph, r: usize, out: &mut CtrRun, opts: &CycleSearchOptions) -> Option<ImmersionCertificate> {
    if g.vertex_count() > REDUCTION_VERTEX_LIMIT {
        out.note(format!("reduce: skipped above {REDUCTION_VERTEX_LIMIT} vertices"));
        return None;
    }
    let red = match reduce_degrees(g, 2) {
        Ok(red) => red,
        Err(e) => {
            out.fail("reduce", e);
            return None;
        }
    };
    out.note(format!("reduce: {} lifts, max degree {}", red.script.lift_count(), red.reduced.max_degree()));
    let Some(cert) = find_multi_cycle(&red.reduced, 1, r, opts) else {
        out.fail("cycle", format!("no C_{r} in the reduced graph"));
        return None;
    };
    match cert.pull_back(g, &red.script) {
        Ok(c) => Some(c),
        Err(e) => {
            out.fail("pull back", e);
            None
        }
    }
}

/// t ≥ 2: trees, a double cycle in four of them, then t − 2 gauge steps.
fn layered(g: &MultiGraph, s: Option<&BTreeSet<VertexId>>, t: usize, r: usize, out: &mut CtrRun, meter: &crate::budget::Meter) -> Option<ImmersionCertificate> {
    let k = 3 * t - 2;
    let packing: TreePacking = match s {
        None => match pack_spanning_trees(g, k) {
            Ok(p) => p,
            Err(e) => {
                out.fail("packing", e);
                return None;
            }
        },
        Some(s) => match pack_steiner_trees(g, s, k) {
            Ok(o) if o.is_complete() => o.packing().clone(),
            Ok(o) => {
                out.fail("packing", format!("only {} of {k} S-trees", o.packing().trees.len()));
                return None;
            }
            Err(e) => {
                out.fail("packing", e);
                return None;
            }
        },
    };
    out.note(format!("packing: {k} edge-disjoint trees"));
    let mut base = BTreeSet::new();
    for tree in &packing.trees[..4] {
        base.extend(tree.iter().copied());
    }
    let h = g.edge_subgraph(&base);
    let opts = |b: SearchBudget| CycleSearchOptions { terminals: s.cloned(), ..CycleSearchOptions::with_budget(b) };

    // grow the double cycle while it keeps being found
    let mut cycle = None;
    let mut m = r;
    let cap = if t == 2 { r } else { s.map_or(h.vertex_count(), BTreeSet::len) };
    while m <= cap {
        match find_multi_cycle(&h, 2, m, &opts(meter.remaining())) {
            Some(c) => {
                out.note(format!("double cycle: length {m}"));
                cycle = Some(c);
                if m == cap {
                    break;
                }
                m = (2 * m).min(cap);
            }
            None => break,
        }
    }
    let Some(mut current) = cycle else {
        out.fail("double cycle", format!("no C_{{2,{r}}} in the first four trees"));
        return None;
    };

    for step in 0..t - 2 {
        let trio = &packing.trees[4 + 3 * step..7 + 3 * step];
        let trees = [&trio[0], &trio[1], &trio[2]];
        let last = step == t - 3;
        let res: Result<_, PackingError> = if last { gauge_augment(g, &current, trees, r) } else { gauge_augment_longest(g, &current, trees) };
        match res {
            Ok(o) if last || o.achievable >= r => {
                out.note(format!("gauge {}: C_{{{},{}}} via {:?}", step + 1, step + 3, o.achievable, o.case));
                current = o.certificate;
            }
            Ok(o) => {
                out.fail("gauge", format!("step {} reaches only length {}", step + 1, o.achievable));
                return None;
            }
            Err(e) => {
                out.fail("gauge", e);
                return None;
            }
        }
    }
    Some(current)
}
