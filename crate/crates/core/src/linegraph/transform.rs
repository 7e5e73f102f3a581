//! Immersion certificate to minor certificate on line graphs.
//!
//! The immersion is replayed as a script on the host: unused edges are deleted, then
//! each path is lifted edge by edge into one edge. Each step has a line-graph
//! counterpart acting on a minor model of L(host):
//! - deleting edge e deletes the line vertex e;
//! - lifting uv, vw at v contracts the line edge between them and then deletes the
//!   line edges from the merged set to δ*(v), the edges at v meeting neither u nor w.
//!
//! Isolated vertices left behind have no line-graph counterpart.

use std::collections::{BTreeMap, BTreeSet};

use super::{verify_minor, LineGraphError, MinorCertificate};
use crate::graph::{EdgeId, LineGraph, MultiGraph, VertexId};
use crate::immersion::{verify_immersion, ImmersionCertificate};

struct Replay {
    work: MultiGraph,
    line: LineGraph,
    /// Live line edges.
    alive: BTreeSet<EdgeId>,
    /// Branch set (line vertices) of each edge of `work`.
    part: BTreeMap<EdgeId, BTreeSet<VertexId>>,
    check: bool,
    steps: usize,
}

impl Replay {
    fn new(host: &MultiGraph, check: bool) -> Self {
        let line = host.line_graph();
        let alive = line.graph.edge_ids().collect();
        let part = host.edge_ids().map(|e| (e, BTreeSet::from([line.vertex_of[&e]]))).collect();
        Replay { work: host.clone(), line, alive, part, check, steps: 0 }
    }

    fn drop_line_edges(&mut self, from: &BTreeSet<VertexId>, to: &BTreeSet<VertexId>) {
        for &x in from {
            for e in self.line.graph.incident(x) {
                let y = self.line.graph.edge(e).unwrap().other(x).unwrap();
                if to.contains(&y) {
                    self.alive.remove(&e);
                }
            }
        }
    }

    fn delete_edge(&mut self, e: EdgeId) -> Result<(), LineGraphError> {
        self.work.remove_edge(e).map_err(|err| LineGraphError::Internal(err.to_string()))?;
        let gone = self.part.remove(&e).unwrap_or_default();
        for &x in &gone {
            for le in self.line.graph.incident(x) {
                self.alive.remove(&le);
            }
        }
        self.after_step()
    }

    fn lift(&mut self, e: EdgeId, f: EdgeId, pivot: VertexId) -> Result<EdgeId, LineGraphError> {
        let internal = |s: String| LineGraphError::Internal(s);
        let (a, b) = (*self.work.edge(e).ok_or_else(|| internal(format!("no edge {e}")))?, *self.work.edge(f).ok_or_else(|| internal(format!("no edge {f}")))?);
        let (u, w) = (a.other(pivot).unwrap(), b.other(pivot).unwrap());
        let star: Vec<EdgeId> = self
            .work
            .incident(pivot)
            .filter(|&h| h != e && h != f)
            .filter(|&h| {
                let rec = self.work.edge(h).unwrap();
                !rec.has(u) && !rec.has(w)
            })
            .collect();
        let lift = self.work.lift_pair_at(e, f, pivot).map_err(|err| internal(err.to_string()))?;
        let pe = self.part.remove(&e).unwrap();
        let pf = self.part.remove(&f).unwrap();
        let Some(g) = lift.created else {
            // closed walk: both edges vanish
            for x in pe.iter().chain(&pf) {
                for le in self.line.graph.incident(*x) {
                    self.alive.remove(&le);
                }
            }
            return Err(internal(format!("lifting {e} and {f} at {pivot} closes a loop")));
        };
        let merged: BTreeSet<VertexId> = pe.union(&pf).copied().collect();
        for h in star {
            let other = self.part[&h].clone();
            self.drop_line_edges(&merged, &other);
        }
        self.part.insert(g, merged);
        self.after_step()?;
        Ok(g)
    }

    /// Compare the quotient of the live model with L(work), vertex for vertex.
    fn after_step(&mut self) -> Result<(), LineGraphError> {
        self.steps += 1;
        if !self.check {
            return Ok(());
        }
        let fail = |detail: String| LineGraphError::StepInvariant { step: self.steps, detail };
        let mut owner = BTreeMap::new();
        for (&e, set) in &self.part {
            for &x in set {
                owner.insert(x, e);
            }
        }
        let mut quotient = BTreeSet::new();
        for &le in &self.alive {
            let rec = self.line.graph.edge(le).unwrap();
            let (Some(&a), Some(&b)) = (owner.get(&rec.u), owner.get(&rec.v)) else {
                return Err(fail(format!("live line edge {le} leaves the model")));
            };
            if a != b {
                quotient.insert((a.min(b), a.max(b)));
            }
        }
        for (&e, set) in &self.part {
            if !self.line.graph.induced(set).is_connected() {
                return Err(fail(format!("branch set of {e} is disconnected")));
            }
        }
        let lw = self.work.line_graph();
        let want: BTreeSet<(EdgeId, EdgeId)> = lw
            .graph
            .edges()
            .map(|r| {
                let (a, b) = (lw.edge_of[&r.u], lw.edge_of[&r.v]);
                (a.min(b), a.max(b))
            })
            .collect();
        if quotient != want {
            let extra = quotient.difference(&want).next();
            let missing = want.difference(&quotient).next();
            return Err(fail(format!("extra adjacency {extra:?}, missing adjacency {missing:?}")));
        }
        Ok(())
    }
}

fn transform(host: &MultiGraph, cert: &ImmersionCertificate, check: bool) -> Result<(MinorCertificate, usize), LineGraphError> {
    verify_immersion(host, cert)?;
    let mut replay = Replay::new(host, check);
    let used = cert.used_edges();
    let unused: Vec<EdgeId> = host.edge_ids().filter(|e| !used.contains(e)).collect();
    for e in unused {
        replay.delete_edge(e)?;
    }
    let mut current: BTreeMap<EdgeId, EdgeId> = BTreeMap::new();
    for pe in cert.pattern.edges() {
        let path = cert.host_path(host, pe.id).ok_or_else(|| LineGraphError::Internal(format!("no path for {}", pe.id)))?;
        let mut acc = path.edges[0];
        for i in 1..path.edges.len() {
            acc = replay.lift(acc, path.edges[i], path.vertices[i])?;
        }
        current.insert(pe.id, acc);
    }

    let pattern_line = cert.pattern.line_graph();
    let mut owner = BTreeMap::new();
    let mut branch_sets = BTreeMap::new();
    for (&pe, &we) in &current {
        let set = replay.part[&we].clone();
        for &x in &set {
            owner.insert(x, pattern_line.vertex_of[&pe]);
        }
        branch_sets.insert(pattern_line.vertex_of[&pe], set);
    }
    let mut between: BTreeMap<(VertexId, VertexId), EdgeId> = BTreeMap::new();
    for &le in &replay.alive {
        let rec = replay.line.graph.edge(le).unwrap();
        let (a, b) = (owner[&rec.u], owner[&rec.v]);
        if a != b {
            between.entry((a.min(b), a.max(b))).or_insert(le);
        }
    }
    let mut edge_witness = BTreeMap::new();
    for pl in pattern_line.graph.edges() {
        let key = (pl.u.min(pl.v), pl.u.max(pl.v));
        let &w = between
            .get(&key)
            .ok_or_else(|| LineGraphError::Internal(format!("no line edge between the sets of {} and {}", pl.u, pl.v)))?;
        edge_witness.insert(pl.id, w);
    }
    let out = MinorCertificate { pattern: pattern_line.graph, branch_sets, edge_witness };
    verify_minor(&replay.line.graph, &out).map_err(|v| LineGraphError::Internal(format!("transform output rejected: {v}")))?;
    Ok((out, replay.steps))
}

/// Minor certificate of L(pattern) in L(host) from an immersion certificate of
/// pattern in host. Line vertex ids equal the edge ids they stand for.
pub fn immersion_to_minor(host: &MultiGraph, cert: &ImmersionCertificate) -> Result<MinorCertificate, LineGraphError> {
    transform(host, cert, false).map(|(c, _)| c)
}

/// [`immersion_to_minor`] checking after every step that the model's quotient equals
/// the line graph of the working host. Also returns the number of steps.
pub fn immersion_to_minor_checked(host: &MultiGraph, cert: &ImmersionCertificate) -> Result<(MinorCertificate, usize), LineGraphError> {
    transform(host, cert, true)
}
