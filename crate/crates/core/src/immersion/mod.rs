//! Immersion certificates, their verifier, and the path tools used to build them.

mod align;
mod double;
mod mincost;
mod rails;
mod search;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeId, MultiGraph, VertexId};
use crate::path::Path;
use crate::script::{LiftingScript, ScriptError};

pub use align::{alignment_report, find_compatible, is_aligned, uncross, AlignmentReport, Compatible, UncrossError, Uncrossed};
pub use double::{compatible_to_c2r, complete_double_path, double_cycle_from_ring, CompletionError};
pub use mincost::min_cost_disjoint_paths;
pub use rails::{rails_cycle_search, RailsBlock, RailsCycle};
pub use search::{find_double_cycle, find_multi_cycle, CycleSearchOptions};

/// Terminal map plus one host path per pattern edge.
///
/// The path for pattern edge `e = (u, v)` is a host edge sequence that walks from
/// `terminals[u]` to `terminals[v]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImmersionCertificate {
    pub pattern: MultiGraph,
    pub terminals: BTreeMap<VertexId, VertexId>,
    pub paths: BTreeMap<EdgeId, Vec<EdgeId>>,
}

/// First problem found by [`verify_immersion`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("pattern vertex {0} has no terminal")]
    MissingTerminal(VertexId),
    #[error("terminal entry for {0}, which is not a pattern vertex")]
    StrayTerminal(VertexId),
    #[error("terminal {terminal} of pattern vertex {vertex} is not a host vertex")]
    TerminalNotInHost { vertex: VertexId, terminal: VertexId },
    #[error("pattern vertices {first} and {second} share terminal {terminal}")]
    TerminalsNotInjective { first: VertexId, second: VertexId, terminal: VertexId },
    #[error("pattern edge {0} has no path")]
    MissingPath(EdgeId),
    #[error("path given for {0}, which is not a pattern edge")]
    StrayPath(EdgeId),
    #[error("path for pattern edge {pattern_edge} uses unknown host edge {host_edge}")]
    UnknownHostEdge { pattern_edge: EdgeId, host_edge: EdgeId },
    #[error("path for pattern edge {pattern_edge} breaks at {at} (host edge {host_edge})")]
    BrokenWalk { pattern_edge: EdgeId, at: VertexId, host_edge: EdgeId },
    #[error("path for pattern edge {pattern_edge} ends at {reached}, expected {expected}")]
    WrongEnd { pattern_edge: EdgeId, reached: VertexId, expected: VertexId },
    #[error("path for pattern edge {pattern_edge} revisits {vertex}")]
    RepeatedVertex { pattern_edge: EdgeId, vertex: VertexId },
    #[error("host edge {host_edge} is used by pattern edges {first} and {second}")]
    SharedEdge { host_edge: EdgeId, first: EdgeId, second: EdgeId },
}

/// Check a certificate against `host`: injective terminals, one vertex-simple path per
/// pattern edge running between the right terminals, and pairwise edge-disjointness.
pub fn verify_immersion(host: &MultiGraph, cert: &ImmersionCertificate) -> Result<(), Violation> {
    for v in cert.pattern.vertices() {
        if !cert.terminals.contains_key(&v) {
            return Err(Violation::MissingTerminal(v));
        }
    }
    let mut owner: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    for (&v, &t) in &cert.terminals {
        if !cert.pattern.has_vertex(v) {
            return Err(Violation::StrayTerminal(v));
        }
        if !host.has_vertex(t) {
            return Err(Violation::TerminalNotInHost { vertex: v, terminal: t });
        }
        if let Some(&first) = owner.get(&t) {
            return Err(Violation::TerminalsNotInjective { first, second: v, terminal: t });
        }
        owner.insert(t, v);
    }
    for &e in cert.paths.keys() {
        if !cert.pattern.has_edge(e) {
            return Err(Violation::StrayPath(e));
        }
    }
    let mut used: BTreeMap<EdgeId, EdgeId> = BTreeMap::new();
    for pe in cert.pattern.edges() {
        let path = cert.paths.get(&pe.id).ok_or(Violation::MissingPath(pe.id))?;
        let start = cert.terminals[&pe.u];
        let expected = cert.terminals[&pe.v];
        let mut cur = start;
        let mut visited = BTreeSet::from([start]);
        for &he in path {
            let rec = host.edge(he).ok_or(Violation::UnknownHostEdge { pattern_edge: pe.id, host_edge: he })?;
            cur = rec.other(cur).ok_or(Violation::BrokenWalk { pattern_edge: pe.id, at: cur, host_edge: he })?;
            if !visited.insert(cur) {
                return Err(Violation::RepeatedVertex { pattern_edge: pe.id, vertex: cur });
            }
            if let Some(&first) = used.get(&he) {
                return Err(Violation::SharedEdge { host_edge: he, first, second: pe.id });
            }
            used.insert(he, pe.id);
        }
        if cur != expected {
            return Err(Violation::WrongEnd { pattern_edge: pe.id, reached: cur, expected });
        }
    }
    Ok(())
}

impl ImmersionCertificate {
    /// `g` immersed in itself.
    pub fn identity(g: &MultiGraph) -> Self {
        ImmersionCertificate {
            pattern: g.clone(),
            terminals: g.vertices().map(|v| (v, v)).collect(),
            paths: g.edge_ids().map(|e| (e, vec![e])).collect(),
        }
    }

    /// Host path for pattern edge `e` as a vertex/edge walk.
    pub fn host_path(&self, host: &MultiGraph, e: EdgeId) -> Option<Path> {
        let rec = self.pattern.edge(e)?;
        let start = *self.terminals.get(&rec.u)?;
        Path::from_walk(host, start, self.paths.get(&e)?).ok()
    }

    /// Every host edge used by some path.
    pub fn used_edges(&self) -> BTreeSet<EdgeId> {
        self.paths.values().flatten().copied().collect()
    }

    pub fn terminal_set(&self) -> BTreeSet<VertexId> {
        self.terminals.values().copied().collect()
    }

    /// Rewrite a certificate against the result of `script` into one against `source`:
    /// each host edge becomes the trail it was lifted from, and the resulting walks are
    /// shortcut to paths.
    pub fn pull_back(&self, source: &MultiGraph, script: &LiftingScript) -> Result<Self, ScriptError> {
        let trails = script.provenance(source)?;
        let mut paths = BTreeMap::new();
        for pe in self.pattern.edges() {
            let mut walk = Path::trivial(self.terminals[&pe.u]);
            for he in &self.paths[&pe.id] {
                let trail = &trails[he];
                let piece = if trail.start() == walk.end() { trail.clone() } else { trail.reversed() };
                walk = walk.concat(&piece);
            }
            paths.insert(pe.id, walk.simplify().edges);
        }
        Ok(ImmersionCertificate { pattern: self.pattern.clone(), terminals: self.terminals.clone(), paths })
    }

    /// Render the host with each pattern edge's path in its own colour.
    pub fn to_dot(&self, host: &MultiGraph) -> String {
        let mut colour = BTreeMap::new();
        for (i, (_, path)) in self.paths.iter().enumerate() {
            for &e in path {
                colour.insert(e, i);
            }
        }
        host.to_dot(&colour, &self.terminal_set())
    }
}

/// Certificate from terminals and paths listed in the pattern's vertex and edge order.
pub(crate) fn assemble(pattern: MultiGraph, terminals: Vec<VertexId>, paths: Vec<Path>) -> ImmersionCertificate {
    let terminals = pattern.vertices().zip(terminals).collect();
    let paths = pattern.edge_ids().zip(paths.into_iter().map(|p| p.edges)).collect();
    ImmersionCertificate { pattern, terminals, paths }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete_bipartite, cycle};

    /// K_{2,3} (parts {0,1} and {2,3,4}; edge a*3+b joins a and 2+b) hosting a
    /// triangle on terminals 0, 2, 1.
    fn k23_triangle() -> (MultiGraph, ImmersionCertificate) {
        let host = complete_bipartite(2, 3).unwrap();
        let cert = ImmersionCertificate {
            pattern: cycle(3).unwrap(),
            terminals: BTreeMap::from([(VertexId(0), VertexId(0)), (VertexId(1), VertexId(2)), (VertexId(2), VertexId(1))]),
            paths: BTreeMap::from([
                (EdgeId(0), vec![EdgeId(0)]),
                (EdgeId(1), vec![EdgeId(3)]),
                (EdgeId(2), vec![EdgeId(4), EdgeId(1)]),
            ]),
        };
        (host, cert)
    }

    #[test]
    fn k23_hosts_triangle() {
        let (host, cert) = k23_triangle();
        verify_immersion(&host, &cert).unwrap();
    }

    #[test]
    fn shared_edge_is_named() {
        let (host, mut cert) = k23_triangle();
        // route 1 -> 0 through 2 instead, reusing host edge 0
        cert.paths.insert(EdgeId(2), vec![EdgeId(3), EdgeId(0)]);
        assert!(matches!(verify_immersion(&host, &cert), Err(Violation::SharedEdge { .. })));
        cert.paths.insert(EdgeId(2), vec![EdgeId(5), EdgeId(2)]);
        verify_immersion(&host, &cert).unwrap();
        cert.paths.insert(EdgeId(2), vec![EdgeId(5), EdgeId(0)]);
        assert_eq!(
            verify_immersion(&host, &cert),
            Err(Violation::BrokenWalk { pattern_edge: EdgeId(2), at: VertexId(4), host_edge: EdgeId(0) })
        );
    }

    #[test]
    fn terminals_must_be_injective() {
        let (host, mut cert) = k23_triangle();
        cert.terminals.insert(VertexId(2), VertexId(0));
        assert!(matches!(verify_immersion(&host, &cert), Err(Violation::TerminalsNotInjective { .. })));
    }

    #[test]
    fn identity_verifies() {
        let g = complete_bipartite(3, 3).unwrap();
        verify_immersion(&g, &ImmersionCertificate::identity(&g)).unwrap();
    }

    #[test]
    fn json_shape() {
        let g = cycle(3).unwrap();
        let cert = ImmersionCertificate::identity(&g);
        let text = serde_json::to_string(&cert).unwrap();
        assert!(text.contains(r#""terminals":{"0":0,"1":1,"2":2}"#), "{text}");
        assert!(text.contains(r#""paths":{"0":[0],"1":[1],"2":[2]}"#), "{text}");
        let back: ImmersionCertificate = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cert);
    }
}
