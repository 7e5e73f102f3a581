//! Ring-decompositions: cyclic sequences (G_0, G_1, …, G_n) of subgraphs with
//! - R1: the union is the whole graph;
//! - R2: consecutive members share no edge, non-consecutive ones share no vertex;
//! - R3: every interface W_i = V(G_{i−1} ∩ G_i) (with G_{n+1} = G_0) has w vertices;
//! - R4: each G_i, i ≥ 1, holds w disjoint W_i–W_{i+1} paths.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::gates::{avoid_u_window, find_gates, GateWindow, GatesReport};
use super::{heuristic_td, DecompositionError, TreeDecomposition};
use crate::connectivity::vertex_disjoint_paths_limited;
use crate::graph::{EdgeId, MultiGraph, Subgraph, VertexId};
use crate::path::Path;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingDecomposition {
    /// G_0 first.
    pub segments: Vec<Subgraph>,
}

impl RingDecomposition {
    pub fn new(segments: Vec<Subgraph>) -> Self {
        RingDecomposition { segments }
    }

    /// n, the number of segments after G_0.
    pub fn length(&self) -> usize {
        self.segments.len().saturating_sub(1)
    }

    /// W_i for 1 ≤ i ≤ n + 1.
    pub fn interface(&self, i: usize) -> BTreeSet<VertexId> {
        let k = self.segments.len();
        if k == 0 || i == 0 || i > k {
            return BTreeSet::new();
        }
        let (a, b) = (&self.segments[i - 1], &self.segments[i % k]);
        a.vertices.intersection(&b.vertices).copied().collect()
    }

    pub fn interfaces(&self) -> Vec<BTreeSet<VertexId>> {
        (1..=self.length() + 1).map(|i| self.interface(i)).collect()
    }

    /// |W_1|.
    pub fn width(&self) -> usize {
        self.interface(1).len()
    }

    /// Whether G_1 … G_n are each connected.
    pub fn is_connected(&self, g: &MultiGraph) -> bool {
        self.segments[1..].iter().all(|s| s.to_graph(g).is_connected())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingReport {
    pub r1: bool,
    pub r2: bool,
    pub r3: bool,
    pub r4: bool,
    pub length: usize,
    pub width: usize,
    pub problems: Vec<String>,
}

impl RingReport {
    pub fn all(&self) -> bool {
        self.r1 && self.r2 && self.r3 && self.r4 && self.length >= 3
    }
}

pub fn verify_ring(g: &MultiGraph, ring: &RingDecomposition) -> RingReport {
    let mut problems = Vec::new();
    let n = ring.length();
    if n < 3 {
        problems.push(format!("length {n} is below 3"));
    }

    let mut r1 = true;
    let mut vs = BTreeSet::new();
    let mut es = BTreeSet::new();
    for (i, seg) in ring.segments.iter().enumerate() {
        if let Err(e) = seg.check_in(g) {
            r1 = false;
            problems.push(format!("R1: segment {i}: {e}"));
        }
        vs.extend(seg.vertices.iter().copied());
        es.extend(seg.edges.iter().copied());
    }
    if &vs != g.vertex_set() || es != g.edge_ids().collect::<BTreeSet<_>>() {
        r1 = false;
        problems.push("R1: segments do not cover the graph".into());
    }

    let mut r2 = true;
    let k = ring.segments.len();
    for i in 0..k {
        for j in i + 1..k {
            let consecutive = j == i + 1 || (i == 0 && j == k - 1);
            let (a, b) = (&ring.segments[i], &ring.segments[j]);
            if consecutive {
                if let Some(e) = a.edges.intersection(&b.edges).next() {
                    r2 = false;
                    problems.push(format!("R2: consecutive segments {i} and {j} share edge {e}"));
                }
            } else if let Some(v) = a.vertices.intersection(&b.vertices).next() {
                r2 = false;
                problems.push(format!("R2: segments {i} and {j} share vertex {v}"));
            }
        }
    }

    let interfaces = ring.interfaces();
    let width = ring.width();
    let mut r3 = width >= 1;
    if width == 0 {
        problems.push("R3: W_1 is empty".into());
    }
    for (i, w) in interfaces.iter().enumerate() {
        if w.len() != width {
            r3 = false;
            problems.push(format!("R3: W_{} has {} vertices, W_1 has {width}", i + 1, w.len()));
        }
    }

    let mut r4 = true;
    for i in 1..=n {
        let h = ring.segments[i].to_graph(g);
        let found = vertex_disjoint_paths_limited(&h, &interfaces[i - 1], &interfaces[i], width).len();
        if found < width {
            r4 = false;
            problems.push(format!("R4: segment {i} has {found} disjoint interface paths, need {width}"));
        }
    }
    RingReport { r1, r2, r3, r4, length: n, width, problems }
}

fn union(a: &Subgraph, b: &Subgraph) -> Subgraph {
    Subgraph {
        vertices: a.vertices.union(&b.vertices).copied().collect(),
        edges: a.edges.union(&b.edges).copied().collect(),
    }
}

/// Merge G_i with its successor (G_0 when i = n). Needs length at least 4.
pub fn absorb(ring: &RingDecomposition, i: usize) -> Result<RingDecomposition, DecompositionError> {
    let n = ring.length();
    if n < 4 {
        return Err(DecompositionError::TooShort { length: n, needed: 4 });
    }
    if i == 0 || i > n {
        return Err(DecompositionError::MalformedDecomposition(format!("no segment {i} to absorb")));
    }
    let mut segments = ring.segments.clone();
    if i < n {
        segments[i] = union(&segments[i], &segments[i + 1]);
        segments.remove(i + 1);
    } else {
        segments[0] = union(&segments[0], &segments[n]);
        segments.pop();
    }
    Ok(RingDecomposition { segments })
}

/// Ring from a window of gates: for consecutive gates t, t' the segment is
/// G[Y[t, t') ∖ U] without the edges inside Y_t'; G_0 holds every other edge plus
/// the first and last gate bags.
pub fn build_ring(
    g: &MultiGraph,
    td: &TreeDecomposition,
    report: &GatesReport,
    window: GateWindow,
) -> Result<RingDecomposition, DecompositionError> {
    if window.len < 4 {
        return Err(DecompositionError::WindowTooSmall { got: window.len, needed: 4 });
    }
    if window.start + window.len > report.gates.len() {
        return Err(DecompositionError::MalformedDecomposition("window runs past the last gate".into()));
    }
    let mut segments = vec![Subgraph::default()];
    let mut covered: BTreeSet<EdgeId> = BTreeSet::new();
    for a in window.start..window.start + window.len - 1 {
        let vertices: BTreeSet<VertexId> = report.y_range(td, a, a + 1).difference(&report.u).copied().collect();
        let next_gate = &report.gate_bags[a + 1];
        let edges: BTreeSet<EdgeId> = g
            .edges()
            .filter(|e| vertices.contains(&e.u) && vertices.contains(&e.v))
            .filter(|e| !(next_gate.contains(&e.u) && next_gate.contains(&e.v)))
            .map(|e| e.id)
            .collect();
        covered.extend(edges.iter().copied());
        segments.push(Subgraph { vertices, edges });
    }
    let mut g0 = Subgraph::default();
    for e in g.edges().filter(|e| !covered.contains(&e.id)) {
        g0.edges.insert(e.id);
        g0.vertices.insert(e.u);
        g0.vertices.insert(e.v);
    }
    g0.vertices.extend(report.gate_bags[window.start].iter().copied());
    g0.vertices.extend(report.gate_bags[window.start + window.len - 1].iter().copied());
    // vertices in no segment (isolated in g) go to G_0
    let placed: BTreeSet<VertexId> = segments[1..].iter().flat_map(|s| s.vertices.iter().copied()).collect();
    g0.vertices.extend(g.vertices().filter(|v| !placed.contains(v)));
    segments[0] = g0;
    Ok(RingDecomposition { segments })
}

/// Output of [`connectify`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Connectified {
    pub ring: RingDecomposition,
    pub rails: Vec<Path>,
    /// Width after each round, starting with the input width.
    pub widths: Vec<usize>,
}

/// Piece of `rail` from its first vertex in `from` to its first vertex in `to`.
fn cut_rail(rail: &Path, from: &BTreeSet<VertexId>, to: &BTreeSet<VertexId>) -> Option<Path> {
    let i = rail.vertices.iter().position(|v| from.contains(v))?;
    let j = rail.vertices.iter().position(|v| to.contains(v))?;
    (i <= j).then(|| rail.segment(i, j))
}

/// Group G_1 … G_{m²} into m unions of m consecutive segments (later segments join
/// G_0). If every union is connected that ring is returned. Otherwise, in the first
/// disconnected union, the component carrying the fewest rails (at least one) gives a
/// ring of length m made of the original segments cut down to it, with width at most
/// half the old one; the next round needs that ring to be connected already, since
/// it is too short to group again.
///
/// `rails` are `width` vertex-disjoint paths from W_1 to W_{n+1}.
pub fn connectify(
    g: &MultiGraph,
    ring: &RingDecomposition,
    rails: &[Path],
    m: usize,
) -> Result<Connectified, DecompositionError> {
    if m < 3 {
        return Err(DecompositionError::TooShort { length: m, needed: 3 });
    }
    let mut ring = ring.clone();
    let mut rails: Vec<Path> = rails.to_vec();
    let mut widths = vec![ring.width()];
    if rails.len() != ring.width() {
        return Err(DecompositionError::MalformedDecomposition(format!(
            "{} rails for a ring of width {}",
            rails.len(),
            ring.width()
        )));
    }
    loop {
        let n = ring.length();
        if widths.len() > 1 && ring.is_connected(g) {
            return Ok(Connectified { ring, rails, widths });
        }
        if n < m * m {
            return Err(DecompositionError::TooShort { length: n, needed: m * m });
        }
        // fold G_{m²+1} … G_n into G_0
        let mut g0 = ring.segments[0].clone();
        for seg in &ring.segments[m * m + 1..] {
            g0 = union(&g0, seg);
        }
        let groups: Vec<Vec<Subgraph>> = (0..m).map(|k| ring.segments[1 + k * m..1 + (k + 1) * m].to_vec()).collect();
        let unions: Vec<Subgraph> = groups.iter().map(|grp| grp.iter().skip(1).fold(grp[0].clone(), |acc, s| union(&acc, s))).collect();
        let end = ring.interface(m * m + 1);
        let start = ring.interface(1);
        let bad = unions.iter().position(|h| !h.to_graph(g).is_connected());
        let Some(k) = bad else {
            let mut segments = vec![g0];
            segments.extend(unions);
            let rails: Vec<Path> = rails.iter().filter_map(|r| cut_rail(r, &start, &end)).collect();
            let ring = RingDecomposition { segments };
            widths.push(ring.width());
            return Ok(Connectified { ring, rails, widths });
        };
        // restrict to one component of the k-th union
        let first = 1 + k * m;
        let w_in = ring.interface(first);
        let w_out = ring.interface(first + m);
        let h = unions[k].to_graph(g);
        let pieces: Vec<Path> = rails.iter().filter_map(|r| cut_rail(r, &w_in, &w_out)).collect();
        let comps = h.components();
        let count = |c: &BTreeSet<VertexId>| pieces.iter().filter(|p| c.contains(&p.start())).count();
        let Some(comp) = comps.iter().filter(|c| count(c) > 0).min_by_key(|c| count(c)) else {
            return Err(DecompositionError::MalformedDecomposition("no rail crosses the disconnected union".into()));
        };
        let comp_edges: BTreeSet<EdgeId> = h.edges().filter(|e| comp.contains(&e.u)).map(|e| e.id).collect();
        let mut segments = Vec::with_capacity(m + 1);
        let mut outside = Subgraph::default();
        for e in g.edges().filter(|e| !comp_edges.contains(&e.id)) {
            outside.edges.insert(e.id);
            outside.vertices.insert(e.u);
            outside.vertices.insert(e.v);
        }
        outside.vertices.extend(g.vertices().filter(|v| !comp.contains(v)));
        segments.push(outside);
        for seg in &groups[k] {
            segments.push(Subgraph {
                vertices: seg.vertices.intersection(comp).copied().collect(),
                edges: seg.edges.intersection(&comp_edges).copied().collect(),
            });
        }
        rails = pieces.into_iter().filter(|p| comp.contains(&p.start())).collect();
        ring = RingDecomposition { segments };
        widths.push(ring.width());
    }
}

/// Best-effort ring of length at least max(3, `min_length`) found from a min-fill
/// decomposition of `g`: the longest gate window clear of N(U) that yields a ring
/// passing all of R1–R4.
pub fn discover_ring(g: &MultiGraph, min_length: usize) -> Option<RingDecomposition> {
    let td = heuristic_td(g);
    let want = min_length.max(3) + 1;
    let longest = td.tree().vertex_count();
    for n in (want..=longest).rev() {
        let Some(report) = find_gates(g, &td, n) else { continue };
        for m in (want..=n).rev() {
            let Some(window) = avoid_u_window(&report, &td, g, m) else { continue };
            if let Ok(ring) = build_ring(g, &td, &report, window) {
                if verify_ring(g, &ring).all() {
                    return Some(ring);
                }
            }
        }
        return None;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{cycle, cycle_multi, ladder};

    fn sub(vs: &[u32], es: &[u32]) -> Subgraph {
        Subgraph::new(vs.iter().map(|&v| VertexId(v)).collect(), es.iter().map(|&e| EdgeId(e)).collect())
    }

    /// C_n cut into single edges: G_i = edge i with its ends, G_0 = the last edge.
    fn cycle_ring(n: u32) -> (MultiGraph, RingDecomposition) {
        let g = cycle(n as usize).unwrap();
        let mut segments = vec![sub(&[n - 1, 0], &[n - 1])];
        for i in 0..n - 1 {
            segments.push(sub(&[i, i + 1], &[i]));
        }
        (g, RingDecomposition::new(segments))
    }

    #[test]
    fn cycle_with_edge_segments() {
        let (g, ring) = cycle_ring(6);
        let rep = verify_ring(&g, &ring);
        assert!(rep.all(), "{rep:?}");
        assert_eq!(rep.width, 1);
        assert_eq!(ring.length(), 5);
    }

    #[test]
    fn shared_vertex_breaks_r2() {
        let (g, mut ring) = cycle_ring(6);
        ring.segments[1].vertices.insert(VertexId(3));
        let rep = verify_ring(&g, &ring);
        assert!(!rep.r2);
    }

    #[test]
    fn absorb_keeps_width() {
        let (g, ring) = cycle_ring(7);
        let mut cur = ring.clone();
        while cur.length() > 3 {
            cur = absorb(&cur, 1).unwrap();
            let rep = verify_ring(&g, &cur);
            assert!(rep.all(), "{rep:?}");
            assert_eq!(rep.width, 1);
        }
        assert!(matches!(absorb(&cur, 1), Err(DecompositionError::TooShort { length: 3, .. })));
        // absorbing twice at the same place merges three segments
        let twice = absorb(&absorb(&ring, 2).unwrap(), 2).unwrap();
        assert_eq!(twice.segments[2], union(&union(&ring.segments[2], &ring.segments[3]), &ring.segments[4]));
        let last = absorb(&ring, ring.length()).unwrap();
        assert!(verify_ring(&g, &last).all());
    }

    #[test]
    fn ladder_ring_has_width_two() {
        let d = ladder(10).unwrap();
        let td = TreeDecomposition::from_decomposed(&d).unwrap();
        let rep = find_gates(&d.graph, &td, 8).unwrap();
        let window = avoid_u_window(&rep, &td, &d.graph, 8).unwrap();
        let ring = build_ring(&d.graph, &td, &rep, window).unwrap();
        let check = verify_ring(&d.graph, &ring);
        assert!(check.all(), "{check:?}");
        assert_eq!(check.width, rep.s - rep.u.len());
        assert_eq!(check.width, 2);
        for i in 2..=ring.length() {
            let want: BTreeSet<VertexId> = rep.gate_bags[window.start + i - 1].difference(&rep.u).copied().collect();
            assert_eq!(ring.interface(i), want);
        }
        assert!(matches!(
            build_ring(&d.graph, &td, &rep, GateWindow { start: 0, len: 3 }),
            Err(DecompositionError::WindowTooSmall { got: 3, needed: 4 })
        ));
    }

    #[test]
    fn doubled_cycle_gives_width_one() {
        // C_{2,m} with the path decomposition {0,i,i+1}: gates {0,i}, U = {0}
        let m = 10u32;
        let g = cycle_multi(2, m as usize).unwrap();
        let mut bags = Vec::new();
        for i in 1..m - 1 {
            bags.push(vec![0, i, i + 1]);
            if i + 1 < m - 1 {
                bags.push(vec![0, i + 1]);
            }
        }
        let n = bags.len() as u32;
        let tree = MultiGraph::from_edge_list(n, &(1..n).map(|i| (i - 1, i)).collect::<Vec<_>>()).unwrap();
        let bags = bags.iter().enumerate().map(|(i, b)| (VertexId(i as u32), b.iter().map(|&v| VertexId(v)).collect())).collect();
        let td = TreeDecomposition::new(&g, tree, bags).unwrap();
        let rep = find_gates(&g, &td, 6).unwrap();
        assert_eq!(rep.u, BTreeSet::from([VertexId(0)]));
        let window = avoid_u_window(&rep, &td, &g, 5).unwrap();
        let ring = build_ring(&g, &td, &rep, window).unwrap();
        let check = verify_ring(&g, &ring);
        assert!(check.all(), "{check:?}");
        assert_eq!(check.width, 1);
    }

    /// Two rails 0-1-2-…-(k-1) and k-…-(2k-1) joined by a rung in every segment
    /// except the second, so the union of segments 4..6 splits in two.
    fn split_ladder(k: u32) -> (MultiGraph, RingDecomposition, Vec<Path>) {
        let mut edges = Vec::new();
        for i in 0..k - 1 {
            edges.push((i, i + 1));
            edges.push((k + i, k + i + 1));
        }
        // closing edges: G_0 joins both rails' ends
        edges.push((k - 1, 2 * k - 1));
        edges.push((0, k));
        let mut g = MultiGraph::from_edge_list(2 * k, &edges).unwrap();
        let mut segments = vec![Subgraph::default()];
        for i in 0..k - 1 {
            let mut s = sub(&[i, i + 1, k + i, k + i + 1], &[2 * i, 2 * i + 1]);
            if !(4..7).contains(&(i + 1)) {
                let e = g.add_edge(VertexId(i), VertexId(k + i)).unwrap();
                s.edges.insert(e);
            }
            segments.push(s);
        }
        // G_0 = the two closing edges
        segments[0] = sub(&[k - 1, 2 * k - 1, 0, k], &[2 * (k - 1), 2 * (k - 1) + 1]);
        let rails = vec![
            Path::from_walk(&g, VertexId(0), &(0..k - 1).map(|i| EdgeId(2 * i)).collect::<Vec<_>>()).unwrap(),
            Path::from_walk(&g, VertexId(k), &(0..k - 1).map(|i| EdgeId(2 * i + 1)).collect::<Vec<_>>()).unwrap(),
        ];
        (g, RingDecomposition::new(segments), rails)
    }

    #[test]
    fn connectify_all_connected() {
        let d = ladder(14).unwrap();
        let td = TreeDecomposition::from_decomposed(&d).unwrap();
        let rep = find_gates(&d.graph, &td, 12).unwrap();
        let window = avoid_u_window(&rep, &td, &d.graph, 10).unwrap();
        let ring = build_ring(&d.graph, &td, &rep, window).unwrap();
        let rails = rep.window_rails(window);
        let out = connectify(&d.graph, &ring, &rails, 3).unwrap();
        assert_eq!(out.widths, vec![2, 2]);
        assert_eq!(out.ring.length(), 3);
        assert!(out.ring.is_connected(&d.graph));
        assert!(verify_ring(&d.graph, &out.ring).all());
    }

    #[test]
    fn connectify_halves_width() {
        let (g, ring, rails) = split_ladder(11);
        assert!(verify_ring(&g, &ring).all(), "{:?}", verify_ring(&g, &ring));
        let out = connectify(&g, &ring, &rails, 3).unwrap();
        assert_eq!(out.widths, vec![2, 1]);
        let check = verify_ring(&g, &out.ring);
        assert!(check.all(), "{check:?}");
        assert!(out.ring.is_connected(&g));
        assert_eq!(out.rails.len(), 1);
    }

    #[test]
    fn connectify_needs_length() {
        let (g, ring) = cycle_ring(6);
        let rail = Path::from_walk(&g, VertexId(0), &(0..5).map(EdgeId).collect::<Vec<_>>()).unwrap();
        assert!(matches!(connectify(&g, &ring, &[rail], 3), Err(DecompositionError::TooShort { length: 5, needed: 9 })));
    }

    #[test]
    fn json_shape() {
        let (_, ring) = cycle_ring(4);
        let text = serde_json::to_string(&ring).unwrap();
        assert!(text.starts_with(r#"{"segments":[{"vertices":[0,3],"edges":[3]}"#), "{text}");
        assert_eq!(serde_json::from_str::<RingDecomposition>(&text).unwrap(), ring);
    }
}
