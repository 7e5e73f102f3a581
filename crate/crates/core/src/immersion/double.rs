//! Building C_{2,r} immersions from aligned path pairs and ring decompositions.

use std::collections::BTreeSet;

use thiserror::Error;

use super::align::{find_compatible, uncross};
use super::{assemble, verify_immersion, ImmersionCertificate, Violation};
use crate::connectivity::{edge_disjoint_paths, max_edge_disjoint_paths, EdgeCut, PathsOrCut};
use crate::decomposition::RingDecomposition;
use crate::generators::{cycle_multi, path_multi};
use crate::graph::{MultiGraph, VertexId};
use crate::path::{Path, PathFamily};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompletionError {
    #[error("no aligned pair of paths shares {0} vertices")]
    NotCompatible(usize),
    #[error("fewer than two edge-disjoint closing paths; cut of size {}", .0.size())]
    Infeasible(EdgeCut),
    #[error("partial immersion is unusable: {0}")]
    PreconditionViolated(String),
}

/// P_{2,r} certificate along two aligned x–y paths meeting in `terminals` (in order,
/// first x, last y). Both paths must contain every terminal.
fn double_path_along(first: &Path, second: &Path, terminals: &[VertexId]) -> Option<ImmersionCertificate> {
    let r = terminals.len();
    let mut paths = Vec::with_capacity(2 * (r - 1));
    for w in terminals.windows(2) {
        for q in [first, second] {
            let (i, j) = (q.position(w[0])?, q.position(w[1])?);
            if i >= j {
                return None;
            }
            paths.push(q.segment(i, j));
        }
    }
    Some(assemble(path_multi(2, r).expect("r >= 2"), terminals.to_vec(), paths))
}

/// C_{2,r} from four edge-disjoint x–y paths, two of which are aligned and share at
/// least `r` vertices. The terminals are x, the first `r - 2` shared internal vertices
/// and y; the remaining two paths close the cycle.
pub fn compatible_to_c2r(paths: &[Path], r: usize) -> Result<ImmersionCertificate, CompletionError> {
    if r < 2 || paths.len() < 4 {
        return Err(CompletionError::PreconditionViolated(format!(
            "need r >= 2 and four paths, got r={r} and {} paths",
            paths.len()
        )));
    }
    let family = PathFamily { paths: paths.to_vec(), ..Default::default() };
    if let Some(e) = family.shared_edge() {
        return Err(CompletionError::PreconditionViolated(format!("paths share edge {e}")));
    }
    let c = find_compatible(paths, r).ok_or(CompletionError::NotCompatible(r))?;
    let mut terminals: Vec<VertexId> = c.common[..r - 1].to_vec();
    terminals.push(*c.common.last().unwrap());
    let (p, q) = (&paths[c.first], &paths[c.second]);
    let partial = double_path_along(p, q, &terminals).ok_or(CompletionError::NotCompatible(r))?;
    let closing: Vec<Path> = (0..paths.len()).filter(|&i| i != c.first && i != c.second).take(2).map(|i| paths[i].reversed()).collect();
    Ok(close(partial, closing))
}

fn close(partial: ImmersionCertificate, closing: Vec<Path>) -> ImmersionCertificate {
    let r = partial.pattern.vertex_count();
    let terminals: Vec<VertexId> = partial.terminals.values().copied().collect();
    let mut paths: Vec<Path> = Vec::with_capacity(2 * r);
    for (_, edges) in partial.paths {
        paths.push(Path { vertices: Vec::new(), edges });
    }
    paths.extend(closing);
    assemble(cycle_multi(2, r).expect("r >= 2"), terminals, paths)
}

/// Extend a P_{2,r} immersion ending at `x` and `y` to C_{2,r} by routing two more
/// edge-disjoint y–x paths through the unused edges of `g`.
pub fn complete_double_path(
    g: &MultiGraph,
    partial: &ImmersionCertificate,
    x: VertexId,
    y: VertexId,
) -> Result<ImmersionCertificate, CompletionError> {
    let r = partial.pattern.vertex_count();
    let bad = |msg: String| CompletionError::PreconditionViolated(msg);
    if r < 2 || path_multi(2, r).ok().as_ref() != Some(&partial.pattern) {
        return Err(bad("pattern is not P_(2,r)".into()));
    }
    verify_immersion(g, partial).map_err(|v: Violation| bad(v.to_string()))?;
    let first = partial.terminals[&VertexId(0)];
    let last = partial.terminals[&VertexId(r as u32 - 1)];
    if (first, last) != (x, y) {
        return Err(bad(format!("partial immersion runs {first}..{last}, expected {x}..{y}")));
    }
    let rest = g.without_edges(&partial.used_edges());
    match edge_disjoint_paths(&rest, &BTreeSet::from([y]), &BTreeSet::from([x]), 2) {
        Ok(PathsOrCut::Paths(fam)) => Ok(close(partial.clone(), fam.paths.into_iter().take(2).collect())),
        Ok(PathsOrCut::Infeasible(cut)) => Err(CompletionError::Infeasible(cut)),
        Err(e) => Err(bad(e.to_string())),
    }
}

/// C_{2,r} through the long segments of a ring decomposition.
///
/// Takes a maximum family of edge-disjoint paths from W_1 to W_{n+1} inside
/// G_1 ∪ … ∪ G_n. With more than `w` of them, the family is uncrossed and every
/// aligned pair sharing `r` consecutive vertices is tried as the double path; the
/// cycle is then closed through the rest of `g`. Returns `None` when the family has
/// only `w` paths or no window closes.
pub fn double_cycle_from_ring(g: &MultiGraph, ring: &RingDecomposition, r: usize) -> Option<ImmersionCertificate> {
    if r < 2 || ring.length() < 2 {
        return None;
    }
    let mut vs = BTreeSet::new();
    let mut es = BTreeSet::new();
    for seg in &ring.segments[1..] {
        vs.extend(seg.vertices.iter().copied());
        es.extend(seg.edges.iter().copied());
    }
    let inner = g.subgraph(&vs, &es);
    let w1 = ring.interface(1);
    let wl = ring.interface(ring.length() + 1);
    if w1.is_empty() || wl.is_empty() || !w1.is_disjoint(&wl) {
        return None;
    }
    let family = max_edge_disjoint_paths(&inner, &w1, &wl);
    if family.len() <= ring.width() {
        return None;
    }
    let aligned = uncross(&family).ok()?.family.paths;
    for a in 0..aligned.len() {
        for b in a + 1..aligned.len() {
            let (p, q) = (&aligned[a], &aligned[b]);
            let qpos: BTreeSet<VertexId> = q.vertices.iter().copied().collect();
            let common: Vec<VertexId> = p.vertices.iter().copied().filter(|v| qpos.contains(v)).collect();
            if common.len() < r {
                continue;
            }
            for window in common.windows(r) {
                let Some(partial) = double_path_along(p, q, window) else { continue };
                if let Ok(cert) = complete_double_path(g, &partial, window[0], window[r - 1]) {
                    return Some(cert);
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::grid_rect;
    use crate::graph::EdgeId;

    fn path(g: &MultiGraph, start: u32, edges: &[u32]) -> Path {
        Path::from_walk(g, VertexId(start), &edges.iter().map(|&e| EdgeId(e)).collect::<Vec<_>>()).unwrap()
    }

    /// Four parallel routes between 0 and 4: two of them run 0-1-2-3-4 on doubled
    /// edges, two go around through 5 and 6.
    fn four_routes() -> (MultiGraph, Vec<Path>) {
        let mut edges = Vec::new();
        for i in 0..4 {
            edges.push((i, i + 1));
            edges.push((i, i + 1));
        }
        edges.extend([(0, 5), (5, 4), (0, 6), (6, 4)]);
        let g = MultiGraph::from_edge_list(7, &edges).unwrap();
        let paths = vec![
            path(&g, 0, &[0, 2, 4, 6]),
            path(&g, 0, &[1, 3, 5, 7]),
            path(&g, 0, &[8, 9]),
            path(&g, 0, &[10, 11]),
        ];
        (g, paths)
    }

    #[test]
    fn four_paths_give_double_cycle() {
        let (g, paths) = four_routes();
        for r in 2..=5 {
            let cert = compatible_to_c2r(&paths, r).unwrap();
            assert_eq!(cert.pattern, cycle_multi(2, r).unwrap());
            verify_immersion(&g, &cert).unwrap();
        }
        assert_eq!(compatible_to_c2r(&paths, 6), Err(CompletionError::NotCompatible(6)));
    }

    #[test]
    fn completion_uses_remaining_edges() {
        let (g, paths) = four_routes();
        let partial = double_path_along(&paths[0], &paths[1], &[VertexId(0), VertexId(2), VertexId(4)]).unwrap();
        verify_immersion(&g, &partial).unwrap();
        let cert = complete_double_path(&g, &partial, VertexId(0), VertexId(4)).unwrap();
        verify_immersion(&g, &cert).unwrap();
        // without the detours there is nothing left to close with
        let bare = g.without_edges(&(8..12).map(EdgeId).collect());
        assert!(matches!(
            complete_double_path(&bare, &partial, VertexId(0), VertexId(4)),
            Err(CompletionError::Infeasible(cut)) if cut.size() == 0
        ));
    }

    #[test]
    fn completion_checks_endpoints() {
        let (g, paths) = four_routes();
        let partial = double_path_along(&paths[0], &paths[1], &[VertexId(0), VertexId(2), VertexId(4)]).unwrap();
        assert!(matches!(
            complete_double_path(&g, &partial, VertexId(4), VertexId(0)),
            Err(CompletionError::PreconditionViolated(_))
        ));
        let grid = grid_rect(2, 2).unwrap();
        assert!(matches!(
            complete_double_path(&grid, &partial, VertexId(0), VertexId(4)),
            Err(CompletionError::PreconditionViolated(_))
        ));
    }
}
