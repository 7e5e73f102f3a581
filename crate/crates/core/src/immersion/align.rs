//! Alignment of edge-disjoint path families and the uncrossing swap.
//!
//! Two paths are aligned when the internal vertices they share appear in the same
//! order along both. Swapping tails at an out-of-order pair strictly shortens the
//! family, so repeated swapping terminates in an aligned family.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeId, VertexId};
use crate::path::{Path, PathFamily};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UncrossError {
    #[error("paths share edge {0}")]
    NotEdgeDisjoint(EdgeId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CommonVertex {
    pub vertex: VertexId,
    pub first_index: usize,
    pub second_index: usize,
}

/// Shared internal vertices of one pair of paths, ordered along the first path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PairAlignment {
    pub first: usize,
    pub second: usize,
    pub common: Vec<CommonVertex>,
    pub aligned: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentReport {
    pub pairs: Vec<PairAlignment>,
}

impl AlignmentReport {
    pub fn aligned(&self) -> bool {
        self.pairs.iter().all(|p| p.aligned)
    }
}

fn positions(p: &Path) -> BTreeMap<VertexId, usize> {
    p.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect()
}

fn common_internal(a: &Path, b: &Path) -> Vec<CommonVertex> {
    let pb = positions(b);
    let last_b = b.vertices.len() - 1;
    let last_a = a.vertices.len() - 1;
    a.vertices
        .iter()
        .enumerate()
        .filter(|&(i, _)| i > 0 && i < last_a)
        .filter_map(|(i, v)| match pb.get(v) {
            Some(&j) if j > 0 && j < last_b => Some(CommonVertex { vertex: *v, first_index: i, second_index: j }),
            _ => None,
        })
        .collect()
}

/// Position pair in `common` (ordered along the first path) of the first vertex pair
/// met in opposite order along the second path.
fn first_crossing(common: &[CommonVertex]) -> Option<(usize, usize)> {
    for i in 0..common.len() {
        for j in i + 1..common.len() {
            if common[j].second_index < common[i].second_index {
                return Some((i, j));
            }
        }
    }
    None
}

pub fn alignment_report(paths: &[Path]) -> AlignmentReport {
    let mut pairs = Vec::new();
    for a in 0..paths.len() {
        for b in a + 1..paths.len() {
            let common = common_internal(&paths[a], &paths[b]);
            let aligned = first_crossing(&common).is_none();
            pairs.push(PairAlignment { first: a, second: b, common, aligned });
        }
    }
    AlignmentReport { pairs }
}

pub fn is_aligned(paths: &[Path]) -> bool {
    for a in 0..paths.len() {
        for b in a + 1..paths.len() {
            if first_crossing(&common_internal(&paths[a], &paths[b])).is_some() {
                return false;
            }
        }
    }
    true
}

/// Result of [`uncross`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Uncrossed {
    pub family: PathFamily,
    pub swaps: usize,
}

/// Make a family of edge-disjoint paths pairwise aligned without adding edges.
///
/// Repeatedly takes the first pair of paths (by index) with an out-of-order vertex
/// pair `u, v` (u before v on the first path) and replaces them by
/// `Q1[start, u] + Q2[u, end]` and `Q2[start, v] + Q1[v, end]`, shortcut to paths.
/// The segments `Q1[u, v]` and `Q2[v, u]` are dropped, so each swap removes at least
/// two edges.
pub fn uncross(family: &PathFamily) -> Result<Uncrossed, UncrossError> {
    if let Some(e) = family.shared_edge() {
        return Err(UncrossError::NotEdgeDisjoint(e));
    }
    let mut paths: Vec<Path> = family.paths.iter().map(Path::simplify).collect();
    let mut swaps = 0;
    'outer: loop {
        for a in 0..paths.len() {
            for b in a + 1..paths.len() {
                let common = common_internal(&paths[a], &paths[b]);
                if let Some((i, j)) = first_crossing(&common) {
                    let (u, v) = (common[i], common[j]);
                    let q1 = &paths[a];
                    let q2 = &paths[b];
                    let last1 = q1.vertices.len() - 1;
                    let last2 = q2.vertices.len() - 1;
                    // u = q1[u.first_index] = q2[u.second_index]; v after u on q1, before on q2
                    let new1 = q1.segment(0, u.first_index).concat(&q2.segment(u.second_index, last2)).simplify();
                    let new2 = q2.segment(0, v.second_index).concat(&q1.segment(v.first_index, last1)).simplify();
                    paths[a] = new1;
                    paths[b] = new2;
                    swaps += 1;
                    continue 'outer;
                }
            }
        }
        break;
    }
    Ok(Uncrossed {
        family: PathFamily { paths, sources: family.sources.clone(), targets: family.targets.clone() },
        swaps,
    })
}

/// An aligned pair of x–y paths sharing at least `r` vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Compatible {
    pub first: usize,
    pub second: usize,
    /// All shared vertices in path order, starting with x and ending with y.
    pub common: Vec<VertexId>,
}

/// First pair (by index) of aligned paths meeting in at least `r` vertices, counting
/// the shared ends.
pub fn find_compatible(paths: &[Path], r: usize) -> Option<Compatible> {
    for a in 0..paths.len() {
        for b in a + 1..paths.len() {
            let (p, q) = (&paths[a], &paths[b]);
            if p.start() != q.start() || p.end() != q.end() {
                continue;
            }
            let inner = common_internal(p, q);
            if first_crossing(&inner).is_some() {
                continue;
            }
            let mut common = vec![p.start()];
            common.extend(inner.iter().map(|c| c.vertex));
            common.push(p.end());
            let distinct: BTreeSet<_> = common.iter().collect();
            if distinct.len() >= r {
                return Some(Compatible { first: a, second: b, common });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::MultiGraph;

    fn path(g: &MultiGraph, start: u32, edges: &[u32]) -> Path {
        Path::from_walk(g, VertexId(start), &edges.iter().map(|&e| EdgeId(e)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn vertex_disjoint_paths_are_untouched() {
        let g = MultiGraph::from_edge_list(6, &[(0, 1), (1, 2), (3, 4), (4, 5)]).unwrap();
        let fam = PathFamily { paths: vec![path(&g, 0, &[0, 1]), path(&g, 3, &[2, 3])], ..Default::default() };
        let out = uncross(&fam).unwrap();
        assert_eq!(out.swaps, 0);
        assert_eq!(out.family.paths, fam.paths);
    }

    #[test]
    fn swap_drops_the_crossing_segments() {
        // Q1 = 0 - u - a - v - 9, Q2 = 5 - v - b - u - 8 with u = 1, v = 3
        let g = MultiGraph::from_edge_list(
            10,
            &[(0, 1), (1, 2), (2, 3), (3, 9), (5, 3), (3, 4), (4, 1), (1, 8)],
        )
        .unwrap();
        let q1 = path(&g, 0, &[0, 1, 2, 3]);
        let q2 = path(&g, 5, &[4, 5, 6, 7]);
        let fam = PathFamily { paths: vec![q1, q2], ..Default::default() };
        assert!(!is_aligned(&fam.paths));
        let out = uncross(&fam).unwrap();
        assert_eq!(out.swaps, 1);
        let p = &out.family.paths;
        assert_eq!(p[0].vertices, vec![VertexId(0), VertexId(1), VertexId(8)]);
        assert_eq!(p[1].vertices, vec![VertexId(5), VertexId(3), VertexId(9)]);
        assert_eq!(out.family.total_edges(), 4);
        assert!(is_aligned(p));
    }

    #[test]
    fn compatible_pair_counts_ends() {
        let g = MultiGraph::from_edge_list(2, &[(0, 1), (0, 1)]).unwrap();
        let paths = vec![path(&g, 0, &[0]), path(&g, 0, &[1])];
        let c = find_compatible(&paths, 2).unwrap();
        assert_eq!(c.common, vec![VertexId(0), VertexId(1)]);
        assert!(find_compatible(&paths, 3).is_none());
    }

    #[test]
    fn rejects_shared_edges() {
        let g = MultiGraph::from_edge_list(2, &[(0, 1)]).unwrap();
        let fam = PathFamily { paths: vec![path(&g, 0, &[0]), path(&g, 0, &[0])], ..Default::default() };
        assert_eq!(uncross(&fam), Err(UncrossError::NotEdgeDisjoint(EdgeId(0))));
    }
}
