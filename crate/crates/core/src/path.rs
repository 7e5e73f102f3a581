//! Paths as explicit vertex/edge alternations, and families of them.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::graph::{EdgeId, GraphError, MultiGraph, VertexId};

/// A walk `vertices[0], edges[0], vertices[1], …`. Most producers return
/// vertex-simple paths; [`Path::is_simple`] checks it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Path {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

impl Path {
    pub fn trivial(v: VertexId) -> Self {
        Path { vertices: vec![v], edges: Vec::new() }
    }

    /// Follow `edges` in `g` starting from `start`.
    pub fn from_walk(g: &MultiGraph, start: VertexId, edges: &[EdgeId]) -> Result<Self, GraphError> {
        let vertices = g.trace_walk(start, edges)?;
        Ok(Path { vertices, edges: edges.to_vec() })
    }

    pub fn start(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn end(&self) -> VertexId {
        *self.vertices.last().unwrap()
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn reversed(&self) -> Path {
        let mut vertices = self.vertices.clone();
        let mut edges = self.edges.clone();
        vertices.reverse();
        edges.reverse();
        Path { vertices, edges }
    }

    /// First position of `v` along the path.
    pub fn position(&self, v: VertexId) -> Option<usize> {
        self.vertices.iter().position(|&x| x == v)
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    /// Subpath between vertex positions `i <= j`.
    pub fn segment(&self, i: usize, j: usize) -> Path {
        assert!(i <= j && j < self.vertices.len(), "segment bounds out of range");
        Path { vertices: self.vertices[i..=j].to_vec(), edges: self.edges[i..j].to_vec() }
    }

    /// Subpath between the first occurrences of `a` and `b`, oriented from `a` to `b`.
    pub fn between(&self, a: VertexId, b: VertexId) -> Option<Path> {
        let (i, j) = (self.position(a)?, self.position(b)?);
        Some(if i <= j { self.segment(i, j) } else { self.segment(j, i).reversed() })
    }

    pub fn concat(&self, other: &Path) -> Path {
        assert_eq!(self.end(), other.start(), "paths do not meet");
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices[1..]);
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        Path { vertices, edges }
    }

    pub fn is_simple(&self) -> bool {
        let set: BTreeSet<_> = self.vertices.iter().collect();
        set.len() == self.vertices.len()
    }

    /// Remove closed sub-walks so no vertex repeats. The result uses a subset of the edges.
    pub fn simplify(&self) -> Path {
        let mut vertices: Vec<VertexId> = Vec::with_capacity(self.vertices.len());
        let mut edges: Vec<EdgeId> = Vec::with_capacity(self.edges.len());
        let mut at: BTreeMap<VertexId, usize> = BTreeMap::new();
        for (i, &v) in self.vertices.iter().enumerate() {
            if let Some(&p) = at.get(&v) {
                for x in vertices.drain(p + 1..) {
                    at.remove(&x);
                }
                edges.truncate(p);
            } else {
                if i > 0 {
                    edges.push(self.edges[i - 1]);
                }
                at.insert(v, vertices.len());
                vertices.push(v);
            }
        }
        Path { vertices, edges }
    }

    pub fn internal_vertices(&self) -> &[VertexId] {
        if self.vertices.len() <= 2 {
            &[]
        } else {
            &self.vertices[1..self.vertices.len() - 1]
        }
    }

    /// Whether this is a genuine walk in `g`.
    pub fn check_in(&self, g: &MultiGraph) -> Result<(), GraphError> {
        if self.vertices.len() != self.edges.len() + 1 {
            return Err(GraphError::NotAPath("vertex and edge counts disagree".into()));
        }
        let walk = g.trace_walk(self.vertices[0], &self.edges)?;
        if walk != self.vertices {
            return Err(GraphError::NotAPath("vertex list does not match edges".into()));
        }
        Ok(())
    }
}

/// Paths from a source set to a target set.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathFamily {
    pub paths: Vec<Path>,
    pub sources: BTreeSet<VertexId>,
    pub targets: BTreeSet<VertexId>,
}

impl PathFamily {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn total_edges(&self) -> usize {
        self.paths.iter().map(Path::len).sum()
    }

    pub fn edge_set(&self) -> BTreeSet<EdgeId> {
        self.paths.iter().flat_map(|p| p.edges.iter().copied()).collect()
    }

    /// An edge used twice (within one path or across paths), if any.
    pub fn shared_edge(&self) -> Option<EdgeId> {
        let mut seen = BTreeSet::new();
        self.paths.iter().flat_map(|p| p.edges.iter()).find(|e| !seen.insert(**e)).copied()
    }

    pub fn is_edge_disjoint(&self) -> bool {
        self.shared_edge().is_none()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vs(xs: &[u32]) -> Vec<VertexId> {
        xs.iter().map(|&x| VertexId(x)).collect()
    }

    fn es(xs: &[u32]) -> Vec<EdgeId> {
        xs.iter().map(|&x| EdgeId(x)).collect()
    }

    #[test]
    fn simplify_drops_detours() {
        let p = Path { vertices: vs(&[0, 1, 2, 3, 1, 4]), edges: es(&[10, 11, 12, 13, 14]) };
        let q = p.simplify();
        assert_eq!(q.vertices, vs(&[0, 1, 4]));
        assert_eq!(q.edges, es(&[10, 14]));
        assert!(q.is_simple());
    }

    #[test]
    fn simplify_back_to_start() {
        let p = Path { vertices: vs(&[0, 1, 0, 2]), edges: es(&[1, 2, 3]) };
        let q = p.simplify();
        assert_eq!(q.vertices, vs(&[0, 2]));
        assert_eq!(q.edges, es(&[3]));
    }

    #[test]
    fn between_orients() {
        let p = Path { vertices: vs(&[0, 1, 2, 3]), edges: es(&[5, 6, 7]) };
        let q = p.between(VertexId(3), VertexId(1)).unwrap();
        assert_eq!(q.vertices, vs(&[3, 2, 1]));
        assert_eq!(q.edges, es(&[7, 6]));
    }

    #[test]
    fn shared_edge_detected() {
        let fam = PathFamily {
            paths: vec![
                Path { vertices: vs(&[0, 1]), edges: es(&[0]) },
                Path { vertices: vs(&[1, 0]), edges: es(&[0]) },
            ],
            ..Default::default()
        };
        assert_eq!(fam.shared_edge(), Some(EdgeId(0)));
    }
}
