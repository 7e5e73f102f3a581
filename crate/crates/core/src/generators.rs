//! Deterministic instance families.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use thiserror::Error;

use crate::connectivity::edge_connectivity_violation;
use crate::graph::{MultiGraph, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

fn invalid(msg: impl Into<String>) -> GenError {
    GenError::InvalidParams(msg.into())
}

/// A graph together with a tree-decomposition given as bags and tree edges
/// (tree vertex `i` carries `bags[i]`).
#[derive(Clone, Debug)]
pub struct Decomposed {
    pub graph: MultiGraph,
    pub bags: Vec<BTreeSet<VertexId>>,
    pub tree_edges: Vec<(usize, usize)>,
}

/// C_{t,r}: an r-cycle with every edge replaced by `t` parallel edges. Edge ids run
/// `t*i .. t*i + t` for the class joining `i` and `i + 1 (mod r)`.
pub fn cycle_multi(t: usize, r: usize) -> Result<MultiGraph, GenError> {
    if t == 0 || r < 2 {
        return Err(invalid(format!("C_(t,r) needs t >= 1 and r >= 2, got t={t}, r={r}")));
    }
    let mut edges = Vec::with_capacity(t * r);
    for i in 0..r {
        for _ in 0..t {
            edges.push((i as u32, ((i + 1) % r) as u32));
        }
    }
    Ok(MultiGraph::from_edge_list(r as u32, &edges).expect("valid cycle"))
}

/// P_{t,r}: an r-vertex path with every edge replaced by `t` parallel edges. Edge ids
/// agree with [`cycle_multi`] on the shared classes.
pub fn path_multi(t: usize, r: usize) -> Result<MultiGraph, GenError> {
    if t == 0 || r < 2 {
        return Err(invalid(format!("P_(t,r) needs t >= 1 and r >= 2, got t={t}, r={r}")));
    }
    let mut edges = Vec::with_capacity(t * (r - 1));
    for i in 0..r - 1 {
        for _ in 0..t {
            edges.push((i as u32, (i + 1) as u32));
        }
    }
    Ok(MultiGraph::from_edge_list(r as u32, &edges).expect("valid path"))
}

/// K_{t,r} with parts `0..t` and `t..t+r`.
pub fn complete_bipartite(t: usize, r: usize) -> Result<MultiGraph, GenError> {
    if t == 0 || r == 0 {
        return Err(invalid("complete bipartite graph needs nonempty parts"));
    }
    let mut edges = Vec::new();
    for a in 0..t {
        for b in 0..r {
            edges.push((a as u32, (t + b) as u32));
        }
    }
    Ok(MultiGraph::from_edge_list((t + r) as u32, &edges).expect("valid"))
}

pub fn complete(n: usize) -> MultiGraph {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            edges.push((a as u32, b as u32));
        }
    }
    MultiGraph::from_edge_list(n as u32, &edges).expect("valid")
}

pub fn cycle(n: usize) -> Result<MultiGraph, GenError> {
    if n < 3 {
        return Err(invalid("a simple cycle needs at least 3 vertices"));
    }
    cycle_multi(1, n)
}

/// `rows × cols` grid; vertex `r * cols + c`.
pub fn grid_rect(rows: usize, cols: usize) -> Result<MultiGraph, GenError> {
    if rows == 0 || cols == 0 {
        return Err(invalid("grid dimensions must be positive"));
    }
    let id = |r: usize, c: usize| (r * cols + c) as u32;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    Ok(MultiGraph::from_edge_list((rows * cols) as u32, &edges).expect("valid"))
}

/// The g × g grid J_g.
pub fn grid(g: usize) -> Result<MultiGraph, GenError> {
    grid_rect(g, g)
}

/// Ladder with `n` rungs (vertices `2i`, `2i + 1` on rung `i`) and its path
/// decomposition alternating square bags and the inner rung bags, starting and
/// ending with a square.
pub fn ladder(n: usize) -> Result<Decomposed, GenError> {
    if n < 2 {
        return Err(invalid("a ladder needs at least 2 rungs"));
    }
    let mut edges = Vec::new();
    for i in 0..n as u32 {
        edges.push((2 * i, 2 * i + 1));
        if i + 1 < n as u32 {
            edges.push((2 * i, 2 * i + 2));
            edges.push((2 * i + 1, 2 * i + 3));
        }
    }
    let graph = MultiGraph::from_edge_list(2 * n as u32, &edges).expect("valid");
    let rung = |i: usize| BTreeSet::from([VertexId(2 * i as u32), VertexId(2 * i as u32 + 1)]);
    let mut bags = Vec::new();
    for i in 0..n - 1 {
        if i > 0 {
            bags.push(rung(i));
        }
        let mut sq = rung(i);
        sq.extend(rung(i + 1));
        bags.push(sq);
    }
    let tree_edges = (1..bags.len()).map(|k| (k - 1, k)).collect();
    Ok(Decomposed { graph, bags, tree_edges })
}

/// A path of `spine` cliques of order `size`, consecutive ones sharing `overlap`
/// vertices, with `legs` further cliques hanging off each spine clique. The
/// decomposition has a bag per clique and a bag per attachment set.
pub fn caterpillar_of_cliques(spine: usize, size: usize, overlap: usize, legs: usize) -> Result<Decomposed, GenError> {
    if spine < 2 || overlap == 0 || size < 2 * overlap + usize::from(legs > 0) * overlap || size < 2 {
        return Err(invalid(format!(
            "need spine >= 2, overlap >= 1 and size >= {} overlaps, got spine={spine} size={size} overlap={overlap}",
            if legs > 0 { 3 } else { 2 }
        )));
    }
    let mut graph = MultiGraph::new();
    let mut bags: Vec<BTreeSet<VertexId>> = Vec::new();
    let mut tree_edges = Vec::new();
    let mut next = 0u32;
    let mut fresh = |graph: &mut MultiGraph| {
        let v = VertexId(next);
        next += 1;
        graph.add_vertex(v);
        v
    };
    let add_clique = |graph: &mut MultiGraph, vs: &[VertexId]| {
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                graph.add_edge(vs[i], vs[j]).expect("distinct clique vertices");
            }
        }
    };
    let mut prev: Option<(Vec<VertexId>, usize)> = None;
    for _ in 0..spine {
        let mut members: Vec<VertexId> = Vec::with_capacity(size);
        if let Some((p, _)) = &prev {
            members.extend_from_slice(&p[size - overlap..]);
        }
        while members.len() < size {
            members.push(fresh(&mut graph));
        }
        add_clique(&mut graph, &members);
        let clique_node = if let Some((p, p_node)) = &prev {
            let adhesion: BTreeSet<VertexId> = p[size - overlap..].iter().copied().collect();
            bags.push(adhesion);
            let a = bags.len() - 1;
            tree_edges.push((*p_node, a));
            bags.push(members.iter().copied().collect());
            tree_edges.push((a, a + 1));
            a + 1
        } else {
            bags.push(members.iter().copied().collect());
            bags.len() - 1
        };
        if legs > 0 {
            let attach: Vec<VertexId> = members[overlap..2 * overlap].to_vec();
            bags.push(attach.iter().copied().collect());
            let a = bags.len() - 1;
            tree_edges.push((clique_node, a));
            for _ in 0..legs {
                let mut leg = attach.clone();
                while leg.len() < size {
                    leg.push(fresh(&mut graph));
                }
                add_clique(&mut graph, &leg);
                bags.push(leg.iter().copied().collect());
                tree_edges.push((a, bags.len() - 1));
            }
        }
        prev = Some((members, clique_node));
    }
    Ok(Decomposed { graph, bags, tree_edges })
}

/// Random loopless multigraph on `n` vertices with `m` edges.
pub fn random_multigraph(n: usize, m: usize, rng: &mut impl Rng) -> Result<MultiGraph, GenError> {
    if n < 2 && m > 0 {
        return Err(invalid("edges need at least two vertices"));
    }
    let mut g = MultiGraph::with_vertices(n as u32);
    for _ in 0..m {
        let u = rng.gen_range(0..n as u32);
        let mut v = rng.gen_range(0..n as u32 - 1);
        if v >= u {
            v += 1;
        }
        g.add_edge(VertexId(u), VertexId(v)).expect("distinct ends");
    }
    Ok(g)
}

/// Edges of a uniformly random labelled tree on `0..n` (random attachment order).
pub fn random_tree_edges(n: usize, rng: &mut impl Rng) -> Vec<(u32, u32)> {
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.shuffle(rng);
    (1..n).map(|i| (order[rng.gen_range(0..i)], order[i])).collect()
}

/// Parameters for [`random_k_edge_connected`].
#[derive(Clone, Copy, Debug)]
pub struct KConnectedParams {
    pub n: usize,
    pub k: usize,
    /// Random extra edges added after the connectivity core.
    pub extra_edges: usize,
    /// Soft cap on degrees for the extra edges (repair edges may exceed it).
    pub max_degree: Option<usize>,
}

/// Random k-edge-connected multigraph: the union of ⌈k/2⌉ random spanning trees,
/// each closed into a Hamiltonian cycle, plus random edges; then verified, with any
/// deficient cut repaired by a random crossing edge until the check passes.
pub fn random_k_edge_connected(params: KConnectedParams, seed: u64) -> Result<MultiGraph, GenError> {
    let KConnectedParams { n, k, extra_edges, max_degree } = params;
    if n < 2 || k == 0 {
        return Err(invalid("need n >= 2 and k >= 1"));
    }
    if let Some(d) = max_degree {
        if d < k {
            return Err(invalid("max degree below k"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = MultiGraph::with_vertices(n as u32);
    let rounds = k.div_ceil(2);
    for round in 0..rounds {
        // odd k: the last round is a bare spanning tree, repaired below if needed
        let close = !(k % 2 == 1 && round + 1 == rounds) || n == 2;
        let mut order: Vec<u32> = (0..n as u32).collect();
        order.shuffle(&mut rng);
        for w in order.windows(2) {
            g.add_edge(VertexId(w[0]), VertexId(w[1])).expect("distinct");
        }
        if close && n > 2 {
            g.add_edge(VertexId(order[n - 1]), VertexId(order[0])).expect("distinct");
        } else if close {
            g.add_edge(VertexId(0), VertexId(1)).expect("distinct");
        }
    }
    let cap = max_degree.unwrap_or(usize::MAX);
    let mut attempts = 0;
    let mut added = 0;
    while added < extra_edges && attempts < 50 * (extra_edges + 1) {
        attempts += 1;
        let u = VertexId(rng.gen_range(0..n as u32));
        let v = VertexId(rng.gen_range(0..n as u32));
        if u == v || g.degree(u) >= cap || g.degree(v) >= cap {
            continue;
        }
        g.add_edge(u, v).expect("distinct");
        added += 1;
    }
    while let Some(cut) = edge_connectivity_violation(&g, k) {
        let inside: Vec<VertexId> = cut.side.iter().copied().collect();
        let outside: Vec<VertexId> = g.vertices().filter(|v| !cut.side.contains(v)).collect();
        let pick = |vs: &[VertexId], rng: &mut ChaCha8Rng| {
            let low: Vec<VertexId> = vs.iter().copied().filter(|&v| g.degree(v) < cap).collect();
            if low.is_empty() {
                vs[rng.gen_range(0..vs.len())]
            } else {
                low[rng.gen_range(0..low.len())]
            }
        };
        let u = pick(&inside, &mut rng);
        let v = pick(&outside, &mut rng);
        g.add_edge(u, v).expect("distinct sides");
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connectivity::is_k_edge_connected;

    #[test]
    fn j7_counts() {
        let g = grid(7).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (49, 84));
    }

    #[test]
    fn c25_counts_and_connectivity() {
        let g = cycle_multi(2, 5).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (5, 10));
        assert!(is_k_edge_connected(&g, 4));
        assert!(!is_k_edge_connected(&g, 5));
    }

    #[test]
    fn same_seed_same_graph() {
        let p = KConnectedParams { n: 20, k: 5, extra_edges: 10, max_degree: Some(10) };
        let a = serde_json::to_string(&random_k_edge_connected(p, 9).unwrap()).unwrap();
        let b = serde_json::to_string(&random_k_edge_connected(p, 9).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn random_family_is_k_connected() {
        for seed in 0..10 {
            for k in [3, 4, 5] {
                let p = KConnectedParams { n: 15, k, extra_edges: 5, max_degree: Some(10) };
                assert!(is_k_edge_connected(&random_k_edge_connected(p, seed).unwrap(), k));
            }
        }
    }

    #[test]
    fn caterpillar_shape() {
        let d = caterpillar_of_cliques(4, 6, 2, 1).unwrap();
        assert_eq!(d.tree_edges.len() + 1, d.bags.len());
        let covered: BTreeSet<VertexId> = d.bags.iter().flatten().copied().collect();
        assert_eq!(&covered, d.graph.vertex_set());
    }

    #[test]
    fn bad_params() {
        assert!(cycle_multi(0, 3).is_err());
        assert!(grid(0).is_err());
        assert!(caterpillar_of_cliques(3, 3, 2, 0).is_err());
    }
}
