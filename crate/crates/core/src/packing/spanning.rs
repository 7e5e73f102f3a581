//! Edge-disjoint spanning trees by matroid union.
//!
//! The s forests grow by augmenting sequences. A breadth-first search starts from
//! every edge outside all forests. Scanning edge x against forest F_i either finds
//! that x joins two components of F_i (augment) or labels every edge on the F_i path
//! between the ends of x as a candidate to make room for x. An augmentation inserts
//! the last edge and shifts each labelled predecessor into the forest it displaced.
//! When no augmentation exists, the components of the labelled edges form a
//! partition crossed by fewer than s(|P| − 1) edges.

use std::collections::{BTreeSet, VecDeque};

use super::{verify_packing, PackingError, PartitionWitness, TreePacking};
use crate::graph::{MultiGraph, VertexId};

struct Forests {
    n: usize,
    ends: Vec<(usize, usize)>,
    adj: Vec<Vec<(usize, usize)>>,
    owner: Vec<Option<usize>>,
}

impl Forests {
    /// Edge indices on the path between `a` and `b` in forest `i`, or `None` when
    /// they lie in different components.
    fn path(&self, i: usize, a: usize, b: usize) -> Option<Vec<usize>> {
        let mut pred: Vec<Option<(usize, usize)>> = vec![None; self.n];
        let mut seen = vec![false; self.n];
        seen[a] = true;
        let mut q = VecDeque::from([a]);
        while let Some(x) = q.pop_front() {
            if x == b {
                break;
            }
            for &(e, y) in &self.adj[x] {
                if self.owner[e] == Some(i) && !seen[y] {
                    seen[y] = true;
                    pred[y] = Some((e, x));
                    q.push_back(y);
                }
            }
        }
        if !seen[b] {
            return None;
        }
        let mut out = Vec::new();
        let mut cur = b;
        while let Some((e, p)) = pred[cur] {
            out.push(e);
            cur = p;
        }
        Some(out)
    }
}

/// `s` edge-disjoint spanning trees of `g`, or a partition witnessing that they do not
/// exist.
pub fn pack_spanning_trees(g: &MultiGraph, s: usize) -> Result<TreePacking, PackingError> {
    let verts: Vec<VertexId> = g.vertices().collect();
    let n = verts.len();
    let index = |v: VertexId| verts.binary_search(&v).unwrap();
    let ids: Vec<_> = g.edge_ids().collect();
    let ends: Vec<(usize, usize)> = g.edges().map(|r| (index(r.u), index(r.v))).collect();
    let mut adj = vec![Vec::new(); n];
    for (e, &(a, b)) in ends.iter().enumerate() {
        adj[a].push((e, b));
        adj[b].push((e, a));
    }
    let m = ends.len();
    let mut fs = Forests { n, ends, adj, owner: vec![None; m] };
    let target = n.saturating_sub(1);
    let mut sizes = vec![0usize; s];

    let labelled = loop {
        if sizes.iter().all(|&k| k == target) {
            break None;
        }
        // label[x]: None = unreached, Some(None) = root, Some(Some((z, i))) = x leaves F_i for z
        let mut label: Vec<Option<Option<(usize, usize)>>> = vec![None; m];
        let mut q = VecDeque::new();
        for x in 0..m {
            if fs.owner[x].is_none() {
                label[x] = Some(None);
                q.push_back(x);
            }
        }
        let mut found = None;
        'bfs: while let Some(x) = q.pop_front() {
            let (a, b) = fs.ends[x];
            for i in 0..s {
                if fs.owner[x] == Some(i) {
                    continue;
                }
                match fs.path(i, a, b) {
                    None => {
                        found = Some((x, i));
                        break 'bfs;
                    }
                    Some(path) => {
                        for f in path {
                            if label[f].is_none() {
                                label[f] = Some(Some((x, i)));
                                q.push_back(f);
                            }
                        }
                    }
                }
            }
        }
        let Some((mut x, mut i)) = found else {
            break Some(label);
        };
        loop {
            let prev = fs.owner[x];
            fs.owner[x] = Some(i);
            sizes[i] += 1;
            if let Some(j) = prev {
                sizes[j] -= 1;
            }
            match label[x].expect("on the augmenting sequence") {
                None => break,
                Some((z, j)) => {
                    x = z;
                    i = j;
                }
            }
        }
    };

    if let Some(label) = labelled {
        // components of the labelled edges
        let mut comp: Vec<usize> = (0..n).collect();
        fn find(c: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while c[r] != r {
                r = c[r];
            }
            c[x] = r;
            r
        }
        for (x, l) in label.iter().enumerate() {
            if l.is_some() {
                let (a, b) = fs.ends[x];
                let (ra, rb) = (find(&mut comp, a), find(&mut comp, b));
                comp[ra] = rb;
            }
        }
        let mut classes: std::collections::BTreeMap<usize, BTreeSet<VertexId>> = Default::default();
        for v in 0..n {
            let r = find(&mut comp, v);
            classes.entry(r).or_default().insert(verts[v]);
        }
        let classes: Vec<BTreeSet<VertexId>> = classes.into_values().collect();
        let roots: Vec<usize> = (0..n).map(|v| find(&mut comp, v)).collect();
        let crossing = fs.ends.iter().filter(|&&(a, b)| roots[a] != roots[b]).count();
        let required = s * (classes.len() - 1);
        let witness = PartitionWitness { classes, crossing, required };
        if crossing >= required {
            return Err(PackingError::Internal(format!("stuck packing without a deficient partition ({witness})")));
        }
        return Err(PackingError::Infeasible { wanted: s, witness });
    }

    let mut trees = vec![BTreeSet::new(); s];
    for (x, o) in fs.owner.iter().enumerate() {
        if let Some(i) = o {
            trees[*i].insert(ids[x]);
        }
    }
    let packing = TreePacking { trees, spanned: verts.into_iter().collect() };
    verify_packing(g, &packing).map_err(PackingError::Internal)?;
    Ok(packing)
}
