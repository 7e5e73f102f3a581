//! Integer-capacity residual networks with shortest augmenting paths.

use std::collections::VecDeque;

#[derive(Clone, Debug)]
pub(crate) struct Residual {
    head: Vec<usize>,
    cap: Vec<i64>,
    adj: Vec<Vec<usize>>,
}

impl Residual {
    pub fn new(n: usize) -> Self {
        Residual { head: Vec::new(), cap: Vec::new(), adj: vec![Vec::new(); n] }
    }

    /// Add the arc pair `u→v` (capacity `forward`) and `v→u` (capacity `backward`).
    /// Returns the index of the forward arc; its partner is `index ^ 1`.
    pub fn add(&mut self, u: usize, v: usize, forward: i64, backward: i64) -> usize {
        let a = self.head.len();
        self.head.push(v);
        self.cap.push(forward);
        self.adj[u].push(a);
        self.head.push(u);
        self.cap.push(backward);
        self.adj[v].push(a + 1);
        a
    }

    pub fn residual(&self, arc: usize) -> i64 {
        self.cap[arc]
    }

    pub fn head(&self, arc: usize) -> usize {
        self.head[arc]
    }

    /// Push flow from `sources` to `sinks` until no augmenting path remains or
    /// `limit` units have been sent. Sinks are never expanded.
    pub fn augment(&mut self, sources: &[bool], sinks: &[bool], limit: i64) -> i64 {
        let n = self.adj.len();
        let mut total = 0;
        let mut pred = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        while total < limit {
            seen.iter_mut().for_each(|s| *s = false);
            let mut queue = VecDeque::new();
            for x in 0..n {
                if sources[x] {
                    seen[x] = true;
                    queue.push_back(x);
                }
            }
            let mut hit = None;
            'bfs: while let Some(x) = queue.pop_front() {
                for &a in &self.adj[x] {
                    if self.cap[a] <= 0 {
                        continue;
                    }
                    let y = self.head[a];
                    if seen[y] {
                        continue;
                    }
                    seen[y] = true;
                    pred[y] = a;
                    if sinks[y] {
                        hit = Some(y);
                        break 'bfs;
                    }
                    queue.push_back(y);
                }
            }
            let Some(end) = hit else { break };
            let mut bottleneck = limit - total;
            let mut cur = end;
            while !sources[cur] {
                let a = pred[cur];
                bottleneck = bottleneck.min(self.cap[a]);
                cur = self.head[a ^ 1];
            }
            let mut cur = end;
            while !sources[cur] {
                let a = pred[cur];
                self.cap[a] -= bottleneck;
                self.cap[a ^ 1] += bottleneck;
                cur = self.head[a ^ 1];
            }
            total += bottleneck;
        }
        total
    }

    /// Nodes reachable from `sources` in the residual network.
    pub fn reachable(&self, sources: &[bool]) -> Vec<bool> {
        let n = self.adj.len();
        let mut seen = sources.to_vec();
        let mut queue: VecDeque<usize> = (0..n).filter(|&x| sources[x]).collect();
        while let Some(x) = queue.pop_front() {
            for &a in &self.adj[x] {
                if self.cap[a] > 0 && !seen[self.head[a]] {
                    seen[self.head[a]] = true;
                    queue.push_back(self.head[a]);
                }
            }
        }
        seen
    }
}
