//! Small graph utilities: union-find, minimum spanning trees and max-flow
//! over undirected multigraphs.

use crate::metric::MetricSpace;
use std::collections::VecDeque;

#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), rank: vec![0; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns `false` if `a` and `b` were already connected.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }

    pub fn connected(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }
}

/// Prim's algorithm on the metric restricted to `points`.
pub fn mst_cost(m: &MetricSpace, points: &[usize]) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    let k = points.len();
    let mut in_tree = vec![false; k];
    let mut best = vec![f64::INFINITY; k];
    best[0] = 0.0;
    let mut total = 0.0;
    for _ in 0..k {
        let mut u = usize::MAX;
        for v in 0..k {
            if !in_tree[v] && (u == usize::MAX || best[v] < best[u]) {
                u = v;
            }
        }
        in_tree[u] = true;
        total += best[u];
        for v in 0..k {
            if !in_tree[v] {
                let d = m.d(points[u], points[v]);
                if d < best[v] {
                    best[v] = d;
                }
            }
        }
    }
    total
}

/// Maximum `s`-`t` flow in an undirected multigraph where each edge
/// `(u, v, c)` stands for `c` parallel unit-capacity copies. The search
/// stops early once `limit` units are routed.
pub fn max_flow(n: usize, edges: &[(usize, usize, u64)], s: usize, t: usize, limit: u64) -> u64 {
    if s == t {
        return limit;
    }
    // Residual graph: each undirected edge becomes a pair of arcs that are
    // each other's reverse, both with capacity c.
    let mut head = vec![usize::MAX; n];
    let mut to = Vec::with_capacity(edges.len() * 2);
    let mut cap = Vec::with_capacity(edges.len() * 2);
    let mut next = Vec::with_capacity(edges.len() * 2);
    for &(u, v, c) in edges {
        if u == v || c == 0 {
            continue;
        }
        for (a, b) in [(u, v), (v, u)] {
            to.push(b);
            cap.push(c);
            next.push(head[a]);
            head[a] = to.len() - 1;
        }
    }
    let mut flow = 0;
    let mut level = vec![u32::MAX; n];
    let mut iter = vec![usize::MAX; n];
    while flow < limit {
        level.iter_mut().for_each(|l| *l = u32::MAX);
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            let mut e = head[u];
            while e != usize::MAX {
                if cap[e] > 0 && level[to[e]] == u32::MAX {
                    level[to[e]] = level[u] + 1;
                    queue.push_back(to[e]);
                }
                e = next[e];
            }
        }
        if level[t] == u32::MAX {
            break;
        }
        iter.copy_from_slice(&head);
        loop {
            let pushed = augment(s, t, limit - flow, &level, &mut iter, &to, &mut cap, &next);
            if pushed == 0 {
                break;
            }
            flow += pushed;
            if flow >= limit {
                break;
            }
        }
    }
    flow.min(limit)
}

#[allow(clippy::too_many_arguments)]
fn augment(
    u: usize,
    t: usize,
    want: u64,
    level: &[u32],
    iter: &mut [usize],
    to: &[usize],
    cap: &mut [u64],
    next: &[usize],
) -> u64 {
    if u == t {
        return want;
    }
    while iter[u] != usize::MAX {
        let e = iter[u];
        let v = to[e];
        if cap[e] > 0 && level[v] == level[u] + 1 {
            let got = augment(v, t, want.min(cap[e]), level, iter, to, cap, next);
            if got > 0 {
                cap[e] -= got;
                cap[e ^ 1] += got;
                return got;
            }
        }
        iter[u] = next[e];
    }
    0
}
