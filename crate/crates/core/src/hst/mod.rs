//! Hierarchically separated tree (HST) embeddings of a terminal set.
//!
//! Node levels follow the edge lengths: a node at level `ℓ` hangs below its
//! parent by an edge of length `2^ℓ`. That edge is a *level-(ℓ+1) edge* and
//! the terminals below it form a level-(ℓ+1) cut, whose metric diameter must
//! be below `2^(ℓ+1)`. Sampled trees put terminals at level 0, so leaf edges
//! have length 1 and the level-0 cuts are the terminal singletons.

mod frt;
mod validate;

pub use frt::sample_frt;
pub use validate::{validate_hst, HstViolation};

use crate::error::HstError;
use crate::metric::pow2;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HstNode {
    pub id: usize,
    pub level: i32,
    pub parent: Option<usize>,
    /// Length of the edge to the parent (0 for the root).
    pub edge_len: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct HstJson {
    levels: i32,
    nodes: Vec<HstNode>,
    leaf_map: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hst {
    levels: i32,
    nodes: Vec<HstNode>,
    children: Vec<Vec<usize>>,
    root: usize,
    leaf_map: BTreeMap<usize, usize>,
    point_of: Vec<Option<usize>>,
    depth: Vec<u32>,
    /// Distance from the root.
    height: Vec<f64>,
    /// DFS interval `[tin, tout)`; leaf `x` lies below `v` iff `tin[x]` is in it.
    tin: Vec<usize>,
    tout: Vec<usize>,
    /// Terminals in DFS order, so `leaves[tin[v]..tout[v]]` lists those below `v`.
    dfs_leaves: Vec<usize>,
    leaf_rank: Vec<usize>,
}

impl Hst {
    /// Builds a tree from explicit nodes. `leaf_map` maps each terminal
    /// point to its node; it must be a bijection onto the childless nodes.
    pub fn from_nodes(
        levels: i32,
        nodes: Vec<HstNode>,
        leaf_map: BTreeMap<usize, usize>,
    ) -> Result<Self, HstError> {
        let n = nodes.len();
        if n == 0 {
            return Err(HstError::EmptyTerminalSet);
        }
        let mut children = vec![Vec::new(); n];
        let mut root = None;
        for (i, node) in nodes.iter().enumerate() {
            if node.id != i {
                return Err(HstError::Malformed(format!("node {i} has id {}", node.id)));
            }
            match node.parent {
                None if root.is_some() => {
                    return Err(HstError::Malformed("more than one root".into()))
                }
                None => root = Some(i),
                Some(p) if p >= n || p == i => {
                    return Err(HstError::Malformed(format!("node {i} has bad parent {p}")))
                }
                Some(p) => children[p].push(i),
            }
            if !(node.edge_len.is_finite() && node.edge_len >= 0.0) {
                return Err(HstError::Malformed(format!("node {i} has bad edge length")));
            }
        }
        let root = root.ok_or_else(|| HstError::Malformed("no root".into()))?;
        let mut point_of = vec![None; n];
        for (&p, &v) in &leaf_map {
            if v >= n || !children[v].is_empty() || point_of[v].is_some() {
                return Err(HstError::Malformed(format!("terminal {p} maps to non-leaf node {v}")));
            }
            point_of[v] = Some(p);
        }
        if let Some(v) = (0..n).find(|&v| children[v].is_empty() && point_of[v].is_none()) {
            return Err(HstError::Malformed(format!("leaf node {v} carries no terminal")));
        }

        let mut depth = vec![0u32; n];
        let mut height = vec![0.0; n];
        let mut tin = vec![0; n];
        let mut tout = vec![0; n];
        let mut dfs_leaves = Vec::with_capacity(leaf_map.len());
        let mut seen = 0usize;
        // Iterative DFS; children are visited in stored order.
        let mut stack = vec![(root, 0usize)];
        while let Some(top) = stack.len().checked_sub(1) {
            let (v, next) = stack[top];
            if next == 0 {
                seen += 1;
                tin[v] = dfs_leaves.len();
                if let Some(p) = point_of[v] {
                    dfs_leaves.push(p);
                }
            }
            if next < children[v].len() {
                stack[top].1 += 1;
                let c = children[v][next];
                depth[c] = depth[v] + 1;
                height[c] = height[v] + nodes[c].edge_len;
                stack.push((c, 0));
            } else {
                tout[v] = dfs_leaves.len();
                stack.pop();
            }
        }
        if seen != n {
            return Err(HstError::Malformed("nodes unreachable from the root".into()));
        }
        let mut leaf_rank = vec![usize::MAX; n];
        for v in 0..n {
            if point_of[v].is_some() {
                leaf_rank[v] = tin[v];
            }
        }
        Ok(Self {
            levels,
            nodes,
            children,
            root,
            leaf_map,
            point_of,
            depth,
            height,
            tin,
            tout,
            dfs_leaves,
            leaf_rank,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, HstError> {
        let raw: HstJson =
            serde_json::from_str(text).map_err(|e| HstError::Malformed(e.to_string()))?;
        Self::from_nodes(raw.levels, raw.nodes, raw.leaf_map)
    }

    pub fn to_json(&self) -> String {
        let raw = HstJson {
            levels: self.levels,
            nodes: self.nodes.clone(),
            leaf_map: self.leaf_map.clone(),
        };
        serde_json::to_string(&raw).expect("tree serializes")
    }

    /// Level of the root node.
    pub fn levels(&self) -> i32 {
        self.levels
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn nodes(&self) -> &[HstNode] {
        &self.nodes
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Terminal points, ascending.
    pub fn terminals(&self) -> Vec<usize> {
        self.leaf_map.keys().copied().collect()
    }

    pub fn terminal_count(&self) -> usize {
        self.leaf_map.len()
    }

    pub fn contains(&self, point: usize) -> bool {
        self.leaf_map.contains_key(&point)
    }

    pub fn node_of(&self, point: usize) -> Result<usize, HstError> {
        self.leaf_map.get(&point).copied().ok_or(HstError::UnknownLeaf(point))
    }

    pub fn point_of(&self, v: usize) -> Option<usize> {
        self.point_of[v]
    }

    /// Terminals in the subtree of `v` (the cut `C_e` of the edge above `v`).
    pub fn leaves_under(&self, v: usize) -> &[usize] {
        &self.dfs_leaves[self.tin[v]..self.tout[v]]
    }

    /// Whether terminal `point` lies below node `v`.
    pub fn is_below(&self, point: usize, v: usize) -> bool {
        match self.leaf_map.get(&point) {
            Some(&x) => {
                let r = self.leaf_rank[x];
                self.tin[v] <= r && r < self.tout[v]
            }
            None => false,
        }
    }

    /// Non-root nodes, each standing for the edge to its parent.
    pub fn edges(&self) -> impl Iterator<Item = &HstNode> {
        self.nodes.iter().filter(|n| n.parent.is_some())
    }

    /// Level of the edge above `v` (`len = 2^(level-1)`), if its length is a power of two.
    pub fn edge_level(&self, v: usize) -> Option<i32> {
        let len = self.nodes[v].edge_len;
        if self.nodes[v].parent.is_none() || !(len > 0.0) {
            return None;
        }
        let e = len.log2().round() as i32;
        (pow2(e) == len).then_some(e + 1)
    }

    pub fn total_length(&self) -> f64 {
        self.edges().map(|n| n.edge_len).sum()
    }

    /// Whether singleton chains hang below the original leaves.
    pub fn is_extended(&self) -> bool {
        self.edges().any(|n| n.edge_len < 1.0)
    }

    /// Range of levels accepted by [`Hst::cuts_at_level`].
    pub fn level_range(&self) -> (i32, i32) {
        let mut lo = 0;
        let mut hi = 0;
        for v in self.edges().map(|n| n.id) {
            if let Some(l) = self.edge_level(v) {
                lo = lo.min(l);
                hi = hi.max(l);
            }
        }
        (lo, hi)
    }

    pub fn tree_distance(&self, u: usize, v: usize) -> Result<f64, HstError> {
        let (mut a, mut b) = (self.node_of(u)?, self.node_of(v)?);
        let (ha, hb) = (self.height[a], self.height[b]);
        while self.depth[a] > self.depth[b] {
            a = self.nodes[a].parent.expect("deeper node has a parent");
        }
        while self.depth[b] > self.depth[a] {
            b = self.nodes[b].parent.expect("deeper node has a parent");
        }
        while a != b {
            a = self.nodes[a].parent.expect("distinct nodes below a common root");
            b = self.nodes[b].parent.expect("distinct nodes below a common root");
        }
        Ok(ha + hb - 2.0 * self.height[a])
    }

    /// The level-`j` cuts: each terminal is grouped under the highest edge
    /// on its root path whose length is at most `2^(j-1)`. A terminal with
    /// no such edge forms a singleton (so level 0 of an unextended tree is
    /// all singletons). Cuts are listed in order of their smallest terminal.
    pub fn cuts_at_level(&self, j: i32) -> Result<Vec<Vec<usize>>, HstError> {
        let (lo, hi) = self.level_range();
        if j < lo || j > hi {
            return Err(HstError::LevelOutOfRange { level: j, min: lo, max: hi });
        }
        let mut cuts: Vec<Vec<usize>> = self
            .cut_nodes_at_level(j)
            .into_iter()
            .map(|(_, mut cut)| {
                cut.sort_unstable();
                cut
            })
            .collect();
        cuts.sort();
        Ok(cuts)
    }

    /// Every `(node, cut)` pair at level `j`, including implicit singletons
    /// (reported with node `None`).
    pub fn cut_nodes_at_level(&self, j: i32) -> Vec<(Option<usize>, Vec<usize>)> {
        let limit = pow2(j - 1);
        let mut seen = vec![false; self.nodes.len()];
        let mut out = Vec::new();
        for (&p, &leaf) in &self.leaf_map {
            let mut top = None;
            let mut v = leaf;
            while let Some(parent) = self.nodes[v].parent {
                if self.nodes[v].edge_len <= limit {
                    top = Some(v);
                    v = parent;
                } else {
                    break;
                }
            }
            match top {
                Some(v) if !seen[v] => {
                    seen[v] = true;
                    out.push((Some(v), self.leaves_under(v).to_vec()));
                }
                Some(_) => {}
                None => out.push((None, vec![p])),
            }
        }
        out
    }

    /// Appends below every terminal a chain of singleton nodes whose edge
    /// lengths keep halving, so that levels down to `down_to` carry edges.
    ///
    /// With `down_to = -2`, a terminal at node level 0 gains edges of
    /// length 1/2, 1/4 and 1/8 (levels 0, −1, −2).
    pub fn extend_singleton_levels(&self, down_to: i32) -> Result<Hst, HstError> {
        if !(down_to == -1 || down_to == -2) {
            return Err(HstError::BadExtensionDepth(down_to));
        }
        if self.is_extended() {
            return Err(HstError::AlreadyExtended);
        }
        let mut nodes = self.nodes.clone();
        let mut leaf_map = BTreeMap::new();
        for (&p, &leaf) in &self.leaf_map {
            let mut bottom = leaf;
            let mut level = nodes[leaf].level - 1;
            while level >= down_to - 1 {
                let id = nodes.len();
                nodes.push(HstNode { id, level, parent: Some(bottom), edge_len: pow2(level) });
                bottom = id;
                level -= 1;
            }
            leaf_map.insert(p, bottom);
        }
        Hst::from_nodes(self.levels, nodes, leaf_map)
    }
}
