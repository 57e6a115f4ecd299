//! Exact optimal values of each problem restated on an HST.
//!
//! On a tree every request has a unique path, so each edge can be priced
//! independently of the others (except for prize-collecting, which needs a
//! small dynamic program).

use crate::error::HstError;
use crate::hst::Hst;

fn check_leaves(t: &Hst, points: impl IntoIterator<Item = usize>) -> Result<(), HstError> {
    for p in points {
        t.node_of(p)?;
    }
    Ok(())
}

fn separates(t: &Hst, v: usize, s: usize, u: usize) -> bool {
    t.is_below(s, v) != t.is_below(u, v)
}

/// Every leaf is a terminal, so every edge separating two leaves must be
/// bought. That is the whole tree unless the root has a single child.
pub fn opt_tree_steiner_tree(t: &Hst) -> f64 {
    let k = t.terminal_count();
    t.edges().filter(|e| t.leaves_under(e.id).len() < k).map(|e| e.edge_len).sum()
}

pub fn opt_tree_steiner_forest(t: &Hst, pairs: &[(usize, usize)]) -> Result<f64, HstError> {
    check_leaves(t, pairs.iter().flat_map(|&(s, u)| [s, u]))?;
    Ok(t.edges()
        .filter(|e| pairs.iter().any(|&(s, u)| separates(t, e.id, s, u)))
        .map(|e| e.edge_len)
        .sum())
}

/// Each edge is bought as many times as the largest requirement it separates.
pub fn opt_tree_steiner_network(t: &Hst, reqs: &[(usize, usize, u32)]) -> Result<f64, HstError> {
    check_leaves(t, reqs.iter().flat_map(|&(s, u, _)| [s, u]))?;
    Ok(t.edges()
        .map(|e| {
            let r = reqs
                .iter()
                .filter(|&&(s, u, _)| separates(t, e.id, s, u))
                .map(|&(_, _, r)| r)
                .max()
                .unwrap_or(0);
            e.edge_len * r as f64
        })
        .sum())
}

/// Each edge is either rented by every pair it separates or bought once.
/// `m = f64::INFINITY` forbids buying.
pub fn opt_tree_rob_multi(t: &Hst, pairs: &[(usize, usize)], m: f64) -> Result<f64, HstError> {
    check_leaves(t, pairs.iter().flat_map(|&(s, u)| [s, u]))?;
    Ok(t.edges()
        .map(|e| {
            let crossing = pairs.iter().filter(|&&(s, u)| separates(t, e.id, s, u)).count();
            if crossing == 0 {
                0.0
            } else {
                e.edge_len * m.min(crossing as f64)
            }
        })
        .sum())
}

/// Single-source rent-or-buy towards leaf `r`. `terminals` lists request
/// occurrences, so a point requested twice counts twice.
pub fn opt_tree_rob_single(t: &Hst, r: usize, terminals: &[usize], m: f64) -> Result<f64, HstError> {
    if !t.contains(r) {
        return Err(HstError::RootNotLeaf(r));
    }
    check_leaves(t, terminals.iter().copied())?;
    Ok(t.edges()
        .filter(|e| !t.is_below(r, e.id))
        .map(|e| {
            let demand = terminals.iter().filter(|&&p| t.is_below(p, e.id)).count();
            if demand == 0 {
                0.0
            } else {
                e.edge_len * m.min(demand as f64)
            }
        })
        .sum())
}

/// Prize-collecting Steiner tree rooted at leaf `r`, by dynamic programming
/// on the tree re-rooted at `r`: a subtree hanging off edge `e` either pays
/// all penalties inside it or buys `e` and recurses into its children.
pub fn opt_tree_pcst(t: &Hst, r: usize, terminals: &[(usize, f64)]) -> Result<f64, HstError> {
    let root = t.node_of(r).map_err(|_| HstError::RootNotLeaf(r))?;
    check_leaves(t, terminals.iter().map(|&(p, _)| p))?;
    let n = t.node_count();
    let mut pen = vec![0.0; n];
    for &(p, pi) in terminals {
        if p != r {
            pen[t.node_of(p)?] += pi;
        }
    }
    // Undirected adjacency; the weight of {v, parent(v)} is edge_len(v).
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for node in t.edges() {
        let p = node.parent.expect("edge");
        adj[node.id].push((p, node.edge_len));
        adj[p].push((node.id, node.edge_len));
    }
    // Pre-order from the new root, then fold in reverse.
    let mut order = Vec::with_capacity(n);
    let mut up = vec![(usize::MAX, 0.0); n];
    let mut stack = vec![root];
    let mut visited = vec![false; n];
    visited[root] = true;
    while let Some(v) = stack.pop() {
        order.push(v);
        for &(w, len) in &adj[v] {
            if !visited[w] {
                visited[w] = true;
                up[w] = (v, len);
                stack.push(w);
            }
        }
    }
    let mut below = pen;
    let mut inner = vec![0.0; n];
    let mut h = vec![0.0; n];
    for &v in order.iter().rev() {
        if v == root {
            continue;
        }
        h[v] = below[v].min(up[v].1 + inner[v]);
        let p = up[v].0;
        below[p] += below[v];
        inner[p] += h[v];
    }
    Ok(inner[root])
}
