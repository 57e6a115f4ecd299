//! Exhaustive counterparts of the tree oracles in [`crate::tree_opt`].
//!
//! Each function enumerates every subset (or multiplicity vector) of tree
//! edges, so they are only usable on trees with a dozen edges or so. They
//! exist to cross-check the closed forms.

use crate::graph::UnionFind;
use crate::hst::{Hst, HstNode};
use crate::metric::pow2;
use rand::Rng;
use std::collections::BTreeMap;

/// Largest edge count accepted by the subset enumerations.
pub const MAX_BRUTE_EDGES: usize = 16;

struct Edges {
    /// `(child node, parent node, length)`.
    list: Vec<(usize, usize, f64)>,
    /// Position of each node's parent edge in `list`.
    slot: Vec<Option<usize>>,
}

fn edges(t: &Hst) -> Edges {
    let list: Vec<(usize, usize, f64)> =
        t.edges().map(|n| (n.id, n.parent.expect("edge"), n.edge_len)).collect();
    assert!(list.len() <= MAX_BRUTE_EDGES, "tree too large for enumeration");
    let mut slot = vec![None; t.node_count()];
    for (i, &(c, _, _)) in list.iter().enumerate() {
        slot[c] = Some(i);
    }
    Edges { list, slot }
}

/// Bitmask of the edges between a leaf and the tree root.
fn root_path(t: &Hst, e: &Edges, point: usize) -> u32 {
    let mut v = t.node_of(point).expect("terminal is a leaf");
    let mut mask = 0;
    while let Some(i) = e.slot[v] {
        mask |= 1 << i;
        v = e.list[i].1;
    }
    mask
}

fn path(t: &Hst, e: &Edges, a: usize, b: usize) -> u32 {
    root_path(t, e, a) ^ root_path(t, e, b)
}

fn length(e: &Edges, mask: u32) -> f64 {
    e.list.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, x)| x.2).sum()
}

fn components(t: &Hst, e: &Edges, mask: u32) -> UnionFind {
    let mut uf = UnionFind::new(t.node_count());
    for (i, &(c, p, _)) in e.list.iter().enumerate() {
        if mask >> i & 1 == 1 {
            uf.union(c, p);
        }
    }
    uf
}

fn min_over_subsets(t: &Hst, mut cost: impl FnMut(&Edges, u32, &mut UnionFind) -> Option<f64>) -> f64 {
    let e = edges(t);
    let mut best = f64::INFINITY;
    for mask in 0..1u32 << e.list.len() {
        let mut uf = components(t, &e, mask);
        if let Some(c) = cost(&e, mask, &mut uf) {
            best = best.min(c);
        }
    }
    best
}

/// Cheapest edge set connecting all leaves.
pub fn brute_steiner_tree(t: &Hst) -> f64 {
    let leaves: Vec<usize> = t.terminals().iter().map(|&p| t.node_of(p).expect("leaf")).collect();
    min_over_subsets(t, |e, mask, uf| {
        leaves.iter().all(|&x| uf.find(x) == uf.find(leaves[0])).then(|| length(e, mask))
    })
}

pub fn brute_steiner_forest(t: &Hst, pairs: &[(usize, usize)]) -> f64 {
    let pairs: Vec<(usize, usize)> =
        pairs.iter().map(|&(a, b)| (t.node_of(a).expect("leaf"), t.node_of(b).expect("leaf"))).collect();
    min_over_subsets(t, |e, mask, uf| {
        pairs.iter().all(|&(a, b)| uf.find(a) == uf.find(b)).then(|| length(e, mask))
    })
}

/// Enumerates edge multiplicities in `0..=max R`. On a tree the number of
/// edge-disjoint paths between two leaves is the smallest multiplicity on
/// their path.
pub fn brute_steiner_network(t: &Hst, reqs: &[(usize, usize, u32)]) -> f64 {
    let e = edges(t);
    let top = reqs.iter().map(|r| r.2).max().unwrap_or(0) as usize;
    let paths: Vec<(u32, u32)> = reqs.iter().map(|&(a, b, r)| (path(t, &e, a, b), r)).collect();
    let k = e.list.len();
    let mut mult = vec![0usize; k];
    let mut best = f64::INFINITY;
    loop {
        let ok = paths.iter().all(|&(p, r)| {
            (0..k).filter(|i| p >> i & 1 == 1).all(|i| mult[i] as u32 >= r)
        });
        if ok {
            let c: f64 = (0..k).map(|i| mult[i] as f64 * e.list[i].2).sum();
            best = best.min(c);
        }
        let Some(i) = (0..k).find(|&i| mult[i] < top) else { break };
        mult[i] += 1;
        mult[..i].iter_mut().for_each(|x| *x = 0);
    }
    best
}

/// Buys an edge subset once at `m` times its length; every pair rents the
/// rest of its path.
pub fn brute_rob_multi(t: &Hst, pairs: &[(usize, usize)], m: f64) -> f64 {
    let e0 = edges(t);
    let paths: Vec<u32> = pairs.iter().map(|&(a, b)| path(t, &e0, a, b)).collect();
    min_over_subsets(t, |e, mask, _| {
        let bought = if mask == 0 { 0.0 } else { m * length(e, mask) };
        Some(bought + paths.iter().map(|&p| length(e, p & !mask)).sum::<f64>())
    })
}

/// Single-source version: each terminal uses the edges between its leaf
/// and the tree root that do not also lie above `r`.
pub fn brute_rob_single(t: &Hst, r: usize, terminals: &[usize], m: f64) -> f64 {
    let e0 = edges(t);
    let above_r = root_path(t, &e0, r);
    let paths: Vec<u32> = terminals.iter().map(|&p| root_path(t, &e0, p) & !above_r).collect();
    min_over_subsets(t, |e, mask, _| {
        if mask & above_r != 0 {
            return None;
        }
        let bought = if mask == 0 { 0.0 } else { m * length(e, mask) };
        Some(bought + paths.iter().map(|&p| length(e, p & !mask)).sum::<f64>())
    })
}

/// Buys an edge subset; terminals outside the component of `r` pay their
/// penalties.
pub fn brute_pcst(t: &Hst, r: usize, terminals: &[(usize, f64)]) -> f64 {
    let root = t.node_of(r).expect("root leaf");
    let terms: Vec<(usize, f64)> = terminals.iter().map(|&(p, pi)| (t.node_of(p).expect("leaf"), pi)).collect();
    min_over_subsets(t, |e, mask, uf| {
        let missed: f64 = terms.iter().filter(|&&(x, _)| uf.find(x) != uf.find(root)).map(|x| x.1).sum();
        Some(length(e, mask) + missed)
    })
}

/// A random rooted tree with at most `max_internal` internal nodes and
/// `max_leaves` leaves (more if needed so every internal node has a child),
/// edge lengths `2^e` for `e` in `-3..=3`, terminals drawn from `0..32`.
pub fn random_tree<R: Rng>(rng: &mut R, max_internal: usize, max_leaves: usize) -> Hst {
    let internal = rng.gen_range(1..=max_internal.max(1));
    let mut nodes = vec![HstNode { id: 0, level: 4, parent: None, edge_len: 0.0 }];
    let mut has_child = vec![false; internal];
    let push = |nodes: &mut Vec<HstNode>, parent: usize, rng: &mut R| {
        let e = rng.gen_range(-3..=3);
        let id = nodes.len();
        nodes.push(HstNode { id, level: e, parent: Some(parent), edge_len: pow2(e) });
    };
    for v in 1..internal {
        let p = rng.gen_range(0..v);
        has_child[p] = true;
        push(&mut nodes, p, rng);
    }
    let mut parents: Vec<usize> = (0..internal).filter(|&v| !has_child[v]).collect();
    let want = rng.gen_range(1..=max_leaves.max(1));
    while parents.len() < want {
        parents.push(rng.gen_range(0..internal));
    }
    let mut points: Vec<usize> = (0..32).collect();
    let mut leaf_map = BTreeMap::new();
    for p in parents {
        let point = points.swap_remove(rng.gen_range(0..points.len()));
        leaf_map.insert(point, nodes.len());
        push(&mut nodes, p, rng);
    }
    Hst::from_nodes(4, nodes, leaf_map).expect("well-formed random tree")
}
