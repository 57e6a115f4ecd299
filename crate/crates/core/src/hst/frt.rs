use super::{Hst, HstNode};
use crate::error::HstError;
use crate::metric::{class_of, pow2, MetricSpace};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Samples an HST over `terminals` with the Fakcharoenphol–Rao–Talwar
/// random hierarchical decomposition.
///
/// A scale `β = 2^U` with `U ~ Uniform[0, 1)` and a uniformly random
/// permutation of the terminals are drawn from `seed`. Going down from the
/// root, the cluster at node level `m` is split by sending each member to
/// the first terminal in permutation order within distance `β·2^(m-1) - 1`.
/// Those balls have diameter at most `β·2^m - 2 < 2^(m+1) - 2`, which is
/// exactly the tree distance between two leaves whose lowest common
/// ancestor sits at level `m`, so the tree dominates the metric.
/// Terminals become individual leaves at level 0, including coincident ones.
pub fn sample_frt(m: &MetricSpace, terminals: &[usize], seed: u64) -> Result<Hst, HstError> {
    let mut pts: Vec<usize> = terminals.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if pts.is_empty() {
        return Err(HstError::EmptyTerminalSet);
    }
    if let Some(&bad) = pts.iter().find(|&&p| p >= m.n()) {
        return Err(HstError::UnknownLeaf(bad));
    }
    if pts.len() == 1 {
        let nodes = vec![HstNode { id: 0, level: 0, parent: None, edge_len: 0.0 }];
        return Hst::from_nodes(0, nodes, BTreeMap::from([(pts[0], 0)]));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let beta = 2f64.powf(rng.gen::<f64>());
    let mut perm = pts.clone();
    perm.shuffle(&mut rng);

    let top = class_of(m.diameter_of(&pts)).map_or(1, |c| (c + 1).max(1));
    let mut nodes = vec![HstNode { id: 0, level: top, parent: None, edge_len: 0.0 }];
    let mut frontier: Vec<(usize, Vec<usize>)> = vec![(0, pts.clone())];
    for level in (1..top).rev() {
        let radius = beta * pow2(level - 1) - 1.0;
        let mut next = Vec::new();
        for (parent, members) in frontier {
            // Group by the rank of the assigned center; BTreeMap keeps the
            // child order deterministic.
            let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for &u in &members {
                let rank = perm
                    .iter()
                    .position(|&w| m.d(u, w) <= radius)
                    .expect("every terminal is within radius of itself");
                groups.entry(rank).or_default().push(u);
            }
            for (_, group) in groups {
                let id = nodes.len();
                nodes.push(HstNode { id, level, parent: Some(parent), edge_len: pow2(level) });
                next.push((id, group));
            }
        }
        frontier = next;
    }
    let mut leaf_map = BTreeMap::new();
    for (parent, members) in frontier {
        for u in members {
            let id = nodes.len();
            nodes.push(HstNode { id, level: 0, parent: Some(parent), edge_len: 1.0 });
            leaf_map.insert(u, id);
        }
    }
    Hst::from_nodes(top, nodes, leaf_map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hst::validate_hst;

    fn line(xs: &[f64]) -> MetricSpace {
        let pts: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        MetricSpace::from_points(&pts).unwrap()
    }

    #[test]
    fn two_unit_terminals_give_the_minimal_tree() {
        let m = line(&[0.0, 1.0]);
        for seed in 0..20 {
            let t = sample_frt(&m, &[0, 1], seed).unwrap();
            assert_eq!(t.levels(), 1);
            assert_eq!(t.edges().count(), 2);
            assert_eq!(t.tree_distance(0, 1).unwrap(), 2.0);
        }
    }

    #[test]
    fn single_terminal_is_the_root() {
        let m = line(&[0.0, 1.0]);
        let t = sample_frt(&m, &[1], 3).unwrap();
        assert_eq!(t.node_count(), 1);
        assert_eq!(t.total_length(), 0.0);
    }

    #[test]
    fn empty_terminal_set_is_an_error() {
        let m = line(&[0.0, 1.0]);
        assert_eq!(sample_frt(&m, &[], 0), Err(HstError::EmptyTerminalSet));
    }

    #[test]
    fn four_on_a_line_are_valid() {
        let m = line(&[0.0, 1.0, 2.0, 3.0]);
        for seed in 0..50 {
            let t = sample_frt(&m, &[0, 1, 2, 3], seed).unwrap();
            assert!(validate_hst(&t, &m).is_empty(), "seed {seed}");
        }
    }

    #[test]
    fn exact_power_of_two_diameter_gets_an_extra_level() {
        let m = line(&[0.0, 1.0, 4.0]);
        let t = sample_frt(&m, &[0, 1, 2], 1).unwrap();
        assert_eq!(t.levels(), 3);
    }

    #[test]
    fn deterministic_per_seed() {
        let m = line(&[0.0, 1.0, 2.5, 7.0, 7.5]);
        let a = sample_frt(&m, &[0, 1, 2, 3, 4], 42).unwrap();
        let b = sample_frt(&m, &[4, 3, 2, 1, 0], 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn coincident_terminals_are_sibling_leaves() {
        let m = line(&[0.0, 0.0, 1.0]);
        let t = sample_frt(&m, &[0, 1, 2], 5).unwrap();
        assert_eq!(t.tree_distance(0, 1).unwrap(), 2.0);
        assert!(validate_hst(&t, &m).is_empty());
    }
}
