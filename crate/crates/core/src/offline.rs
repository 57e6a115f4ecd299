//! Exact offline optima for small instances, by exhaustive search and
//! subset dynamic programming.

use crate::error::OracleError;
use crate::graph::{max_flow, mst_cost};
use crate::metric::MetricSpace;
use crate::request::Facility;
use std::collections::{BTreeMap, BTreeSet};

pub const MAX_DW_TERMINALS: usize = 14;
pub const MAX_SF_ENDPOINTS: usize = 14;
pub const MAX_SROB_POINTS: usize = 15;
pub const MAX_MROB_POINTS: usize = 9;
pub const MAX_PCST_TERMINALS: usize = 12;
pub const MAX_FACILITIES: usize = 12;
pub const MAX_SN_POINTS: usize = 4;
pub const MAX_SN_REQUIREMENT: u32 = 3;

fn distinct(points: impl IntoIterator<Item = usize>) -> Vec<usize> {
    points.into_iter().collect::<BTreeSet<_>>().into_iter().collect()
}

/// Steiner tree costs of every subset of `terminals` (indexed by bit
/// mask over the distinct, sorted terminals), with every point of the
/// metric available as a Steiner vertex.
///
/// Returns the sorted distinct terminals and the table.
pub fn dreyfus_wagner(m: &MetricSpace, terminals: &[usize]) -> Result<(Vec<usize>, Vec<f64>), OracleError> {
    let terms = distinct(terminals.iter().copied());
    let k = terms.len();
    if k > MAX_DW_TERMINALS {
        return Err(OracleError::TooManyTerminals { count: k, cap: MAX_DW_TERMINALS });
    }
    let n = m.n();
    let full = 1usize << k;
    // dp[mask * n + v]: cheapest tree spanning the terminals of `mask` and v.
    let mut dp = vec![f64::INFINITY; full * n];
    for (i, &t) in terms.iter().enumerate() {
        for v in 0..n {
            dp[(1 << i) * n + v] = m.d(t, v);
        }
    }
    let mut merged = vec![0.0; n];
    for mask in 1..full {
        if mask.count_ones() < 2 {
            continue;
        }
        for (v, slot) in merged.iter_mut().enumerate() {
            let mut best = f64::INFINITY;
            // Proper submasks holding the lowest bit, so each split is seen once.
            let low = mask & mask.wrapping_neg();
            let rest = mask ^ low;
            let mut sub = rest;
            loop {
                let a = sub | low;
                if a != mask {
                    let c = dp[a * n + v] + dp[(mask ^ a) * n + v];
                    if c < best {
                        best = c;
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
            *slot = best;
        }
        // In a metric one hop suffices to move the branching point.
        for v in 0..n {
            let mut best = f64::INFINITY;
            for (u, &c) in merged.iter().enumerate() {
                let x = c + m.d(u, v);
                if x < best {
                    best = x;
                }
            }
            dp[mask * n + v] = best;
        }
    }
    let table = (0..full)
        .map(|mask| if mask == 0 { 0.0 } else { (0..n).map(|v| dp[mask * n + v]).fold(f64::INFINITY, f64::min) })
        .collect();
    Ok((terms, table))
}

/// Minimum Steiner tree over `terminals`.
pub fn dreyfus_wagner_st(m: &MetricSpace, terminals: &[usize]) -> Result<f64, OracleError> {
    let (_, table) = dreyfus_wagner(m, terminals)?;
    Ok(*table.last().expect("table has the empty mask"))
}

/// Minimum Steiner forest: the cheapest way to split the endpoints into
/// groups closed under the pairs and connect each group by a Steiner tree.
pub fn exact_sf(m: &MetricSpace, pairs: &[(usize, usize)]) -> Result<f64, OracleError> {
    let pairs: Vec<(usize, usize)> = pairs.iter().copied().filter(|&(s, t)| s != t).collect();
    let ends = distinct(pairs.iter().flat_map(|&(s, t)| [s, t]));
    if ends.len() > MAX_SF_ENDPOINTS {
        return Err(OracleError::TooManyPairs { count: ends.len(), cap: MAX_SF_ENDPOINTS });
    }
    let (terms, st) = dreyfus_wagner(m, &ends)?;
    let bit = |p: usize| 1usize << terms.binary_search(&p).expect("endpoint");
    let pair_masks: Vec<(usize, usize)> = pairs.iter().map(|&(s, t)| (bit(s), bit(t))).collect();
    let closed = |mask: usize| pair_masks.iter().all(|&(a, b)| (mask & a == 0) == (mask & b == 0));
    let full = (1usize << terms.len()) - 1;
    let mut f = vec![f64::INFINITY; full + 1];
    f[0] = 0.0;
    for mask in 1..=full {
        if !closed(mask) {
            continue;
        }
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        let mut sub = rest;
        loop {
            let group = sub | low;
            if closed(group) {
                let c = st[group] + f[mask ^ group];
                if c < f[mask] {
                    f[mask] = c;
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    Ok(f[full])
}

/// `M · length`, where nothing bought costs nothing even for `M = ∞`.
fn scaled(big_m: f64, length: f64) -> f64 {
    if length == 0.0 || big_m == 0.0 {
        0.0
    } else {
        big_m * length
    }
}

/// Single-source rent-or-buy: the bought edges can be taken to form a tree
/// through `r`, so it suffices to try every vertex set containing `r`,
/// buy its minimum spanning tree and rent each terminal to its nearest
/// vertex in the set. `terminals` lists occurrences.
pub fn exact_srob(m: &MetricSpace, r: usize, terminals: &[usize], big_m: f64) -> Result<f64, OracleError> {
    let n = m.n();
    if n > MAX_SROB_POINTS {
        return Err(OracleError::TooManyPoints { count: n, cap: MAX_SROB_POINTS });
    }
    let others: Vec<usize> = (0..n).filter(|&v| v != r).collect();
    let mut best = f64::INFINITY;
    let mut set = Vec::with_capacity(n);
    for mask in 0..(1usize << others.len()) {
        set.clear();
        set.push(r);
        set.extend(others.iter().enumerate().filter(|&(b, _)| mask >> b & 1 == 1).map(|(_, &v)| v));
        let buy = scaled(big_m, mst_cost(m, &set));
        if buy >= best {
            continue;
        }
        let rent: f64 = terminals
            .iter()
            .map(|&i| set.iter().map(|&v| m.d(i, v)).fold(f64::INFINITY, f64::min))
            .sum();
        best = best.min(buy + rent);
    }
    Ok(best)
}

/// Every partition of `0..n` into blocks, as a block label per point.
fn for_each_partition(n: usize, mut f: impl FnMut(&[usize], usize)) {
    fn grow(label: &mut Vec<usize>, blocks: usize, n: usize, f: &mut dyn FnMut(&[usize], usize)) {
        if label.len() == n {
            f(label, blocks);
            return;
        }
        for b in 0..=blocks {
            label.push(b);
            grow(label, blocks.max(b + 1), n, f);
            label.pop();
        }
    }
    grow(&mut Vec::with_capacity(n), 0, n, &mut f);
}

/// Multi-source rent-or-buy: every bought forest is, block by block, no
/// cheaper than the minimum spanning trees of its components' vertex sets,
/// so it suffices to try every partition of the points into blocks, buy
/// each block's spanning tree and rent shortest paths with blocks
/// contracted.
pub fn exact_mrob(m: &MetricSpace, pairs: &[(usize, usize)], big_m: f64) -> Result<f64, OracleError> {
    let n = m.n();
    if n > MAX_MROB_POINTS {
        return Err(OracleError::TooManyPoints { count: n, cap: MAX_MROB_POINTS });
    }
    if pairs.is_empty() {
        return Ok(0.0);
    }
    let mut best = f64::INFINITY;
    let mut dist = vec![0.0; n * n];
    for_each_partition(n, |label, blocks| {
        let length: f64 = (0..blocks)
            .map(|b| mst_cost(m, &(0..n).filter(|&v| label[v] == b).collect::<Vec<_>>()))
            .sum();
        let buy = scaled(big_m, length);
        if buy >= best {
            return;
        }
        for u in 0..n {
            for v in 0..n {
                dist[u * n + v] = if label[u] == label[v] { 0.0 } else { m.d(u, v) };
            }
        }
        for w in 0..n {
            for u in 0..n {
                let duw = dist[u * n + w];
                for v in 0..n {
                    let x = duw + dist[w * n + v];
                    if x < dist[u * n + v] {
                        dist[u * n + v] = x;
                    }
                }
            }
        }
        let rent: f64 = pairs.iter().map(|&(s, t)| dist[s * n + t]).sum();
        best = best.min(buy + rent);
    });
    Ok(best)
}

/// Prize-collecting Steiner tree: over every set of connected terminals,
/// the Steiner tree joining them to `r` plus the penalties of the rest.
pub fn exact_pcst(m: &MetricSpace, r: usize, terminals: &[(usize, f64)]) -> Result<f64, OracleError> {
    let mut penalty: BTreeMap<usize, f64> = BTreeMap::new();
    for &(p, pi) in terminals {
        if p != r {
            *penalty.entry(p).or_insert(0.0) += pi;
        }
    }
    if penalty.len() > MAX_PCST_TERMINALS {
        return Err(OracleError::TooManyTerminals { count: penalty.len(), cap: MAX_PCST_TERMINALS });
    }
    let mut pts: Vec<usize> = penalty.keys().copied().collect();
    pts.push(r);
    let (terms, st) = dreyfus_wagner(m, &pts)?;
    let root_bit = 1usize << terms.binary_search(&r).expect("root included");
    let pen: Vec<f64> = terms.iter().map(|p| penalty.get(p).copied().unwrap_or(0.0)).collect();
    let mut best = f64::INFINITY;
    for mask in 0..st.len() {
        if mask & root_bit == 0 {
            continue;
        }
        let paid: f64 = (0..terms.len()).filter(|&b| mask >> b & 1 == 0).map(|b| pen[b]).sum();
        best = best.min(st[mask] + paid);
    }
    Ok(best)
}

fn check_facilities(facilities: &[Facility]) -> Result<(), OracleError> {
    if facilities.len() > MAX_FACILITIES {
        return Err(OracleError::TooManyFacilities { count: facilities.len(), cap: MAX_FACILITIES });
    }
    Ok(())
}

fn assignment_cost(m: &MetricSpace, open: &[usize], clients: &[usize]) -> f64 {
    clients
        .iter()
        .map(|&i| open.iter().map(|&x| m.d(i, x)).fold(f64::INFINITY, f64::min))
        .sum()
}

/// Uncapacitated facility location over every nonempty set of open
/// facilities.
pub fn exact_fl(m: &MetricSpace, facilities: &[Facility], clients: &[usize]) -> Result<f64, OracleError> {
    check_facilities(facilities)?;
    let mut best = f64::INFINITY;
    for mask in 1..(1usize << facilities.len()) {
        let chosen: Vec<&Facility> =
            facilities.iter().enumerate().filter(|&(b, _)| mask >> b & 1 == 1).map(|(_, f)| f).collect();
        let open: Vec<usize> = chosen.iter().map(|f| f.point).collect();
        let cost = chosen.iter().map(|f| f.cost).sum::<f64>() + assignment_cost(m, &open, clients);
        best = best.min(cost);
    }
    Ok(best)
}

/// Connected facility location: every set of open facilities containing
/// `r`, connected by a minimum Steiner tree bought at `M` per unit length.
pub fn exact_cfl(
    m: &MetricSpace,
    facilities: &[Facility],
    clients: &[usize],
    big_m: f64,
    r: usize,
) -> Result<f64, OracleError> {
    check_facilities(facilities)?;
    let root = facilities.iter().position(|f| f.point == r).ok_or(OracleError::NoRootFacility)?;
    let points: Vec<usize> = facilities.iter().map(|f| f.point).collect();
    let (terms, st) = dreyfus_wagner(m, &points)?;
    let term_bit = |p: usize| 1usize << terms.binary_search(&p).expect("facility point");
    let mut best = f64::INFINITY;
    for mask in 0..(1usize << facilities.len()) {
        if mask >> root & 1 == 0 {
            continue;
        }
        let mut tmask = 0;
        let mut open = Vec::new();
        let mut opening = 0.0;
        for (b, f) in facilities.iter().enumerate() {
            if mask >> b & 1 == 1 {
                tmask |= term_bit(f.point);
                open.push(f.point);
                opening += f.cost;
            }
        }
        let tree = scaled(big_m, st[tmask]);
        best = best.min(opening + tree + assignment_cost(m, &open, clients));
    }
    Ok(best)
}

/// Steiner network with edge duplication on tiny metrics: every vector of
/// per-edge multiplicities up to the largest requirement, keeping the
/// cheapest one whose max-flows meet every requirement.
pub fn exact_sn_tiny(m: &MetricSpace, reqs: &[(usize, usize, u32)]) -> Result<f64, OracleError> {
    let n = m.n();
    let r_max = reqs.iter().map(|&(_, _, r)| r).max().unwrap_or(0);
    if n > MAX_SN_POINTS || r_max > MAX_SN_REQUIREMENT {
        return Err(OracleError::TooLarge { n, r_max });
    }
    let edges: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let base = r_max as usize + 1;
    let total = base.pow(edges.len() as u32);
    let mut best = f64::INFINITY;
    let mut caps = vec![(0, 0, 0u64); edges.len()];
    for code in 0..total {
        let mut c = code;
        let mut cost = 0.0;
        for (k, &(u, v)) in edges.iter().enumerate() {
            let mult = (c % base) as u64;
            c /= base;
            caps[k] = (u, v, mult);
            cost += mult as f64 * m.d(u, v);
        }
        if cost >= best {
            continue;
        }
        if reqs.iter().all(|&(s, t, r)| max_flow(n, &caps, s, t, r as u64) >= r as u64) {
            best = cost;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> MetricSpace {
        let pts: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        MetricSpace::from_points(&pts).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn dw_small_cases() {
        let m = line(&[0.0, 1.0, 2.0, 3.0]);
        assert_eq!(dreyfus_wagner_st(&m, &[0, 1, 3]).unwrap(), 3.0);
        assert_eq!(dreyfus_wagner_st(&m, &[1, 3]).unwrap(), 2.0);
        assert_eq!(dreyfus_wagner_st(&m, &[2]).unwrap(), 0.0);
    }

    #[test]
    fn dw_uses_the_square_center() {
        let m = MetricSpace::from_points(&[
            vec![0.0, 0.0],
            vec![2.0, 0.0],
            vec![0.0, 2.0],
            vec![2.0, 2.0],
            vec![1.0, 1.0],
        ])
        .unwrap();
        // Scaled so that the center is at distance 1 from each corner.
        assert!(close(dreyfus_wagner_st(&m, &[0, 1, 2, 3]).unwrap(), 4.0));
        assert!(close(m.d(0, 1), 2f64.sqrt()));
    }

    #[test]
    fn dw_rejects_too_many_terminals() {
        let xs: Vec<f64> = (0..16).map(f64::from).collect();
        let m = line(&xs);
        let all: Vec<usize> = (0..16).collect();
        assert_eq!(
            dreyfus_wagner_st(&m, &all),
            Err(OracleError::TooManyTerminals { count: 16, cap: MAX_DW_TERMINALS })
        );
    }

    #[test]
    fn sf_cases() {
        let m = line(&[0.0, 1.0, 2.0, 3.0, 50.0, 52.0]);
        assert_eq!(exact_sf(&m, &[(0, 2)]).unwrap(), 2.0);
        assert_eq!(exact_sf(&m, &[(0, 1), (4, 5)]).unwrap(), 3.0);
        assert_eq!(exact_sf(&m, &[(0, 3), (1, 2)]).unwrap(), 3.0);
        assert_eq!(exact_sf(&m, &[]).unwrap(), 0.0);
    }

    #[test]
    fn srob_cases() {
        let m = line(&[0.0, 5.0, 5.0, 5.0, 6.0]);
        // Distances are scaled by the unit gap between 5 and 6.
        assert_eq!(exact_srob(&m, 0, &[1], 2.0).unwrap(), 5.0);
        assert_eq!(exact_srob(&m, 0, &[1], 0.5).unwrap(), 2.5);
        assert_eq!(exact_srob(&m, 0, &[1, 1, 1], 2.0).unwrap(), 10.0);
    }

    #[test]
    fn mrob_cases() {
        let m = line(&[0.0, 1.0, 3.0]);
        assert_eq!(exact_mrob(&m, &[(0, 1)], 3.0).unwrap(), 1.0);
        assert_eq!(exact_mrob(&m, &[(0, 2); 4], 3.0).unwrap(), 9.0);
        assert_eq!(exact_mrob(&m, &[(0, 2); 4], 0.0).unwrap(), 0.0);
    }

    #[test]
    fn partitions_are_counted_by_bell_numbers() {
        for (n, bell) in [(1, 1), (2, 2), (3, 5), (4, 15), (5, 52), (6, 203)] {
            let mut count = 0;
            for_each_partition(n, |_, _| count += 1);
            assert_eq!(count, bell, "n = {n}");
        }
    }

    #[test]
    fn pcst_cases() {
        let m = line(&[0.0, 4.0, 4.0, 5.0]);
        assert_eq!(exact_pcst(&m, 0, &[(1, 1.0)]).unwrap(), 1.0);
        assert_eq!(exact_pcst(&m, 0, &[(1, 100.0)]).unwrap(), 4.0);
        assert_eq!(exact_pcst(&m, 0, &[(1, 3.0), (2, 3.0)]).unwrap(), 4.0);
    }

    #[test]
    fn facility_cases() {
        let m = line(&[0.0, 10.0, 10.0, 20.0, 20.0, 21.0]);
        let free = [Facility { point: 0, cost: 0.0 }];
        assert_eq!(exact_fl(&m, &free, &[1, 3]).unwrap(), 30.0);
        let pricey = [Facility { point: 0, cost: 0.0 }, Facility { point: 1, cost: 1000.0 }];
        assert_eq!(exact_cfl(&m, &pricey, &[1], 1.0, 0).unwrap(), 10.0);
        let cheap = [Facility { point: 1, cost: 0.1 }, Facility { point: 3, cost: 0.1 }];
        assert!(close(exact_fl(&m, &cheap, &[2, 4]).unwrap(), 0.2));
        let rooted = [Facility { point: 0, cost: 0.0 }, Facility { point: 1, cost: 0.1 }, Facility { point: 3, cost: 0.1 }];
        assert!(close(exact_cfl(&m, &rooted, &[2, 4], 0.0, 0).unwrap(), 0.2));
        assert_eq!(exact_cfl(&m, &cheap, &[2], 1.0, 0), Err(OracleError::NoRootFacility));
    }

    #[test]
    fn sn_cases() {
        let m = line(&[0.0, 1.0]);
        assert_eq!(exact_sn_tiny(&m, &[(0, 1, 2)]).unwrap(), 2.0);
        let tri = MetricSpace::from_matrix(&[
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ])
        .unwrap();
        assert_eq!(exact_sn_tiny(&tri, &[(0, 1, 2)]).unwrap(), 2.0);
        let four = line(&[0.0, 1.0, 2.0, 4.0]);
        assert_eq!(exact_sn_tiny(&four, &[(0, 3, 1), (1, 2, 1)]).unwrap(), exact_sf(&four, &[(0, 3), (1, 2)]).unwrap());
        assert!(matches!(exact_sn_tiny(&four, &[(0, 1, 4)]), Err(OracleError::TooLarge { .. })));
    }
}
