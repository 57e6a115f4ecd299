//! Executable versions of the structural claims behind each algorithm's
//! analysis. Every check reads a [`RunTrace`] (possibly forged) and reports
//! the violations it finds instead of panicking.

use crate::error::{CheckError, HstError};
use crate::graph::UnionFind;
use crate::hst::{sample_frt, Hst};
use crate::metric::{pow2, MetricSpace};
use crate::request::{Facility, Instance, Problem, Request, RequestSequence};
use crate::solution::MultiGraphSolution;
use crate::steiner::run_greedy_st;
use crate::trace::{Decision, RunTrace, TraceRecord};
use crate::tree_opt::{
    opt_tree_pcst, opt_tree_rob_multi, opt_tree_rob_single, opt_tree_steiner_forest,
    opt_tree_steiner_network, opt_tree_steiner_tree,
};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Relative slack for comparisons between float sums.
pub const REL_TOL: f64 = 1e-9;

/// `a ≤ b` up to [`REL_TOL`].
pub fn approx_le(a: f64, b: f64) -> bool {
    a <= b + REL_TOL * b.abs().max(a.abs()).max(1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub check: &'static str,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.check, self.detail)
    }
}

fn violation(check: &'static str, detail: String) -> Violation {
    Violation { check, detail }
}

fn by_class<'t>(records: impl Iterator<Item = &'t TraceRecord>) -> BTreeMap<i32, Vec<&'t TraceRecord>> {
    let mut out: BTreeMap<i32, Vec<&TraceRecord>> = BTreeMap::new();
    for r in records {
        if let Some(j) = r.class {
            out.entry(j).or_default().push(r);
        }
    }
    out
}

/// The records whose points form the separated set `Z_j`, and the factor
/// `2^(j+offset)` they must be apart by.
fn separated_records(trace: &RunTrace) -> Option<(Decision, i32)> {
    match trace.problem {
        Problem::SteinerTree => Some((Decision::Connect, 0)),
        Problem::Srob | Problem::Pcst => Some((Decision::Buy, 0)),
        Problem::Cfl => Some((Decision::Buy, -1)),
        _ => None,
    }
}

/// Class-`j` connect or buy requests lie pairwise at distance at least
/// `2^j` (`2^(j-1)` for facility location). Other problems pass trivially.
pub fn check_class_separation(trace: &RunTrace, m: &MetricSpace) -> Vec<Violation> {
    let Some((decision, offset)) = separated_records(trace) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for (j, recs) in by_class(trace.with_decision(decision)) {
        let bound = pow2(j + offset);
        for (k, a) in recs.iter().enumerate() {
            for b in &recs[k + 1..] {
                let d = m.d(a.point, b.point);
                if d < bound {
                    out.push(violation(
                        "class separation",
                        format!(
                            "requests {} and {} of class {j} are {d} apart, below {bound}",
                            a.index, b.index
                        ),
                    ));
                }
            }
        }
    }
    out
}

/// Points of Steiner-forest-style occurrences (`point`, `class`) grouped by
/// the independent Berman–Coulston instance they were fed to.
fn bc_instances(trace: &RunTrace) -> BTreeMap<Option<u32>, Vec<&TraceRecord>> {
    let mut out: BTreeMap<Option<u32>, Vec<&TraceRecord>> = BTreeMap::new();
    for r in &trace.records {
        if matches!(r.decision, Decision::Connect | Decision::Buy) || !r.level_edges.is_empty() {
            out.entry(r.tier).or_default().push(r);
        }
    }
    out
}

fn occurrence_points(r: &TraceRecord) -> impl Iterator<Item = usize> + '_ {
    std::iter::once(r.point).chain(r.partner)
}

/// Points with an occurrence of class at least `j`.
fn points_of_class_at_least(records: &[&TraceRecord], j: i32) -> BTreeSet<usize> {
    records
        .iter()
        .filter(|r| r.class.is_some_and(|c| c >= j))
        .flat_map(|r| occurrence_points(r))
        .collect()
}

/// Level-`j` cuts of `t`, with levels past either end of the tree clamped:
/// above the top every terminal shares one cut, below the bottom every
/// terminal is alone.
pub fn cuts_clamped(t: &Hst, j: i32) -> Vec<Vec<usize>> {
    let (lo, hi) = t.level_range();
    if j > hi {
        vec![t.terminals()]
    } else if j < lo {
        t.terminals().into_iter().map(|p| vec![p]).collect()
    } else {
        t.cuts_at_level(j).expect("level in range")
    }
}

/// Cover families for the acyclicity check, one per instance and level:
/// the level-`j` cuts of `t` that meet the points of class at least `j`.
pub fn sf_covers(trace: &RunTrace, t: &Hst) -> BTreeMap<(Option<u32>, i32), Vec<Vec<usize>>> {
    let mut out = BTreeMap::new();
    for (tier, recs) in bc_instances(trace) {
        let levels: BTreeSet<i32> =
            recs.iter().flat_map(|r| r.level_edges.iter().map(|&(j, _, _)| j)).collect();
        for j in levels {
            let xj = points_of_class_at_least(&recs, j);
            let cover: Vec<Vec<usize>> =
                cuts_clamped(t, j).into_iter().filter(|c| c.iter().any(|p| xj.contains(p))).collect();
            out.insert((tier, j), cover);
        }
    }
    out
}

/// Builds, for every instance and level `j`, the graph whose nodes are the
/// cover sets and whose edges are the level-`j` edges `A_j`, and reports
/// each edge that closes a cycle. Fails if a cover family is not a
/// disjoint family of sets of diameter below `2^j` covering `X_j`.
pub fn check_metagraph_acyclic(
    trace: &RunTrace,
    m: &MetricSpace,
    covers: &BTreeMap<(Option<u32>, i32), Vec<Vec<usize>>>,
) -> Result<Vec<Violation>, CheckError> {
    let mut out = Vec::new();
    for (tier, recs) in bc_instances(trace) {
        let mut edges: BTreeMap<i32, Vec<(usize, usize, usize)>> = BTreeMap::new();
        for r in &recs {
            for &(j, u, v) in &r.level_edges {
                edges.entry(j).or_default().push((r.index, u, v));
            }
        }
        for (j, aj) in edges {
            let invalid = |reason: String| CheckError::InvalidCover { level: j, reason };
            let cover = covers.get(&(tier, j)).ok_or_else(|| invalid("no cover family given".into()))?;
            let mut owner = BTreeMap::new();
            for (k, set) in cover.iter().enumerate() {
                let diam = m.diameter_of(set);
                if diam >= pow2(j) {
                    return Err(invalid(format!("set {set:?} has diameter {diam}")));
                }
                for &p in set {
                    if owner.insert(p, k).is_some() {
                        return Err(invalid(format!("point {p} lies in two sets")));
                    }
                }
            }
            if let Some(p) = points_of_class_at_least(&recs, j).into_iter().find(|p| !owner.contains_key(p)) {
                return Err(invalid(format!("point {p} of class at least {j} is not covered")));
            }
            let mut uf = UnionFind::new(cover.len());
            for (index, u, v) in aj {
                let (Some(&su), Some(&sv)) = (owner.get(&u), owner.get(&v)) else {
                    return Err(invalid(format!("edge ({u},{v}) has an uncovered endpoint")));
                };
                if !uf.union(su, sv) {
                    out.push(violation(
                        "meta-graph acyclic",
                        format!("level-{j} edge ({u},{v}) of request {index} closes a cycle"),
                    ));
                }
            }
        }
    }
    Ok(out)
}

/// Every Berman–Coulston edge added at level `j` is shorter than `2^(j+1)`
/// and joins points that have arrived with class at least `j`.
pub fn check_bc_edges(trace: &RunTrace, m: &MetricSpace) -> Vec<Violation> {
    let mut out = Vec::new();
    for recs in bc_instances(trace).values() {
        let mut best_class: BTreeMap<usize, i32> = BTreeMap::new();
        for r in recs {
            if let Some(c) = r.class {
                for p in occurrence_points(r) {
                    let e = best_class.entry(p).or_insert(c);
                    *e = (*e).max(c);
                }
            }
            for &(j, u, v) in &r.level_edges {
                let d = m.d(u, v);
                if d >= pow2(j + 1) {
                    out.push(violation(
                        "edge length",
                        format!("level-{j} edge ({u},{v}) of request {} has length {d}", r.index),
                    ));
                }
                for p in [u, v] {
                    if best_class.get(&p).is_none_or(|&c| c < j) {
                        out.push(violation(
                            "endpoint class",
                            format!("level-{j} edge ({u},{v}) of request {}: point {p} has no class-{j} occurrence", r.index),
                        ));
                    }
                }
            }
        }
    }
    out
}

/// Every bought edge's multiplicity equals the sum of `2^(ℓ+1)` over the
/// tier-`ℓ` instances that added it.
pub fn check_sn_multiplicities(trace: &RunTrace, sol: &MultiGraphSolution) -> Vec<Violation> {
    let mut expected: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for r in &trace.records {
        let copies = r.tier.map_or(1, |l| 1u64 << (l + 1));
        for &(_, u, v) in &r.level_edges {
            if u != v {
                *expected.entry((u.min(v), u.max(v))).or_insert(0) += copies;
            }
        }
    }
    let mut out = Vec::new();
    let keys: BTreeSet<(usize, usize)> = expected.keys().chain(sol.bought.keys()).copied().collect();
    for e in keys {
        let want = expected.get(&e).copied().unwrap_or(0);
        let have = sol.bought.get(&e).copied().unwrap_or(0) as u64;
        if want != have {
            out.push(violation(
                "multiplicity",
                format!("edge {e:?} bought {have} times, tiers account for {want}"),
            ));
        }
    }
    out
}

/// Witness sets of same-class buy requests are disjoint sets of earlier
/// same-class renters within the witness radius, each of size at least
/// `M`. For multi-source rent-or-buy only a greedily chosen
/// `2^(j-1)`-separated subset of the buy endpoints is required to have
/// disjoint witness sets, as only those are charged.
pub fn check_witness_disjointness(trace: &RunTrace, m: &MetricSpace) -> Vec<Violation> {
    let radius_offset = match trace.problem {
        Problem::Srob => -1,
        Problem::Mrob | Problem::Cfl => -2,
        _ => return Vec::new(),
    };
    let mut out = Vec::new();
    let renters: BTreeMap<usize, (i32, usize)> = trace
        .with_decision(Decision::Rent)
        .filter_map(|r| Some((r.index, (r.class?, r.rent_endpoint.unwrap_or(r.point)))))
        .collect();
    for (j, buys) in by_class(trace.with_decision(Decision::Buy)) {
        let radius = pow2(j + radius_offset);
        // (request index, buy point, witness set)
        let mut members: Vec<(usize, usize, &[usize])> = Vec::new();
        for b in &buys {
            members.push((b.index, b.point, &b.witnesses));
            if let Some(t) = b.partner {
                members.push((b.index, t, &b.partner_witnesses));
            }
        }
        if trace.problem == Problem::Mrob {
            let mut chosen: Vec<(usize, usize, &[usize])> = Vec::new();
            for c in members {
                if chosen.iter().all(|&(_, p, _)| m.d(p, c.1) >= pow2(j - 1)) {
                    chosen.push(c);
                }
            }
            members = chosen;
        }
        let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
        for &(index, p, w) in &members {
            if (w.len() as f64) < trace.m {
                out.push(violation(
                    "witness count",
                    format!("buy request {index} at point {p} has {} witnesses, below M = {}", w.len(), trace.m),
                ));
            }
            for &i in w {
                match renters.get(&i) {
                    Some(&(c, q)) if c == j && i < index && m.d(p, q) < radius => {}
                    _ => out.push(violation(
                        "witness validity",
                        format!("request {i} is not an earlier class-{j} renter within {radius} of point {p}"),
                    )),
                }
                if let Some(prev) = owner.insert(i, index) {
                    out.push(violation(
                        "witness disjointness",
                        format!("renter {i} witnesses both request {prev} and request {index}"),
                    ));
                }
            }
        }
    }
    out
}

fn cut_index(cuts: &[Vec<usize>]) -> BTreeMap<usize, usize> {
    cuts.iter().enumerate().flat_map(|(k, c)| c.iter().map(move |&p| (p, k))).collect()
}

/// Ceiling of `M` as a count.
fn m_ceil(m: f64) -> f64 {
    m.ceil()
}

/// Cut-capacity claims on the extended tree `t`. A renter of class `c`
/// is charged to the level-`c - shift` cut containing it, with `shift = 1`
/// for single-source rent-or-buy and `2` for multi-source and facility
/// location. Each cut may receive at most `⌈M⌉` renters, at most as many
/// as the requests it holds (single source, facility location) or
/// separates (multi source), and none when it contains the root.
pub fn check_cut_capacity(trace: &RunTrace, seq: &RequestSequence, t: &Hst) -> Vec<Violation> {
    let shift = match trace.problem {
        Problem::Srob => 1,
        Problem::Mrob | Problem::Cfl => 2,
        _ => return Vec::new(),
    };
    let mut out = Vec::new();
    let (lo, hi) = t.level_range();
    let mut by_level: BTreeMap<i32, Vec<(usize, usize)>> = BTreeMap::new();
    for r in trace.with_decision(Decision::Rent) {
        let Some(c) = r.class else { continue };
        let p = r.rent_endpoint.unwrap_or(r.point);
        let j = c - shift;
        if j < lo || j > hi || !t.contains(p) {
            out.push(violation(
                "cut capacity",
                format!("renter {} (point {p}, class {c}) has no level-{j} cut in the tree", r.index),
            ));
            continue;
        }
        by_level.entry(j).or_default().push((r.index, p));
    }
    let cap_m = m_ceil(trace.m);
    for (j, rs) in by_level {
        let cuts = t.cuts_at_level(j).expect("level checked");
        let idx = cut_index(&cuts);
        let mut count = vec![0usize; cuts.len()];
        for &(_, p) in &rs {
            count[idx[&p]] += 1;
        }
        for (k, cut) in cuts.iter().enumerate() {
            if count[k] == 0 {
                continue;
            }
            let members: BTreeSet<usize> = cut.iter().copied().collect();
            if trace.root.is_some_and(|r| members.contains(&r)) {
                out.push(violation(
                    "cut capacity",
                    format!("level-{j} cut {cut:?} contains the root and {} renters", count[k]),
                ));
                continue;
            }
            let demand = match trace.problem {
                Problem::Mrob => seq
                    .requests
                    .iter()
                    .filter(|r| match r.endpoints() {
                        Some((s, u)) => members.contains(&s) != members.contains(&u),
                        None => false,
                    })
                    .count(),
                _ => seq.requests.iter().filter(|r| r.points().iter().any(|p| members.contains(p))).count(),
            };
            let cap = cap_m.min(demand as f64);
            if count[k] as f64 > cap {
                out.push(violation(
                    "cut capacity",
                    format!("level-{j} cut {cut:?} holds {} renters, cap {cap}", count[k]),
                ));
            }
        }
    }
    out
}

/// The facility opened by buy requests, and whether it was already opened
/// by the facility-location subroutine by then.
fn virtual_open_timeline(trace: &RunTrace) -> Vec<BTreeSet<usize>> {
    let mut open: BTreeSet<usize> = trace.root.into_iter().collect();
    trace
        .records
        .iter()
        .map(|r| {
            open.extend(r.virtual_opened.iter().copied());
            open.clone()
        })
        .collect()
}

/// Connected facility location invariants.
///
/// 1. Class-`j` buy clients are pairwise at least `2^(j-1)` apart.
/// 2. `c(H) ≤ Σ_{z∈Z} 2a_z`.
/// 3. `Σ_{z∈Z} M·a_z ≤ Σ_j 2^(j+1)|R_j|`.
/// 4. Every really opened facility was already virtually open.
/// 5. Each buy client is closer than `a_z/4` to its virtual facility.
/// 6. Opening plus virtual-client and buy-client assignment costs stay
///    within the virtual solution's opening cost plus four times its
///    assignment cost.
pub fn check_cfl_invariants(trace: &RunTrace, m: &MetricSpace, facilities: &[Facility]) -> Vec<Violation> {
    let mut out = check_class_separation(trace, m);
    let buys: Vec<&TraceRecord> = trace.with_decision(Decision::Buy).collect();
    let tree: f64 = buys
        .iter()
        .filter_map(|b| Some(m.d(b.opened?, b.anchor?)))
        .sum();
    let two_a: f64 = buys.iter().map(|b| 2.0 * b.a).sum();
    if !approx_le(tree, two_a) {
        out.push(violation("buy tree", format!("c(H) = {tree} exceeds Σ 2a_z = {two_a}")));
    }
    let m_a: f64 = buys.iter().map(|b| trace.m * b.a).sum();
    let share = trace.total_share();
    if !approx_le(m_a, share) {
        out.push(violation("buy share", format!("Σ M·a_z = {m_a} exceeds total share {share}")));
    }
    let timeline = virtual_open_timeline(trace);
    let mut real: BTreeSet<usize> = trace.root.into_iter().collect();
    for b in &buys {
        if let Some(y) = b.opened {
            if !timeline[b.index.min(timeline.len() - 1)].contains(&y) {
                out.push(violation(
                    "virtual superset",
                    format!("request {} opens facility {y}, which is not virtually open", b.index),
                ));
            }
            real.insert(y);
        }
        if b.virtual_distance >= b.a / 4.0 {
            out.push(violation(
                "buy distance",
                format!("buy request {}: d(i, σ̂(i)) = {} is not below a/4 = {}", b.index, b.virtual_distance, b.a / 4.0),
            ));
        }
    }
    let cost_of = |x: usize| facilities.iter().find(|f| f.point == x).map_or(0.0, |f| f.cost);
    let virtual_final = timeline.last().cloned().unwrap_or_else(|| trace.root.into_iter().collect());
    let lhs = real.iter().map(|&x| cost_of(x)).sum::<f64>()
        + trace.with_decision(Decision::Virtual).map(|r| r.a).sum::<f64>()
        + buys.iter().map(|b| b.virtual_distance).sum::<f64>();
    let rhs = virtual_final.iter().map(|&x| cost_of(x)).sum::<f64>()
        + 4.0 * trace.records.iter().map(|r| r.virtual_distance).sum::<f64>();
    if !approx_le(lhs, rhs) {
        out.push(violation("cost split", format!("facility-side cost {lhs} exceeds {rhs}")));
    }
    out
}

/// Prize-collecting invariants, with cut sums taken on the extended tree
/// `t`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PcstReport {
    pub violations: Vec<Violation>,
    /// Cuts whose charged share lies in `(2^(j+1), 2^(j+2)]`: allowed, but
    /// above what a single witness set can collect.
    pub flagged_cuts: usize,
    /// `Σ_j Σ_{C ∌ r} min(Σ_{i ∈ R_(j+1) ∩ C} π_i, 2^(j-1))`, a lower bound
    /// on the tree optimum.
    pub lower_bound: f64,
}

/// 1. Total cost at most `2·Σρ`. 2. Class-`j` buys pairwise at least `2^j`
/// apart. 3. For each level-`j` cut, the shares of class-`(j+1)`
/// terminals inside sum to at most `2^(j+2)`, and to zero if it holds the
/// root. 4. `ρ ≤ π` for every terminal.
pub fn check_pcst_invariants(trace: &RunTrace, m: &MetricSpace, t: &Hst) -> PcstReport {
    let mut report = PcstReport { violations: check_class_separation(trace, m), ..Default::default() };
    let out = &mut report.violations;
    let total = trace.total_cost();
    let rho: f64 = trace.records.iter().map(|r| r.rho).sum();
    if !approx_le(total, 2.0 * rho) {
        out.push(violation("share covers cost", format!("total {total} exceeds 2·Σρ = {}", 2.0 * rho)));
    }
    for r in &trace.records {
        if r.rho > r.penalty {
            out.push(violation("share within penalty", format!("request {}: ρ = {} > π = {}", r.index, r.rho, r.penalty)));
        }
    }
    let (lo, hi) = t.level_range();
    let mut by_level: BTreeMap<i32, Vec<&TraceRecord>> = BTreeMap::new();
    for r in &trace.records {
        let Some(c) = r.class else { continue };
        if r.rho <= 0.0 && r.penalty <= 0.0 {
            continue;
        }
        let j = c - 1;
        if j < lo || j > hi || !t.contains(r.point) {
            if r.rho > 0.0 {
                out.push(violation(
                    "cut share",
                    format!("request {} (class {c}) has no level-{j} cut in the tree", r.index),
                ));
            }
            continue;
        }
        by_level.entry(j).or_default().push(r);
    }
    for (j, recs) in by_level {
        let cuts = t.cuts_at_level(j).expect("level checked");
        let idx = cut_index(&cuts);
        let mut rho_sum = vec![0.0; cuts.len()];
        let mut pi_sum = vec![0.0; cuts.len()];
        for r in recs {
            let k = idx[&r.point];
            if r.rho > 0.0 {
                rho_sum[k] += r.rho;
                pi_sum[k] += r.penalty;
            }
        }
        for (k, cut) in cuts.iter().enumerate() {
            let has_root = trace.root.is_some_and(|root| cut.contains(&root));
            if has_root {
                if rho_sum[k] > 0.0 {
                    out.push(violation(
                        "cut share",
                        format!("level-{j} cut {cut:?} contains the root and collects ρ = {}", rho_sum[k]),
                    ));
                }
                continue;
            }
            if !approx_le(rho_sum[k], pow2(j + 2)) {
                out.push(violation(
                    "cut share",
                    format!("level-{j} cut {cut:?} collects ρ = {} > {}", rho_sum[k], pow2(j + 2)),
                ));
            } else if rho_sum[k] > pow2(j + 1) {
                report.flagged_cuts += 1;
            }
            report.lower_bound += pi_sum[k].min(pow2(j - 1));
        }
    }
    report
}

/// Per-request cost against cost share: Steiner tree `Σa ≤ Σshare`,
/// rent-or-buy `cost ≤ 2·share`, facility location
/// `M·c(H) + rents ≤ 3·share`, prize-collecting `cost ≤ 2·Σρ`.
pub fn check_share_bounds(trace: &RunTrace, m: &MetricSpace) -> Vec<Violation> {
    let share = trace.total_share();
    let (lhs, factor) = match trace.problem {
        Problem::SteinerTree => (trace.total_cost(), 1.0),
        Problem::Srob | Problem::Mrob | Problem::Pcst => (trace.total_cost(), 2.0),
        Problem::Cfl => {
            let tree: f64 = trace
                .with_decision(Decision::Buy)
                .filter_map(|b| Some(m.d(b.opened?, b.anchor?)))
                .sum();
            let rents: f64 = trace.with_decision(Decision::Rent).map(|r| r.a).sum();
            (trace.m * tree + rents, 3.0)
        }
        _ => return Vec::new(),
    };
    if approx_le(lhs, factor * share) {
        Vec::new()
    } else {
        vec![violation("share bound", format!("{lhs} exceeds {factor} × share {share}"))]
    }
}

/// The bought edges of a rooted algorithm coincide with greedy Steiner tree
/// replayed on the requests that were bought (or free).
pub fn check_greedy_replay(trace: &RunTrace, m: &MetricSpace, sol: &MultiGraphSolution) -> Vec<Violation> {
    let Some(root) = trace.root else { return Vec::new() };
    let pts: Vec<usize> = trace
        .records
        .iter()
        .filter(|r| matches!(r.decision, Decision::Buy | Decision::Free | Decision::Connect))
        .map(|r| r.point)
        .collect();
    let (replay, _) = run_greedy_st(m, root, &pts);
    if replay.bought == sol.bought {
        Vec::new()
    } else {
        vec![violation(
            "greedy replay",
            format!("bought edges {:?} differ from greedy replay {:?}", sol.bought, replay.bought),
        )]
    }
}

/// A per-tree inequality `lhs ≤ factor · opt`.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeBound {
    pub name: &'static str,
    pub lhs: f64,
    pub factor: f64,
    pub opt: f64,
}

impl TreeBound {
    pub fn holds(&self) -> bool {
        approx_le(self.lhs, self.factor * self.opt)
    }

    /// `lhs / opt`, or 0 when both vanish.
    pub fn ratio(&self) -> f64 {
        if self.lhs == 0.0 {
            0.0
        } else {
            self.lhs / self.opt
        }
    }
}

/// The per-tree charging bounds of the problem, evaluated on `tree` (an
/// unextended HST over the instance's terminal points, root included).
/// Rent-or-buy, facility location and prize-collecting bounds use the tree
/// extended by two singleton levels.
pub fn tree_bounds(
    seq: &RequestSequence,
    m: &MetricSpace,
    trace: &RunTrace,
    sol: &MultiGraphSolution,
    tree: &Hst,
) -> Result<Vec<TreeBound>, HstError> {
    let cost = trace.total_cost();
    let share = trace.total_share();
    let pairs = || -> Vec<(usize, usize)> { seq.requests.iter().filter_map(|r| r.endpoints()).collect() };
    let terminals =
        || -> Vec<usize> { seq.requests.iter().filter_map(|r| if let Request::Terminal(p) = r { Some(*p) } else { None }).collect() };
    let bound = |name, lhs, factor, opt| TreeBound { name, lhs, factor, opt };
    Ok(match seq.problem {
        Problem::SteinerTree => vec![bound("cost", cost, 4.0, opt_tree_steiner_tree(tree))],
        Problem::SteinerForest => {
            vec![bound("c(H)", sol.bought_length(m), 4.0, opt_tree_steiner_forest(tree, &pairs())?)]
        }
        Problem::SteinerNetwork => {
            let reqs: Vec<(usize, usize, u32)> = seq
                .requests
                .iter()
                .filter_map(|r| if let Request::Requirement(s, t, k) = r { Some((*s, *t, *k)) } else { None })
                .collect();
            vec![bound("cost", cost, 16.0, opt_tree_steiner_network(tree, &reqs)?)]
        }
        Problem::Srob => {
            let ext = tree.extend_singleton_levels(-2)?;
            let opt = opt_tree_rob_single(&ext, seq.root.expect("rooted"), &terminals(), seq.m)?;
            vec![bound("cost", cost, 16.0, opt), bound("share", share, 8.0, opt)]
        }
        Problem::Mrob => {
            let ext = tree.extend_singleton_levels(-2)?;
            let opt = opt_tree_rob_multi(&ext, &pairs(), seq.m)?;
            vec![bound("cost", cost, 32.0, opt), bound("share", share, 16.0, opt)]
        }
        Problem::Pcst => {
            let ext = tree.extend_singleton_levels(-2)?;
            let terms: Vec<(usize, f64)> = seq
                .requests
                .iter()
                .filter_map(|r| if let Request::Penalty(p, pi) = r { Some((*p, *pi)) } else { None })
                .collect();
            let opt = opt_tree_pcst(&ext, seq.root.expect("rooted"), &terms)?;
            vec![bound("cost", cost, 16.0, opt), bound("share", share, 8.0, opt)]
        }
        Problem::Cfl => {
            let ext = tree.extend_singleton_levels(-2)?;
            let opt = opt_tree_rob_single(&ext, seq.root.expect("rooted"), &terminals(), seq.m)?;
            let mut out = vec![bound("share", share, 16.0, opt)];
            let tree_len: f64 = trace
                .with_decision(Decision::Buy)
                .filter_map(|b| Some(m.d(b.opened?, b.anchor?)))
                .sum();
            let rents: f64 = trace.with_decision(Decision::Rent).map(|r| r.a).sum();
            out.push(bound("rent+steiner", seq.m * tree_len + rents, 3.0, share));
            out
        }
    })
}

/// Runs every structural check that applies to the trace's problem.
/// `ext` is the sampled tree extended by two singleton levels; `tree` the
/// same tree unextended.
pub fn structural_violations(
    trace: &RunTrace,
    seq: &RequestSequence,
    m: &MetricSpace,
    sol: &MultiGraphSolution,
    tree: &Hst,
    ext: &Hst,
) -> Result<Vec<Violation>, CheckError> {
    let mut out = check_share_bounds(trace, m);
    match trace.problem {
        Problem::SteinerTree => out.extend(check_class_separation(trace, m)),
        Problem::SteinerForest | Problem::SteinerNetwork => {
            out.extend(check_bc_edges(trace, m));
            out.extend(check_metagraph_acyclic(trace, m, &sf_covers(trace, tree))?);
            if trace.problem == Problem::SteinerNetwork {
                out.extend(check_sn_multiplicities(trace, sol));
            }
        }
        Problem::Srob => {
            out.extend(check_class_separation(trace, m));
            out.extend(check_witness_disjointness(trace, m));
            out.extend(check_cut_capacity(trace, seq, ext));
            out.extend(check_greedy_replay(trace, m, sol));
        }
        Problem::Mrob => {
            out.extend(check_bc_edges(trace, m));
            out.extend(check_metagraph_acyclic(trace, m, &sf_covers(trace, tree))?);
            out.extend(check_witness_disjointness(trace, m));
            out.extend(check_cut_capacity(trace, seq, ext));
        }
        Problem::Cfl => {
            out.extend(check_cfl_invariants(trace, m, &seq.facilities));
            out.extend(check_witness_disjointness(trace, m));
            out.extend(check_cut_capacity(trace, seq, ext));
        }
        Problem::Pcst => {
            out.extend(check_pcst_invariants(trace, m, ext).violations);
            out.extend(check_greedy_replay(trace, m, sol));
        }
    }
    Ok(out)
}

/// Bounds and structural violations of one run against one sampled tree.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeCheck {
    pub tree_seed: u64,
    pub bounds: Vec<TreeBound>,
    pub violations: Vec<Violation>,
}

/// Samples an HST over the instance's terminal points with `tree_seed` and
/// evaluates [`tree_bounds`] and [`structural_violations`] on it. An
/// instance without points yields an empty check.
pub fn check_on_tree(
    inst: &Instance,
    sol: &MultiGraphSolution,
    trace: &RunTrace,
    tree_seed: u64,
) -> Result<TreeCheck, CheckError> {
    let points = inst.seq.terminal_points();
    let mut out = TreeCheck { tree_seed, bounds: Vec::new(), violations: Vec::new() };
    if points.is_empty() {
        return Ok(out);
    }
    let tree = sample_frt(&inst.metric, &points, tree_seed)?;
    let ext = tree.extend_singleton_levels(-2)?;
    out.bounds = tree_bounds(&inst.seq, &inst.metric, trace, sol, &tree)?;
    out.violations = structural_violations(trace, &inst.seq, &inst.metric, sol, &tree, &ext)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prize::run_pcst;
    use crate::rentorbuy::{run_mrob, run_srob};
    use crate::steiner::{run_bc_sf, run_greedy_st};

    fn line(xs: &[f64]) -> MetricSpace {
        let pts: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        MetricSpace::from_points(&pts).unwrap()
    }

    #[test]
    fn greedy_line_is_separated() {
        let m = line(&[0.0, 1.0, 3.0]);
        let (_, trace) = run_greedy_st(&m, 0, &[1, 2]);
        assert!(check_class_separation(&trace, &m).is_empty());
        assert!(check_class_separation(&RunTrace::new(Problem::SteinerTree, Some(0), 1.0), &m).is_empty());
    }

    #[test]
    fn forged_close_pair_is_flagged() {
        let m = line(&[0.0, 1.0, 2.0]);
        let mut trace = RunTrace::new(Problem::SteinerTree, Some(0), 1.0);
        for (index, p) in [(0, 1), (1, 2)] {
            trace.records.push(TraceRecord {
                index,
                point: p,
                class: Some(1),
                decision: Decision::Connect,
                ..Default::default()
            });
        }
        assert_eq!(check_class_separation(&trace, &m).len(), 1);
    }

    #[test]
    fn single_pair_metagraph() {
        let m = line(&[0.0, 1.0]);
        let (_, trace) = run_bc_sf(&m, &[(0, 1)]);
        let t = sample_frt(&m, &[0, 1], 0).unwrap();
        let covers = sf_covers(&trace, &t);
        assert_eq!(covers[&(None, 0)], vec![vec![0], vec![1]]);
        assert!(check_metagraph_acyclic(&trace, &m, &covers).unwrap().is_empty());
    }

    #[test]
    fn two_far_pairs_stay_acyclic() {
        let m = line(&[0.0, 1.0, 10.0, 11.5]);
        let (_, trace) = run_bc_sf(&m, &[(0, 1), (2, 3)]);
        for seed in 0..10 {
            let t = sample_frt(&m, &[0, 1, 2, 3], seed).unwrap();
            assert!(check_metagraph_acyclic(&trace, &m, &sf_covers(&trace, &t)).unwrap().is_empty());
        }
    }

    #[test]
    fn forged_triangle_is_a_cycle() {
        let m = line(&[0.0, 1.0, 1.5]);
        let mut trace = RunTrace::new(Problem::SteinerForest, None, 1.0);
        trace.records.push(TraceRecord {
            index: 0,
            point: 0,
            partner: Some(1),
            class: Some(0),
            decision: Decision::Connect,
            level_edges: vec![(0, 0, 1), (0, 1, 2), (0, 2, 0)],
            ..Default::default()
        });
        trace.records.push(TraceRecord {
            index: 1,
            point: 2,
            partner: Some(0),
            class: Some(0),
            decision: Decision::Connect,
            ..Default::default()
        });
        let covers = BTreeMap::from([((None, 0), vec![vec![0], vec![1], vec![2]])]);
        assert_eq!(check_metagraph_acyclic(&trace, &m, &covers).unwrap().len(), 1);
        let bad = BTreeMap::from([((None, 0), vec![vec![0, 1], vec![2]])]);
        assert!(matches!(
            check_metagraph_acyclic(&trace, &m, &bad),
            Err(CheckError::InvalidCover { level: 0, .. })
        ));
    }

    #[test]
    fn srob_line_passes_every_check() {
        let m = line(&[0.0, 4.0, 5.0, 6.0]);
        let (sol, trace) = run_srob(&m, 0, &[1, 2, 3], 1.0).unwrap();
        let seq = RequestSequence::new(Problem::Srob, (1..4).map(Request::Terminal).collect())
            .with_root(0)
            .with_m(1.0);
        assert!(check_witness_disjointness(&trace, &m).is_empty());
        for seed in 0..20 {
            let t = sample_frt(&m, &[0, 1, 2, 3], seed).unwrap();
            let ext = t.extend_singleton_levels(-2).unwrap();
            let v = structural_violations(&trace, &seq, &m, &sol, &t, &ext).unwrap();
            assert!(v.is_empty(), "seed {seed}: {v:?}");
            assert!(tree_bounds(&seq, &m, &trace, &sol, &t).unwrap().iter().all(TreeBound::holds));
        }
    }

    #[test]
    fn forged_shared_witness_is_flagged() {
        let m = line(&[0.0, 8.0, 8.5, 20.0]);
        let mut trace = RunTrace::new(Problem::Srob, Some(0), 1.0);
        let rec = |index, point, decision, witnesses: Vec<usize>| TraceRecord {
            index,
            point,
            class: Some(3),
            decision,
            rent_endpoint: None,
            witnesses,
            ..Default::default()
        };
        trace.records.push(rec(0, 1, Decision::Rent, vec![]));
        trace.records.push(rec(1, 2, Decision::Buy, vec![0]));
        trace.records.push(rec(2, 2, Decision::Buy, vec![0]));
        let v = check_witness_disjointness(&trace, &m);
        assert!(v.iter().any(|x| x.check == "witness disjointness"), "{v:?}");
    }

    #[test]
    fn mrob_triple_pair_witnesses() {
        let m = line(&[0.0, 1.0]);
        let (_, trace) = run_mrob(&m, &[(0, 1); 3], 1.0).unwrap();
        assert!(check_witness_disjointness(&trace, &m).is_empty());
    }

    #[test]
    fn forged_cut_overload_is_flagged() {
        // Four class-3 renters packed at one point, M = 3.
        let m = line(&[0.0, 8.0, 30.0]);
        let seq = RequestSequence::new(Problem::Srob, vec![Request::Terminal(1); 4]).with_root(0).with_m(3.0);
        let mut trace = RunTrace::new(Problem::Srob, Some(0), 3.0);
        for index in 0..4 {
            trace.records.push(TraceRecord {
                index,
                point: 1,
                a: 8.0,
                class: Some(3),
                decision: Decision::Rent,
                share: 16.0,
                ..Default::default()
            });
        }
        let t = sample_frt(&m, &[0, 1], 0).unwrap().extend_singleton_levels(-2).unwrap();
        assert!(!check_cut_capacity(&trace, &seq, &t).is_empty());
        let empty = RunTrace::new(Problem::Srob, Some(0), 3.0);
        assert!(check_cut_capacity(&empty, &seq, &t).is_empty());
    }

    #[test]
    fn pcst_example_and_forged_share() {
        let m = line(&[0.0, 4.0, 4.0, 5.0]);
        let (_, mut trace) = run_pcst(&m, 0, &[(1, 1.0), (2, 10.0)]).unwrap();
        let t = sample_frt(&m, &[0, 1, 2], 3).unwrap().extend_singleton_levels(-2).unwrap();
        let report = check_pcst_invariants(&trace, &m, &t);
        assert!(report.violations.is_empty(), "{:?}", report.violations);
        assert!(approx_le(trace.total_share(), 8.0 * report.lower_bound));
        trace.records[0].rho = 2.0;
        let forged = check_pcst_invariants(&trace, &m, &t);
        assert!(forged.violations.iter().any(|v| v.check == "share within penalty"));
    }

    #[test]
    fn cfl_forged_opening_is_flagged() {
        let m = line(&[0.0, 33.0, 32.0]);
        let facilities = [Facility { point: 0, cost: 0.0 }, Facility { point: 1, cost: 0.5 }];
        let (_, mut trace, _) = crate::cfl::run_cfl(&m, &facilities, 0, &[2, 2], 1.0).unwrap();
        assert!(check_cfl_invariants(&trace, &m, &facilities).is_empty());
        assert!(check_witness_disjointness(&trace, &m).is_empty());
        trace.records[0].virtual_opened.clear();
        let v = check_cfl_invariants(&trace, &m, &facilities);
        assert!(v.iter().any(|x| x.check == "virtual superset"), "{v:?}");
    }
}
