//! Online Steiner tree (greedy), Steiner forest (Berman–Coulston) and
//! Steiner network with edge duplication.

use crate::error::RequestError;
use crate::graph::UnionFind;
use crate::metric::{class_of, pow2, MetricSpace};
use crate::online::{nearest, wrong_shape, OnlineAlgorithm};
use crate::request::{Problem, Request};
use crate::solution::MultiGraphSolution;
use crate::trace::{Decision, RunTrace, TraceRecord};
use std::collections::BTreeMap;

/// Connects each arriving terminal to the nearest terminal that arrived
/// before it (the root counts as arrived first).
#[derive(Debug, Clone)]
pub struct GreedySteinerTree<'a> {
    metric: &'a MetricSpace,
    arrived: Vec<usize>,
    sol: MultiGraphSolution,
    trace: RunTrace,
    cost: f64,
}

impl<'a> GreedySteinerTree<'a> {
    pub fn new(metric: &'a MetricSpace, root: usize) -> Self {
        Self {
            metric,
            arrived: vec![root],
            sol: MultiGraphSolution::default(),
            trace: RunTrace::new(Problem::SteinerTree, Some(root), 1.0),
            cost: 0.0,
        }
    }
}

impl OnlineAlgorithm for GreedySteinerTree<'_> {
    fn serve(&mut self, req: Request) -> Result<(), RequestError> {
        let index = self.trace.records.len();
        let Request::Terminal(p) = req else {
            return Err(wrong_shape(index, Problem::SteinerTree));
        };
        let (q, a) = nearest(self.metric, self.arrived.iter().copied(), p).expect("root arrived");
        self.sol.begin_request();
        self.sol.buy(p, q, 1);
        let class = class_of(a);
        self.cost += a;
        self.trace.records.push(TraceRecord {
            index,
            point: p,
            a,
            class,
            decision: if class.is_some() { Decision::Connect } else { Decision::Free },
            anchor: Some(q),
            share: class.map_or(0.0, |j| pow2(j + 1)),
            cost: a,
            ..Default::default()
        });
        self.arrived.push(p);
        Ok(())
    }

    fn solution(&self) -> &MultiGraphSolution {
        &self.sol
    }

    fn trace(&self) -> &RunTrace {
        &self.trace
    }

    fn accumulated_cost(&self) -> f64 {
        self.cost
    }
}

/// Result of feeding one pair to the Berman–Coulston state machine.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BcStep {
    pub class: Option<i32>,
    /// Edges added, tagged with the inner-loop level that added them.
    pub level_edges: Vec<(i32, usize, usize)>,
    /// A zero-length edge joining coincident endpoints, if one was needed.
    pub zero_edge: Option<(usize, usize)>,
}

impl BcStep {
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.level_edges.iter().map(|&(_, u, v)| (u, v)).chain(self.zero_edge)
    }

    pub fn length(&self, m: &MetricSpace) -> f64 {
        self.edges().map(|(u, v)| m.d(u, v)).sum()
    }
}

/// Terminal occurrences with their classes, plus the connectivity of the
/// edges bought so far.
#[derive(Debug, Clone)]
pub struct BcCore {
    occurrences: Vec<(usize, i32)>,
    components: UnionFind,
}

impl BcCore {
    pub fn new(n: usize) -> Self {
        Self { occurrences: Vec::new(), components: UnionFind::new(n) }
    }

    /// For levels `j = 0..=class`, links `s` and then `t` to every earlier
    /// terminal (in arrival order, the new pair included) of class at least
    /// `j` within distance `2^(j+1)`, skipping links whose endpoints are
    /// already connected.
    pub fn add_pair(&mut self, m: &MetricSpace, s: usize, t: usize) -> BcStep {
        let d = m.d(s, t);
        let Some(class) = class_of(d) else {
            let zero_edge = self.components.union(s, t).then_some((s, t));
            return BcStep { class: None, level_edges: Vec::new(), zero_edge };
        };
        self.occurrences.push((s, class));
        self.occurrences.push((t, class));
        let mut level_edges = Vec::new();
        for j in 0..=class {
            let reach = pow2(j + 1);
            for e in [s, t] {
                for &(v, cv) in &self.occurrences {
                    if cv >= j && m.d(e, v) < reach && self.components.union(e, v) {
                        level_edges.push((j, e, v));
                    }
                }
            }
        }
        BcStep { class: Some(class), level_edges, zero_edge: None }
    }
}

#[derive(Debug, Clone)]
pub struct BermanCoulston<'a> {
    metric: &'a MetricSpace,
    core: BcCore,
    sol: MultiGraphSolution,
    trace: RunTrace,
    cost: f64,
}

impl<'a> BermanCoulston<'a> {
    pub fn new(metric: &'a MetricSpace) -> Self {
        Self {
            metric,
            core: BcCore::new(metric.n()),
            sol: MultiGraphSolution::default(),
            trace: RunTrace::new(Problem::SteinerForest, None, 1.0),
            cost: 0.0,
        }
    }
}

impl OnlineAlgorithm for BermanCoulston<'_> {
    fn serve(&mut self, req: Request) -> Result<(), RequestError> {
        let index = self.trace.records.len();
        let Request::Pair(s, t) = req else {
            return Err(wrong_shape(index, Problem::SteinerForest));
        };
        let step = self.core.add_pair(self.metric, s, t);
        self.sol.begin_request();
        for (u, v) in step.edges() {
            self.sol.buy(u, v, 1);
        }
        let cost = step.length(self.metric);
        self.cost += cost;
        self.trace.records.push(TraceRecord {
            index,
            point: s,
            partner: Some(t),
            a: self.metric.d(s, t),
            class: step.class,
            decision: if step.class.is_some() { Decision::Connect } else { Decision::Free },
            level_edges: step.level_edges,
            cost,
            ..Default::default()
        });
        Ok(())
    }

    fn solution(&self) -> &MultiGraphSolution {
        &self.sol
    }

    fn trace(&self) -> &RunTrace {
        &self.trace
    }

    fn accumulated_cost(&self) -> f64 {
        self.cost
    }
}

/// Runs one Berman–Coulston instance per requirement tier `ℓ`
/// (`R ∈ [2^ℓ, 2^(ℓ+1))`) and buys `2^(ℓ+1)` copies of each edge it adds.
#[derive(Debug, Clone)]
pub struct SteinerNetwork<'a> {
    metric: &'a MetricSpace,
    tiers: BTreeMap<u32, BcCore>,
    sol: MultiGraphSolution,
    trace: RunTrace,
    cost: f64,
}

impl<'a> SteinerNetwork<'a> {
    pub fn new(metric: &'a MetricSpace) -> Self {
        Self {
            metric,
            tiers: BTreeMap::new(),
            sol: MultiGraphSolution::default(),
            trace: RunTrace::new(Problem::SteinerNetwork, None, 1.0),
            cost: 0.0,
        }
    }
}

/// Largest requirement the tiering supports (copies must fit in a `u32`).
pub const MAX_REQUIREMENT: u32 = (1 << 30) - 1;

impl OnlineAlgorithm for SteinerNetwork<'_> {
    fn serve(&mut self, req: Request) -> Result<(), RequestError> {
        let index = self.trace.records.len();
        let Request::Requirement(s, t, r) = req else {
            return Err(wrong_shape(index, Problem::SteinerNetwork));
        };
        if r < 1 || r > MAX_REQUIREMENT {
            return Err(RequestError::InvalidRequirement(r as f64));
        }
        let tier = 31 - r.leading_zeros();
        let copies = 1u32 << (tier + 1);
        let n = self.metric.n();
        let step = self.tiers.entry(tier).or_insert_with(|| BcCore::new(n)).add_pair(self.metric, s, t);
        self.sol.begin_request();
        for (u, v) in step.edges() {
            self.sol.buy(u, v, copies);
        }
        let cost = copies as f64 * step.length(self.metric);
        self.cost += cost;
        self.trace.records.push(TraceRecord {
            index,
            point: s,
            partner: Some(t),
            a: self.metric.d(s, t),
            class: step.class,
            decision: if step.class.is_some() { Decision::Connect } else { Decision::Free },
            level_edges: step.level_edges,
            tier: Some(tier),
            cost,
            ..Default::default()
        });
        Ok(())
    }

    fn solution(&self) -> &MultiGraphSolution {
        &self.sol
    }

    fn trace(&self) -> &RunTrace {
        &self.trace
    }

    fn accumulated_cost(&self) -> f64 {
        self.cost
    }
}

fn drive<A: OnlineAlgorithm>(mut alg: A, reqs: impl IntoIterator<Item = Request>) -> (MultiGraphSolution, RunTrace) {
    for r in reqs {
        alg.serve(r).expect("request shape matches the algorithm");
    }
    (alg.solution().clone(), alg.trace().clone())
}

pub fn run_greedy_st(m: &MetricSpace, root: usize, terminals: &[usize]) -> (MultiGraphSolution, RunTrace) {
    drive(GreedySteinerTree::new(m, root), terminals.iter().map(|&p| Request::Terminal(p)))
}

pub fn run_bc_sf(m: &MetricSpace, pairs: &[(usize, usize)]) -> (MultiGraphSolution, RunTrace) {
    drive(BermanCoulston::new(m), pairs.iter().map(|&(s, t)| Request::Pair(s, t)))
}

pub fn run_sn(
    m: &MetricSpace,
    reqs: &[(usize, usize, u32)],
) -> Result<(MultiGraphSolution, RunTrace), RequestError> {
    let mut alg = SteinerNetwork::new(m);
    for &(s, t, r) in reqs {
        alg.serve(Request::Requirement(s, t, r))?;
    }
    Ok((alg.sol, alg.trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::request::RequestSequence;
    use crate::solution::{check_feasible, solution_cost};

    fn line(xs: &[f64]) -> MetricSpace {
        let pts: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        MetricSpace::from_points(&pts).unwrap()
    }

    #[test]
    fn greedy_on_a_line() {
        let m = line(&[0.0, 1.0, 3.0]);
        let (sol, trace) = run_greedy_st(&m, 0, &[1, 2]);
        let a: Vec<f64> = trace.records.iter().map(|r| r.a).collect();
        assert_eq!(a, vec![1.0, 2.0]);
        assert_eq!(sol.bought.keys().copied().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        assert_eq!(sol.bought_length(&m), 3.0);
        assert_eq!(trace.records[0].class, Some(0));
        assert_eq!(trace.records[1].class, Some(1));
    }

    #[test]
    fn greedy_repeat_is_free() {
        let m = line(&[0.0, 4.0, 1.0]);
        let (sol, trace) = run_greedy_st(&m, 0, &[1, 1]);
        assert_eq!(trace.records[1].a, 0.0);
        assert_eq!(trace.records[1].class, None);
        assert_eq!(trace.records[1].decision, Decision::Free);
        assert_eq!(sol.bought_length(&m), 4.0);
    }

    #[test]
    fn bc_single_unit_pair() {
        let m = line(&[0.0, 1.0]);
        let (sol, trace) = run_bc_sf(&m, &[(0, 1)]);
        assert_eq!(trace.records[0].level_edges, vec![(0, 0, 1)]);
        assert_eq!(sol.bought_length(&m), 1.0);
    }

    #[test]
    fn bc_far_second_pair() {
        let m = line(&[0.0, 1.0, 10.0, 11.5]);
        let (sol, trace) = run_bc_sf(&m, &[(0, 1), (2, 3)]);
        assert_eq!(trace.records[1].class, Some(0));
        assert_eq!(trace.records[1].level_edges, vec![(0, 2, 3)]);
        assert_eq!(sol.bought_length(&m), 2.5);
    }

    #[test]
    fn bc_repeated_pair_adds_nothing() {
        let m = line(&[0.0, 3.0, 1.0]);
        let (sol, trace) = run_bc_sf(&m, &[(0, 1), (0, 1)]);
        assert!(trace.records[1].level_edges.is_empty());
        assert_eq!(sol.bought_length(&m), 3.0);
    }

    #[test]
    fn bc_links_earlier_terminals_at_low_levels() {
        // Pair (0,3) then a pair whose endpoint sits next to 0.
        let m = line(&[0.0, 8.0, 0.5, 20.0]);
        let (_, trace) = run_bc_sf(&m, &[(0, 1), (2, 3)]);
        let edges = &trace.records[1].level_edges;
        assert_eq!(edges[0], (0, 2, 0));
        assert!(edges.iter().all(|&(j, u, v)| m.d(u, v) < pow2(j + 1)));
    }

    #[test]
    fn sn_copies_follow_tiers() {
        let m = line(&[0.0, 1.0]);
        let (sol, trace) = run_sn(&m, &[(0, 1, 5)]).unwrap();
        assert_eq!(trace.records[0].tier, Some(2));
        assert_eq!(sol.bought_multiplicity(0, 1), 8);
        let (sol, _) = run_sn(&m, &[(0, 1, 1)]).unwrap();
        assert_eq!(sol.bought_length(&m), 2.0);
        let (sol, _) = run_sn(&m, &[(0, 1, 1), (0, 1, 5)]).unwrap();
        assert_eq!(sol.bought_length(&m), 10.0);
        let seq = RequestSequence::new(
            Problem::SteinerNetwork,
            vec![Request::Requirement(0, 1, 1), Request::Requirement(0, 1, 5)],
        );
        assert_eq!(check_feasible(&sol, &seq, &m), vec![true, true]);
        assert_eq!(solution_cost(&sol, &seq, &m).total, 10.0);
    }

    #[test]
    fn sn_rejects_zero_requirement() {
        let m = line(&[0.0, 1.0]);
        assert!(matches!(run_sn(&m, &[(0, 1, 0)]), Err(RequestError::InvalidRequirement(_))));
    }
}
