//! Single-source and multi-source rent-or-buy.
//!
//! Both algorithms keep, per class `j`, the requests that rented. A new
//! request of class `j` counts the nearby class-`j` renters as its
//! witnesses and buys once it has at least `M` of them.

use crate::error::RequestError;
use crate::metric::{class_of, pow2, MetricSpace};
use crate::online::{nearest, wrong_shape, OnlineAlgorithm};
use crate::request::{Problem, Request};
use crate::solution::MultiGraphSolution;
use crate::steiner::BcCore;
use crate::trace::{Decision, RunTrace, TraceRecord};
use std::collections::BTreeMap;

pub(crate) fn check_m(m: f64) -> Result<f64, RequestError> {
    if m >= 0.0 {
        Ok(m)
    } else {
        Err(RequestError::InvalidM(m))
    }
}

/// Requests that rented, grouped by class: `(request index, point)`.
#[derive(Debug, Clone, Default)]
pub(crate) struct RentSets {
    by_class: BTreeMap<i32, Vec<(usize, usize)>>,
}

impl RentSets {
    pub(crate) fn insert(&mut self, class: i32, index: usize, point: usize) {
        self.by_class.entry(class).or_default().push((index, point));
    }

    /// Indices of class-`class` renters strictly closer than `radius` to `p`.
    pub(crate) fn within(&self, m: &MetricSpace, class: i32, p: usize, radius: f64) -> Vec<usize> {
        self.by_class
            .get(&class)
            .into_iter()
            .flatten()
            .filter(|&&(_, q)| m.d(p, q) < radius)
            .map(|&(i, _)| i)
            .collect()
    }
}

/// Rent-or-buy towards a fixed root `r`.
#[derive(Debug, Clone)]
pub struct SingleSourceRentOrBuy<'a> {
    metric: &'a MetricSpace,
    m: f64,
    /// Buy terminals, `r` first.
    buyers: Vec<usize>,
    renters: RentSets,
    sol: MultiGraphSolution,
    trace: RunTrace,
    cost: f64,
}

impl<'a> SingleSourceRentOrBuy<'a> {
    pub fn new(metric: &'a MetricSpace, root: usize, m: f64) -> Result<Self, RequestError> {
        Ok(Self {
            metric,
            m: check_m(m)?,
            buyers: vec![root],
            renters: RentSets::default(),
            sol: MultiGraphSolution::default(),
            trace: RunTrace::new(Problem::Srob, Some(root), m),
            cost: 0.0,
        })
    }
}

impl OnlineAlgorithm for SingleSourceRentOrBuy<'_> {
    fn serve(&mut self, req: Request) -> Result<(), RequestError> {
        let index = self.trace.records.len();
        let Request::Terminal(p) = req else {
            return Err(wrong_shape(index, Problem::Srob));
        };
        let (z, a) = nearest(self.metric, self.buyers.iter().copied(), p).expect("root is a buyer");
        self.sol.begin_request();
        let mut rec = TraceRecord { index, point: p, a, anchor: Some(z), ..Default::default() };
        match class_of(a) {
            None => {
                self.sol.buy(p, z, 1);
                self.buyers.push(p);
            }
            Some(j) => {
                rec.class = Some(j);
                rec.witnesses = self.renters.within(self.metric, j, p, pow2(j - 1));
                if rec.witnesses.len() as f64 >= self.m {
                    rec.decision = Decision::Buy;
                    rec.cost = self.m * a;
                    self.sol.buy(p, z, 1);
                    self.buyers.push(p);
                } else {
                    rec.decision = Decision::Rent;
                    rec.cost = a;
                    rec.share = pow2(j + 1);
                    self.sol.rent(p, z);
                    self.renters.insert(j, index, p);
                }
            }
        }
        self.cost += rec.cost;
        self.trace.records.push(rec);
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

/// Rent-or-buy between arbitrary pairs. Pairs with enough witnesses at both
/// endpoints are handed to an internal Berman–Coulston instance whose edges
/// are bought.
#[derive(Debug, Clone)]
pub struct MultiSourceRentOrBuy<'a> {
    metric: &'a MetricSpace,
    m: f64,
    core: BcCore,
    renters: RentSets,
    sol: MultiGraphSolution,
    trace: RunTrace,
    cost: f64,
}

impl<'a> MultiSourceRentOrBuy<'a> {
    pub fn new(metric: &'a MetricSpace, m: f64) -> Result<Self, RequestError> {
        Ok(Self {
            metric,
            m: check_m(m)?,
            core: BcCore::new(metric.n()),
            renters: RentSets::default(),
            sol: MultiGraphSolution::default(),
            trace: RunTrace::new(Problem::Mrob, None, m),
            cost: 0.0,
        })
    }

    fn buy_through_core(&mut self, s: usize, t: usize, rec: &mut TraceRecord) {
        let step = self.core.add_pair(self.metric, s, t);
        for (u, v) in step.edges() {
            self.sol.buy(u, v, 1);
        }
        rec.cost = self.m * step.length(self.metric);
        rec.level_edges = step.level_edges;
    }
}

impl OnlineAlgorithm for MultiSourceRentOrBuy<'_> {
    fn serve(&mut self, req: Request) -> Result<(), RequestError> {
        let index = self.trace.records.len();
        let Request::Pair(s, t) = req else {
            return Err(wrong_shape(index, Problem::Mrob));
        };
        let a = self.metric.d(s, t);
        self.sol.begin_request();
        let mut rec = TraceRecord { index, point: s, partner: Some(t), a, ..Default::default() };
        match class_of(a) {
            None => self.buy_through_core(s, t, &mut rec),
            Some(j) => {
                rec.class = Some(j);
                let radius = pow2(j - 2);
                rec.witnesses = self.renters.within(self.metric, j, s, radius);
                let renter = if (rec.witnesses.len() as f64) < self.m {
                    Some(s)
                } else {
                    rec.partner_witnesses = self.renters.within(self.metric, j, t, radius);
                    ((rec.partner_witnesses.len() as f64) < self.m).then_some(t)
                };
                match renter {
                    Some(e) => {
                        rec.decision = Decision::Rent;
                        rec.rent_endpoint = Some(e);
                        rec.share = pow2(j + 1);
                        rec.cost = a;
                        self.sol.rent(s, t);
                        self.renters.insert(j, index, e);
                    }
                    None => {
                        rec.decision = Decision::Buy;
                        self.buy_through_core(s, t, &mut rec);
                    }
                }
            }
        }
        self.cost += rec.cost;
        self.trace.records.push(rec);
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

pub fn run_srob(
    metric: &MetricSpace,
    root: usize,
    terminals: &[usize],
    m: f64,
) -> Result<(MultiGraphSolution, RunTrace), RequestError> {
    let mut alg = SingleSourceRentOrBuy::new(metric, root, m)?;
    for &p in terminals {
        alg.serve(Request::Terminal(p))?;
    }
    Ok((alg.sol, alg.trace))
}

pub fn run_mrob(
    metric: &MetricSpace,
    pairs: &[(usize, usize)],
    m: f64,
) -> Result<(MultiGraphSolution, RunTrace), RequestError> {
    let mut alg = MultiSourceRentOrBuy::new(metric, m)?;
    for &(s, t) in pairs {
        alg.serve(Request::Pair(s, t))?;
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

    fn decisions(trace: &RunTrace) -> Vec<Decision> {
        trace.records.iter().map(|r| r.decision).collect()
    }

    #[test]
    fn srob_line_example() {
        let m = line(&[0.0, 4.0, 5.0, 6.0]);
        let (sol, trace) = run_srob(&m, 0, &[1, 2, 3], 1.0).unwrap();
        assert_eq!(decisions(&trace), vec![Decision::Rent, Decision::Buy, Decision::Rent]);
        assert_eq!(trace.records[0].class, Some(2));
        assert_eq!(trace.records[1].witnesses, vec![0]);
        assert_eq!(trace.records[2].anchor, Some(2));
        assert_eq!(trace.records[2].a, 1.0);
        assert_eq!(trace.total_cost(), 10.0);
        let seq = RequestSequence::new(
            Problem::Srob,
            vec![Request::Terminal(1), Request::Terminal(2), Request::Terminal(3)],
        )
        .with_root(0)
        .with_m(1.0);
        assert_eq!(solution_cost(&sol, &seq, &m).total, 10.0);
        assert_eq!(check_feasible(&sol, &seq, &m), vec![true; 3]);
    }

    #[test]
    fn srob_zero_m_always_buys() {
        let m = line(&[0.0, 4.0, 5.0, 6.0]);
        let (sol, trace) = run_srob(&m, 0, &[1, 2, 3], 0.0).unwrap();
        assert!(trace.records.iter().all(|r| r.decision == Decision::Buy));
        assert_eq!(trace.total_cost(), 0.0);
        assert_eq!(sol.bought_length(&m), 6.0);
    }

    #[test]
    fn srob_single_far_terminal_rents() {
        let m = line(&[0.0, 2.0, 3.0]);
        let (_, trace) = run_srob(&m, 0, &[1], 10.0).unwrap();
        assert_eq!(decisions(&trace), vec![Decision::Rent]);
        assert_eq!(trace.total_cost(), 2.0);
    }

    #[test]
    fn srob_rejects_negative_m() {
        let m = line(&[0.0, 2.0]);
        assert!(matches!(run_srob(&m, 0, &[1], -1.0), Err(RequestError::InvalidM(_))));
        assert!(run_srob(&m, 0, &[1], f64::NAN).is_err());
    }

    #[test]
    fn mrob_triple_pair_example() {
        let m = line(&[0.0, 1.0]);
        let (sol, trace) = run_mrob(&m, &[(0, 1); 3], 1.0).unwrap();
        assert_eq!(decisions(&trace), vec![Decision::Rent, Decision::Rent, Decision::Buy]);
        assert_eq!(trace.records[0].rent_endpoint, Some(0));
        assert_eq!(trace.records[1].rent_endpoint, Some(1));
        assert_eq!(trace.records[2].witnesses, vec![0]);
        assert_eq!(trace.records[2].partner_witnesses, vec![1]);
        assert_eq!(trace.total_cost(), 3.0);
        let seq = RequestSequence::new(Problem::Mrob, vec![Request::Pair(0, 1); 3]).with_m(1.0);
        assert_eq!(solution_cost(&sol, &seq, &m).total, 3.0);
        assert_eq!(check_feasible(&sol, &seq, &m), vec![true; 3]);
    }

    #[test]
    fn mrob_zero_m_buys_everything_for_free() {
        let m = line(&[0.0, 1.0, 5.0]);
        let (sol, trace) = run_mrob(&m, &[(0, 1), (1, 2)], 0.0).unwrap();
        assert!(trace.records.iter().all(|r| r.decision == Decision::Buy));
        assert_eq!(trace.total_cost(), 0.0);
        assert!(sol.bought_length(&m) > 0.0);
    }

    #[test]
    fn mrob_single_pair_rents() {
        let m = line(&[0.0, 3.0, 4.0]);
        let (_, trace) = run_mrob(&m, &[(0, 1)], 5.0).unwrap();
        assert_eq!(trace.total_cost(), 3.0);
    }

    #[test]
    fn mrob_coincident_pair_is_free_but_connected() {
        let m = line(&[0.0, 0.0]);
        let (sol, trace) = run_mrob(&m, &[(0, 1)], 2.0).unwrap();
        assert_eq!(decisions(&trace), vec![Decision::Free]);
        let seq = RequestSequence::new(Problem::Mrob, vec![Request::Pair(0, 1)]).with_m(2.0);
        assert_eq!(check_feasible(&sol, &seq, &m), vec![true]);
    }
}
