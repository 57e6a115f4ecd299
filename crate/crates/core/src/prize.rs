//! Online prize-collecting Steiner tree.

use crate::error::RequestError;
use crate::metric::{class_of, pow2, MetricSpace};
use crate::online::{nearest, wrong_shape, OnlineAlgorithm};
use crate::request::{Problem, Request};
use crate::solution::MultiGraphSolution;
use crate::trace::{Decision, RunTrace, TraceRecord};
use std::collections::BTreeMap;

/// Every terminal of class `j` raises its share `ρ` towards the deficit
/// `2^(j+1)` left by the shares of same-class terminals within `2^(j-1)`,
/// capped by its own penalty. A terminal that closes the deficit connects
/// to the nearest connected terminal; otherwise it pays its penalty.
#[derive(Debug, Clone)]
pub struct PrizeCollectingSteinerTree<'a> {
    metric: &'a MetricSpace,
    buyers: Vec<usize>,
    /// Per class: `(request index, point, ρ)`.
    shares: BTreeMap<i32, Vec<(usize, usize, f64)>>,
    sol: MultiGraphSolution,
    trace: RunTrace,
    cost: f64,
}

impl<'a> PrizeCollectingSteinerTree<'a> {
    pub fn new(metric: &'a MetricSpace, root: usize) -> Self {
        Self {
            metric,
            buyers: vec![root],
            shares: BTreeMap::new(),
            sol: MultiGraphSolution::default(),
            trace: RunTrace::new(Problem::Pcst, Some(root), 1.0),
            cost: 0.0,
        }
    }
}

impl OnlineAlgorithm for PrizeCollectingSteinerTree<'_> {
    fn serve(&mut self, req: Request) -> Result<(), RequestError> {
        let index = self.trace.records.len();
        let Request::Penalty(p, pi) = req else {
            return Err(wrong_shape(index, Problem::Pcst));
        };
        if !(pi.is_finite() && pi >= 0.0) {
            return Err(RequestError::InvalidPenalty(pi));
        }
        let (z, a) = nearest(self.metric, self.buyers.iter().copied(), p).expect("root is a buyer");
        self.sol.begin_request();
        let mut rec = TraceRecord { index, point: p, a, anchor: Some(z), penalty: pi, ..Default::default() };
        match class_of(a) {
            None => {
                self.sol.buy(p, z, 1);
                self.buyers.push(p);
            }
            Some(j) => {
                rec.class = Some(j);
                let radius = pow2(j - 1);
                let peers = self.shares.entry(j).or_default();
                let mut collected = 0.0;
                for &(i, q, rho) in peers.iter() {
                    if self.metric.d(p, q) < radius {
                        rec.witnesses.push(i);
                        collected += rho;
                    }
                }
                rec.witnesses.push(index);
                let deficit = (pow2(j + 1) - collected).max(0.0);
                rec.rho = pi.min(deficit);
                rec.share = rec.rho;
                peers.push((index, p, rec.rho));
                if pi >= deficit {
                    rec.decision = Decision::Buy;
                    rec.cost = a;
                    self.sol.buy(p, z, 1);
                    self.buyers.push(p);
                } else {
                    rec.decision = Decision::Penalty;
                    rec.cost = pi;
                    self.sol.penalties.insert(index);
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

pub fn run_pcst(
    metric: &MetricSpace,
    root: usize,
    terminals: &[(usize, f64)],
) -> Result<(MultiGraphSolution, RunTrace), RequestError> {
    let mut alg = PrizeCollectingSteinerTree::new(metric, root);
    for &(p, pi) in terminals {
        alg.serve(Request::Penalty(p, pi))?;
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
    fn penalty_then_buy() {
        let m = line(&[0.0, 4.0, 4.0, 5.0]);
        let (sol, trace) = run_pcst(&m, 0, &[(1, 1.0), (2, 10.0)]).unwrap();
        let a = &trace.records[0];
        assert_eq!((a.class, a.decision, a.rho, a.cost), (Some(2), Decision::Penalty, 1.0, 1.0));
        let b = &trace.records[1];
        assert_eq!(b.witnesses, vec![0, 1]);
        assert_eq!((b.decision, b.rho, b.cost), (Decision::Buy, 7.0, 4.0));
        assert_eq!(trace.total_share(), 8.0);
        assert_eq!(trace.total_cost(), 5.0);
        let seq = RequestSequence::new(
            Problem::Pcst,
            vec![Request::Penalty(1, 1.0), Request::Penalty(2, 10.0)],
        )
        .with_root(0);
        assert_eq!(solution_cost(&sol, &seq, &m).total, 5.0);
        assert_eq!(check_feasible(&sol, &seq, &m), vec![true, true]);
    }

    #[test]
    fn zero_penalties_cost_nothing() {
        let m = line(&[0.0, 3.0, 7.0]);
        let (_, trace) = run_pcst(&m, 0, &[(1, 0.0), (2, 0.0)]).unwrap();
        assert!(trace.records.iter().all(|r| r.decision == Decision::Penalty && r.rho == 0.0));
        assert_eq!(trace.total_cost(), 0.0);
    }

    #[test]
    fn full_shares_let_a_zero_penalty_connect() {
        let m = line(&[0.0, 4.0, 4.0, 5.0]);
        let (_, trace) = run_pcst(&m, 0, &[(1, 8.0), (2, 0.0)]).unwrap();
        // The first terminal closes its own deficit and buys, so the second
        // is free at distance zero.
        assert_eq!(trace.records[0].decision, Decision::Buy);
        assert_eq!(trace.records[1].decision, Decision::Free);
    }

    #[test]
    fn rejects_negative_penalty() {
        let m = line(&[0.0, 1.0]);
        assert!(matches!(run_pcst(&m, 0, &[(1, -1.0)]), Err(RequestError::InvalidPenalty(_))));
    }
}
