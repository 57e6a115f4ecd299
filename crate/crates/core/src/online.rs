//! The common interface of the online algorithms and a driver that plays a
//! whole instance while checking feasibility after every request.

use crate::cfl::ConnectedFacilityLocation;
use crate::error::RequestError;
use crate::metric::MetricSpace;
use crate::prize::PrizeCollectingSteinerTree;
use crate::rentorbuy::{MultiSourceRentOrBuy, SingleSourceRentOrBuy};
use crate::request::{Instance, Problem, Request};
use crate::solution::{check_feasible, solution_cost, CostBreakdown, MultiGraphSolution};
use crate::steiner::{BermanCoulston, GreedySteinerTree, SteinerNetwork};
use crate::trace::RunTrace;

/// An online algorithm consumes requests one at a time; its decisions are
/// never revised.
pub trait OnlineAlgorithm {
    fn serve(&mut self, req: Request) -> Result<(), RequestError>;
    fn solution(&self) -> &MultiGraphSolution;
    fn trace(&self) -> &RunTrace;
    /// Cost as accumulated by the algorithm itself, request by request.
    fn accumulated_cost(&self) -> f64;
}

/// Ties go to the earliest candidate.
pub(crate) fn nearest(
    m: &MetricSpace,
    candidates: impl IntoIterator<Item = usize>,
    p: usize,
) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for q in candidates {
        let d = m.d(p, q);
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((q, d));
        }
    }
    best
}

pub(crate) fn wrong_shape(index: usize, problem: Problem) -> RequestError {
    RequestError::WrongShape { index, problem: problem.to_string() }
}

/// The algorithm that serves `inst`'s problem.
pub fn algorithm_for<'a>(inst: &'a Instance) -> Result<Box<dyn OnlineAlgorithm + 'a>, RequestError> {
    let m = &inst.metric;
    let seq = &inst.seq;
    let root = || seq.root.ok_or_else(|| RequestError::MissingRoot(seq.problem.to_string()));
    Ok(match seq.problem {
        Problem::SteinerTree => Box::new(GreedySteinerTree::new(m, root()?)),
        Problem::SteinerForest => Box::new(BermanCoulston::new(m)),
        Problem::SteinerNetwork => Box::new(SteinerNetwork::new(m)),
        Problem::Srob => Box::new(SingleSourceRentOrBuy::new(m, root()?, seq.m)?),
        Problem::Mrob => Box::new(MultiSourceRentOrBuy::new(m, seq.m)?),
        Problem::Cfl => {
            Box::new(ConnectedFacilityLocation::new(m, root()?, &seq.facilities, seq.m)?)
        }
        Problem::Pcst => Box::new(PrizeCollectingSteinerTree::new(m, root()?)),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub solution: MultiGraphSolution,
    pub trace: RunTrace,
    pub cost: CostBreakdown,
    pub accumulated: f64,
    /// Index of the first request after which some earlier request was
    /// left unsatisfied, if any.
    pub first_infeasible_prefix: Option<usize>,
}

/// Plays every request of `inst`, checking feasibility of all served
/// requests after each step.
pub fn run_instance(inst: &Instance) -> Result<RunOutcome, RequestError> {
    let mut alg = algorithm_for(inst)?;
    let mut first_infeasible_prefix = None;
    for (i, &req) in inst.seq.requests.iter().enumerate() {
        alg.serve(req)?;
        if first_infeasible_prefix.is_none()
            && !check_feasible(alg.solution(), &inst.seq, &inst.metric).iter().all(|&ok| ok)
        {
            first_infeasible_prefix = Some(i);
        }
    }
    let solution = alg.solution().clone();
    let cost = solution_cost(&solution, &inst.seq, &inst.metric);
    Ok(RunOutcome {
        trace: alg.trace().clone(),
        accumulated: alg.accumulated_cost(),
        solution,
        cost,
        first_infeasible_prefix,
    })
}

/// Plays every request without the per-prefix feasibility checks.
pub fn run_unchecked(inst: &Instance) -> Result<(MultiGraphSolution, RunTrace), RequestError> {
    let mut alg = algorithm_for(inst)?;
    for &req in &inst.seq.requests {
        alg.serve(req)?;
    }
    Ok((alg.solution().clone(), alg.trace().clone()))
}
