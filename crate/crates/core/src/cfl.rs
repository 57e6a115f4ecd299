//! Online connected facility location, driven by an online
//! facility-location subroutine that it runs alongside.

use crate::error::RequestError;
use crate::metric::{class_of, pow2, MetricSpace};
use crate::online::{nearest, wrong_shape, OnlineAlgorithm};
use crate::rentorbuy::{check_m, RentSets};
use crate::request::{Facility, Problem, Request};
use crate::solution::MultiGraphSolution;
use crate::trace::{Decision, RunTrace, TraceRecord};
use std::collections::BTreeSet;

/// Deterministic online facility location with primal-dual potentials.
///
/// Each client arrives with a budget equal to its distance to the nearest
/// open facility. A closed facility `x` opens once the budgets that reach
/// it, `Σ max(0, b_v − d(v, x))`, cover its opening cost; opening caps every
/// budget at the distance to `x`. The client is then assigned to its
/// nearest open facility.
#[derive(Debug, Clone)]
pub struct OnlineFacilityLocation<'a> {
    metric: &'a MetricSpace,
    facilities: Vec<Facility>,
    open: Vec<bool>,
    budgets: Vec<(usize, f64)>,
    assignments: Vec<usize>,
}

/// What the subroutine did for one client.
#[derive(Debug, Clone, PartialEq)]
pub struct OflStep {
    pub facility: usize,
    pub distance: f64,
    /// Facilities opened while serving this client, in opening order.
    pub opened: Vec<usize>,
}

impl<'a> OnlineFacilityLocation<'a> {
    /// `root` must be a facility; it is open from the start.
    pub fn new(metric: &'a MetricSpace, root: usize, facilities: &[Facility]) -> Result<Self, RequestError> {
        let pos = facilities
            .iter()
            .position(|f| f.point == root && f.cost == 0.0)
            .ok_or(RequestError::NoFacilities)?;
        if let Some(f) = facilities.iter().find(|f| !(f.cost.is_finite() && f.cost >= 0.0)) {
            return Err(RequestError::InvalidFacilityCost(f.cost));
        }
        let mut open = vec![false; facilities.len()];
        open[pos] = true;
        Ok(Self {
            metric,
            facilities: facilities.to_vec(),
            open,
            budgets: Vec::new(),
            assignments: Vec::new(),
        })
    }

    fn open_points(&self) -> impl Iterator<Item = usize> + '_ {
        self.facilities.iter().zip(&self.open).filter(|(_, &o)| o).map(|(f, _)| f.point)
    }

    pub fn is_open(&self, point: usize) -> bool {
        self.facilities.iter().zip(&self.open).any(|(f, &o)| o && f.point == point)
    }

    pub fn open_facilities(&self) -> BTreeSet<usize> {
        self.open_points().collect()
    }

    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    /// Opening costs plus assignment distances so far.
    pub fn cost(&self) -> f64 {
        let opening: f64 =
            self.facilities.iter().zip(&self.open).filter(|(_, &o)| o).map(|(f, _)| f.cost).sum();
        let assignment: f64 = self
            .budgets
            .iter()
            .zip(&self.assignments)
            .map(|(&(v, _), &x)| self.metric.d(v, x))
            .sum();
        opening + assignment
    }

    pub fn serve(&mut self, p: usize) -> OflStep {
        let m = self.metric;
        let (_, b) = nearest(m, self.open_points(), p).expect("root is open");
        self.budgets.push((p, b));
        let mut opened = Vec::new();
        loop {
            let mut best: Option<(usize, f64)> = None;
            for (k, f) in self.facilities.iter().enumerate() {
                if self.open[k] {
                    continue;
                }
                let potential: f64 =
                    self.budgets.iter().map(|&(v, bv)| (bv - m.d(v, f.point)).max(0.0)).sum();
                if potential > 0.0 && potential >= f.cost {
                    let surplus = potential - f.cost;
                    if best.is_none_or(|(_, s)| surplus > s) {
                        best = Some((k, surplus));
                    }
                }
            }
            let Some((k, _)) = best else { break };
            self.open[k] = true;
            let x = self.facilities[k].point;
            for (v, bv) in &mut self.budgets {
                *bv = bv.min(m.d(*v, x));
            }
            opened.push(x);
        }
        let (facility, distance) = nearest(m, self.open_points(), p).expect("root is open");
        self.assignments.push(facility);
        OflStep { facility, distance, opened }
    }
}

/// Result of running the facility-location subroutine on its own.
#[derive(Debug, Clone, PartialEq)]
pub struct VirtualSolution {
    pub opened: BTreeSet<usize>,
    pub assignments: Vec<usize>,
    pub cost: f64,
}

pub fn run_ofl(
    metric: &MetricSpace,
    root: usize,
    facilities: &[Facility],
    clients: &[usize],
) -> Result<VirtualSolution, RequestError> {
    let mut ofl = OnlineFacilityLocation::new(metric, root, facilities)?;
    for &p in clients {
        ofl.serve(p);
    }
    Ok(VirtualSolution { opened: ofl.open_facilities(), assignments: ofl.assignments.clone(), cost: ofl.cost() })
}

/// Connected facility location: clients close to their virtual facility
/// are served by the nearest really open facility; the others rent a
/// connection or, once enough nearby clients of their class have rented,
/// open their virtual facility and buy an edge connecting it.
#[derive(Debug, Clone)]
pub struct ConnectedFacilityLocation<'a> {
    metric: &'a MetricSpace,
    m: f64,
    costs: Vec<(usize, f64)>,
    ofl: OnlineFacilityLocation<'a>,
    renters: RentSets,
    sol: MultiGraphSolution,
    trace: RunTrace,
    cost: f64,
}

impl<'a> ConnectedFacilityLocation<'a> {
    pub fn new(
        metric: &'a MetricSpace,
        root: usize,
        facilities: &[Facility],
        m: f64,
    ) -> Result<Self, RequestError> {
        let ofl = OnlineFacilityLocation::new(metric, root, facilities)?;
        let mut sol = MultiGraphSolution::default();
        sol.opened.insert(root);
        Ok(Self {
            metric,
            m: check_m(m)?,
            costs: facilities.iter().map(|f| (f.point, f.cost)).collect(),
            ofl,
            renters: RentSets::default(),
            sol,
            trace: RunTrace::new(Problem::Cfl, Some(root), m),
            cost: 0.0,
        })
    }

    fn opening_cost(&self, x: usize) -> f64 {
        self.costs.iter().find(|&&(p, _)| p == x).map_or(0.0, |&(_, c)| c)
    }

    /// The subroutine's state, for checks that compare against it.
    pub fn virtual_solution(&self) -> &OnlineFacilityLocation<'a> {
        &self.ofl
    }
}

impl OnlineAlgorithm for ConnectedFacilityLocation<'_> {
    fn serve(&mut self, req: Request) -> Result<(), RequestError> {
        let index = self.trace.records.len();
        let Request::Terminal(p) = req else {
            return Err(wrong_shape(index, Problem::Cfl));
        };
        let step = self.ofl.serve(p);
        let (x, a) = nearest(self.metric, self.sol.opened.iter().copied(), p).expect("root is open");
        self.sol.begin_request();
        let mut rec = TraceRecord {
            index,
            point: p,
            a,
            anchor: Some(x),
            virtual_facility: Some(step.facility),
            virtual_distance: step.distance,
            virtual_opened: step.opened,
            ..Default::default()
        };
        let mut facility = x;
        match class_of(a) {
            None => rec.cost = 0.0,
            Some(j) => {
                rec.class = Some(j);
                if a <= 4.0 * step.distance {
                    rec.decision = Decision::Virtual;
                    rec.cost = a;
                } else {
                    rec.witnesses = self.renters.within(self.metric, j, p, pow2(j - 2));
                    if rec.witnesses.len() as f64 >= self.m {
                        let y = step.facility;
                        rec.decision = Decision::Buy;
                        rec.opened = Some(y);
                        rec.cost = step.distance;
                        if self.sol.opened.insert(y) {
                            rec.cost += self.opening_cost(y) + self.m * self.metric.d(y, x);
                            self.sol.buy(y, x, 1);
                        }
                        facility = y;
                    } else {
                        rec.decision = Decision::Rent;
                        rec.share = pow2(j + 1);
                        rec.cost = a;
                        self.renters.insert(j, index, p);
                    }
                }
            }
        }
        rec.facility = Some(facility);
        self.sol.assign(facility);
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

/// Runs the algorithm and also returns the subroutine's open set.
pub fn run_cfl(
    metric: &MetricSpace,
    facilities: &[Facility],
    root: usize,
    clients: &[usize],
    m: f64,
) -> Result<(MultiGraphSolution, RunTrace, VirtualSolution), RequestError> {
    let mut alg = ConnectedFacilityLocation::new(metric, root, facilities, m)?;
    for &p in clients {
        alg.serve(Request::Terminal(p))?;
    }
    let virt = VirtualSolution {
        opened: alg.ofl.open_facilities(),
        assignments: alg.ofl.assignments.clone(),
        cost: alg.ofl.cost(),
    };
    Ok((alg.sol, alg.trace, virt))
}
