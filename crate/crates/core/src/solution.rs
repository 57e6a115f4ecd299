//! Solution multigraphs, cost accounting and feasibility checking.

use crate::graph::{max_flow, UnionFind};
use crate::metric::MetricSpace;
use crate::request::{Problem, Request, RequestSequence};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Edges bought, edges rented per request, penalties paid and facilities
/// opened by an online algorithm. Bought edges only ever accumulate.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MultiGraphSolution {
    #[serde(with = "edge_multiset")]
    pub bought: BTreeMap<(usize, usize), u32>,
    /// `rented[i]` is `Q_i`, one entry per served request.
    pub rented: Vec<Vec<(usize, usize)>>,
    /// Request indices whose penalty was paid.
    pub penalties: BTreeSet<usize>,
    /// Open facilities (point indices).
    pub opened: BTreeSet<usize>,
    /// Facility each client was assigned to, one entry per served request.
    pub assignments: Vec<Option<usize>>,
}

fn key(u: usize, v: usize) -> (usize, usize) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

impl MultiGraphSolution {
    pub fn buy(&mut self, u: usize, v: usize, copies: u32) {
        if u != v && copies > 0 {
            *self.bought.entry(key(u, v)).or_insert(0) += copies;
        }
    }

    /// Starts bookkeeping for the next request.
    pub fn begin_request(&mut self) {
        self.rented.push(Vec::new());
        self.assignments.push(None);
    }

    pub fn served(&self) -> usize {
        self.rented.len()
    }

    pub fn rent(&mut self, u: usize, v: usize) {
        if u != v {
            self.rented.last_mut().expect("begin_request first").push(key(u, v));
        }
    }

    pub fn assign(&mut self, facility: usize) {
        *self.assignments.last_mut().expect("begin_request first") = Some(facility);
    }

    /// Total length of bought edges, counting multiplicities.
    pub fn bought_length(&self, m: &MetricSpace) -> f64 {
        self.bought.iter().map(|(&(u, v), &c)| c as f64 * m.d(u, v)).sum()
    }

    pub fn bought_multiplicity(&self, u: usize, v: usize) -> u32 {
        self.bought.get(&key(u, v)).copied().unwrap_or(0)
    }

    fn bought_components(&self, n: usize) -> UnionFind {
        let mut uf = UnionFind::new(n);
        for &(u, v) in self.bought.keys() {
            uf.union(u, v);
        }
        uf
    }
}

mod edge_multiset {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::collections::BTreeMap;

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<(usize, usize), u32>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let list: Vec<(usize, usize, u32)> = map.iter().map(|(&(u, v), &c)| (u, v, c)).collect();
        list.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<(usize, usize), u32>, D::Error> {
        let list = Vec::<(usize, usize, u32)>::deserialize(d)?;
        Ok(list.into_iter().map(|(u, v, c)| ((u.min(v), u.max(v)), c)).collect())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub buy: f64,
    /// Rented edges; for CFL this is the client assignment cost.
    pub rent: f64,
    pub penalty: f64,
    pub opening: f64,
    pub total: f64,
}

pub fn solution_cost(
    sol: &MultiGraphSolution,
    seq: &RequestSequence,
    m: &MetricSpace,
) -> CostBreakdown {
    let factor = if seq.problem.uses_m() { seq.m } else { 1.0 };
    let buy = factor * sol.bought_length(m);
    let rent: f64 = if seq.problem == Problem::Cfl {
        sol.assignments
            .iter()
            .zip(&seq.requests)
            .map(|(a, r)| match (a, r) {
                (Some(x), Request::Terminal(i)) => m.d(*i, *x),
                _ => 0.0,
            })
            .sum()
    } else {
        sol.rented.iter().flatten().map(|&(u, v)| m.d(u, v)).sum()
    };
    let penalty: f64 = sol.penalties.iter().map(|&i| seq.penalty(i)).sum();
    let opening: f64 = sol.opened.iter().filter_map(|&x| seq.facility_cost(x)).sum();
    let (buy, rent, penalty, opening) = (buy + 0.0, rent + 0.0, penalty + 0.0, opening + 0.0);
    CostBreakdown { buy, rent, penalty, opening, total: buy + rent + penalty + opening }
}

/// Feasibility of every request served so far (`sol.served()` of them).
pub fn check_feasible(sol: &MultiGraphSolution, seq: &RequestSequence, m: &MetricSpace) -> Vec<bool> {
    let n = m.n();
    let mut uf = sol.bought_components(n);
    let root = seq.root;
    let served = sol.served().min(seq.len());
    let mut out = Vec::with_capacity(served);
    for i in 0..served {
        let q = &sol.rented[i];
        let ok = match seq.requests[i] {
            Request::Terminal(_) if seq.problem == Problem::Cfl => match sol.assignments[i] {
                Some(x) => {
                    sol.opened.contains(&x)
                        && seq.facility_cost(x).is_some()
                        && uf.connected(x, root.expect("validated"))
                }
                None => false,
            },
            Request::Terminal(p) => connected_with(&mut uf, q, n, p, root.expect("validated")),
            Request::Pair(s, t) => connected_with(&mut uf, q, n, s, t),
            Request::Requirement(s, t, r) => {
                let edges: Vec<(usize, usize, u64)> =
                    sol.bought.iter().map(|(&(u, v), &c)| (u, v, c as u64)).collect();
                max_flow(n, &edges, s, t, r as u64) >= r as u64
            }
            Request::Penalty(p, _) => {
                sol.penalties.contains(&i) || connected_with(&mut uf, q, n, p, root.expect("validated"))
            }
        };
        out.push(ok);
    }
    out
}

fn connected_with(uf: &mut UnionFind, extra: &[(usize, usize)], n: usize, a: usize, b: usize) -> bool {
    if uf.connected(a, b) {
        return true;
    }
    if extra.is_empty() {
        return false;
    }
    // Contract bought components, then see whether the rented edges close
    // the gap.
    let mut local = UnionFind::new(n);
    for &(u, v) in extra {
        local.union(uf.find(u), uf.find(v));
    }
    let (ra, rb) = (uf.find(a), uf.find(b));
    local.connected(ra, rb)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> MetricSpace {
        let pts: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        MetricSpace::from_points(&pts).unwrap()
    }

    #[test]
    fn srob_cost_breakdown() {
        // d(0,1) = 2 and d(2,1) = 5 with unit minimum spacing elsewhere.
        let m = line(&[0.0, 2.0, 7.0, 1.0]);
        let seq = RequestSequence::new(Problem::Srob, vec![Request::Terminal(1), Request::Terminal(2)])
            .with_root(0)
            .with_m(3.0);
        let mut sol = MultiGraphSolution::default();
        sol.begin_request();
        sol.buy(0, 1, 1);
        sol.begin_request();
        sol.rent(2, 1);
        let c = solution_cost(&sol, &seq, &m);
        assert_eq!((c.buy, c.rent, c.total), (6.0, 5.0, 11.0));
        assert_eq!(check_feasible(&sol, &seq, &m), vec![true, true]);
    }

    #[test]
    fn network_multiplicities() {
        let m = line(&[0.0, 1.0]);
        let seq = RequestSequence::new(Problem::SteinerNetwork, vec![Request::Requirement(0, 1, 5)]);
        let mut sol = MultiGraphSolution::default();
        sol.begin_request();
        sol.buy(0, 1, 8);
        assert_eq!(solution_cost(&sol, &seq, &m).total, 8.0);
        assert_eq!(check_feasible(&sol, &seq, &m), vec![true]);

        let mut thin = MultiGraphSolution::default();
        thin.begin_request();
        thin.buy(0, 1, 4);
        assert_eq!(check_feasible(&thin, &seq, &m), vec![false]);
    }

    #[test]
    fn penalty_satisfies_pcst() {
        let m = line(&[0.0, 1.0]);
        let seq = RequestSequence::new(Problem::Pcst, vec![Request::Penalty(1, 2.5)]).with_root(0);
        let mut sol = MultiGraphSolution::default();
        sol.begin_request();
        sol.penalties.insert(0);
        assert_eq!(solution_cost(&sol, &seq, &m).total, 2.5);
        assert_eq!(check_feasible(&sol, &seq, &m), vec![true]);
    }

    #[test]
    fn rented_edges_only_serve_their_request() {
        let m = line(&[0.0, 1.0, 2.0]);
        let seq = RequestSequence::new(Problem::Mrob, vec![Request::Pair(0, 2), Request::Pair(0, 2)]);
        let mut sol = MultiGraphSolution::default();
        sol.begin_request();
        sol.rent(0, 1);
        sol.rent(1, 2);
        sol.begin_request();
        sol.rent(0, 1);
        assert_eq!(check_feasible(&sol, &seq, &m), vec![true, false]);
        sol.buy(1, 2, 1);
        assert_eq!(check_feasible(&sol, &seq, &m), vec![true, true]);
    }
}
