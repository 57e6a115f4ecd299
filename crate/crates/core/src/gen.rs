//! Instance families: random Euclidean and graph metrics, random request
//! sequences, and a lower-bound family for greedy Steiner tree.

use crate::error::GenError;
use crate::metric::MetricSpace;
use crate::request::{Facility, Problem, Request, RequestSequence};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const MAX_DIAMOND_DEPTH: u32 = 10;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` uniform points in the unit cube of the given dimension,
/// normalized so the closest pair is at distance 1.
pub fn gen_euclidean(count: usize, dimension: usize, seed: u64) -> Result<MetricSpace, GenError> {
    if count == 0 {
        return Err(GenError::NoPoints);
    }
    let mut r = rng(seed);
    let pts: Vec<Vec<f64>> =
        (0..count).map(|_| (0..dimension.max(1)).map(|_| r.gen::<f64>()).collect()).collect();
    Ok(MetricSpace::from_points(&pts).expect("finite coordinates form a metric"))
}

/// Shortest-path metric of a random connected graph: a random spanning
/// tree plus every other edge with probability `density`, weights uniform
/// in `[1, 4)`.
pub fn gen_graph_metric(vertices: usize, density: f64, seed: u64) -> Result<MetricSpace, GenError> {
    if vertices == 0 {
        return Err(GenError::NoPoints);
    }
    let n = vertices;
    let mut r = rng(seed);
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0.0;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut r);
    for k in 1..n {
        let (u, v) = (order[k], order[r.gen_range(0..k)]);
        let w = r.gen_range(1.0..4.0);
        d[u][v] = w;
        d[v][u] = w;
    }
    for u in 0..n {
        for v in u + 1..n {
            if d[u][v].is_infinite() && r.gen_bool(density.clamp(0.0, 1.0)) {
                let w = r.gen_range(1.0..4.0);
                d[u][v] = w;
                d[v][u] = w;
            }
        }
    }
    for w in 0..n {
        for u in 0..n {
            for v in 0..n {
                let x = d[u][w] + d[w][v];
                if x < d[u][v] {
                    d[u][v] = x;
                }
            }
        }
    }
    Ok(MetricSpace::from_matrix(&d).expect("shortest-path closure is a metric"))
}

/// A greedy Steiner tree lower-bound instance.
#[derive(Debug, Clone, PartialEq)]
pub struct DiamondInstance {
    pub metric: MetricSpace,
    pub seq: RequestSequence,
    /// Optimal Steiner tree cost.
    pub opt: f64,
    /// Cost of greedy on the given order.
    pub greedy: f64,
}

/// The terminals of a recursive diamond along one of its geodesics: points
/// `0..=2^depth` on a line, the root at 0, then the far end, then the
/// midpoints of every remaining gap, level by level. Each level of `2^(ℓ-1)`
/// midpoints costs greedy `2^(depth-1)`, so greedy pays
/// `2^depth · (1 + depth/2)` while the optimum is `2^depth`.
pub fn gen_diamond_lb(depth: u32) -> Result<DiamondInstance, GenError> {
    if depth > MAX_DIAMOND_DEPTH {
        return Err(GenError::DepthTooLarge(depth));
    }
    let span = 1usize << depth;
    let pts: Vec<Vec<f64>> = (0..=span).map(|x| vec![x as f64]).collect();
    let metric = MetricSpace::from_points(&pts).expect("line metric");
    let mut requests = vec![Request::Terminal(span)];
    for level in 1..=depth {
        let step = span >> level;
        requests.extend((0..(1usize << (level - 1))).map(|k| Request::Terminal(step * (2 * k + 1))));
    }
    let opt = span as f64;
    Ok(DiamondInstance {
        metric,
        seq: RequestSequence::new(Problem::SteinerTree, requests).with_root(0),
        opt,
        greedy: opt * (1.0 + depth as f64 / 2.0),
    })
}

/// Knobs for [`gen_requests`].
#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub m: f64,
    pub r_max: u32,
    pub root: usize,
    /// Probability that a non-root point hosts a facility.
    pub facility_fraction: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        Self { m: 4.0, r_max: 4, root: 0, facility_fraction: 0.5 }
    }
}

/// `count` uniform random requests of the given problem. Pair endpoints are
/// distinct when the metric has two or more points; requirements are
/// log-uniform in `[1, r_max]`; penalties uniform in `[0, 2·diameter]`;
/// facility opening costs uniform in `[0, diameter]`, the root free.
pub fn gen_requests(
    problem: Problem,
    metric: &MetricSpace,
    count: usize,
    seed: u64,
    params: &GenParams,
) -> RequestSequence {
    let mut r = rng(seed);
    let n = metric.n();
    let diam = metric.diameter();
    let pair = |r: &mut ChaCha8Rng| {
        let s = r.gen_range(0..n);
        if n < 2 {
            return (s, s);
        }
        let mut t = r.gen_range(0..n - 1);
        if t >= s {
            t += 1;
        }
        (s, t)
    };
    let requests: Vec<Request> = (0..count)
        .map(|_| match problem {
            Problem::SteinerTree | Problem::Srob | Problem::Cfl => Request::Terminal(r.gen_range(0..n)),
            Problem::SteinerForest | Problem::Mrob => {
                let (s, t) = pair(&mut r);
                Request::Pair(s, t)
            }
            Problem::SteinerNetwork => {
                let (s, t) = pair(&mut r);
                let top = params.r_max.max(1) as f64;
                let x = (r.gen::<f64>() * (top + 1.0).ln()).exp().floor();
                Request::Requirement(s, t, (x as u32).clamp(1, params.r_max.max(1)))
            }
            Problem::Pcst => Request::Penalty(r.gen_range(0..n), r.gen::<f64>() * 2.0 * diam),
        })
        .collect();
    let mut seq = RequestSequence::new(problem, requests);
    if problem.is_rooted() {
        seq = seq.with_root(params.root);
    }
    if problem.uses_m() {
        seq = seq.with_m(params.m);
    }
    if problem == Problem::Cfl {
        let mut facilities = vec![Facility { point: params.root, cost: 0.0 }];
        for p in (0..n).filter(|&p| p != params.root) {
            if r.gen_bool(params.facility_fraction.clamp(0.0, 1.0)) {
                facilities.push(Facility { point: p, cost: r.gen::<f64>() * diam });
            }
        }
        seq = seq.with_facilities(facilities);
    }
    seq
}
