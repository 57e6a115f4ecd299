use onlinenet::checks::check_on_tree;
use onlinenet::{
    gen_euclidean, gen_graph_metric, gen_requests, run_instance, GenParams, Instance, MetricSpace,
    Problem, Request, RequestSequence,
};
use proptest::prelude::*;

fn instance(metric: &MetricSpace, problem: Problem, count: usize, seed: u64, m: f64) -> Instance {
    let params = GenParams { m, r_max: 4, ..GenParams::default() };
    Instance::new(metric.clone(), gen_requests(problem, metric, count, seed, &params)).unwrap()
}

/// Runs the instance and checks it against `trees` sampled HSTs, returning
/// the largest ratio seen per bound name.
fn verify(inst: &Instance, trees: u64, seed: u64) -> Vec<(&'static str, f64)> {
    let out = run_instance(inst).unwrap();
    assert_eq!(out.first_infeasible_prefix, None);
    assert!((out.accumulated - out.cost.total).abs() <= 1e-9 * out.cost.total.max(1.0));
    let mut worst: Vec<(&'static str, f64)> = Vec::new();
    for t in 0..trees {
        let check = check_on_tree(inst, &out.solution, &out.trace, seed + t).unwrap();
        assert!(check.violations.is_empty(), "{:?} tree {}: {:?}", inst.seq.problem, seed + t, check.violations);
        for b in &check.bounds {
            assert!(b.holds(), "{:?} tree {}: {:?}", inst.seq.problem, seed + t, b);
            match worst.iter_mut().find(|w| w.0 == b.name) {
                Some(w) => w.1 = w.1.max(b.ratio()),
                None => worst.push((b.name, b.ratio())),
            }
        }
    }
    worst
}

#[test]
fn every_problem_satisfies_its_tree_bounds() {
    for problem in Problem::ALL {
        for seed in 0..25u64 {
            let metric = gen_euclidean(14, 2, seed).unwrap();
            let m = [1.0, 2.0, 4.0, 8.0][seed as usize % 4];
            verify(&instance(&metric, problem, 18, seed, m), 6, 100 * seed);
        }
    }
}

#[test]
fn graph_metrics_satisfy_the_tree_bounds() {
    for problem in Problem::ALL {
        for seed in 0..10u64 {
            let metric = gen_graph_metric(12, 0.25, seed).unwrap();
            verify(&instance(&metric, problem, 15, seed + 50, 3.0), 4, seed);
        }
    }
}

#[test]
fn connected_facility_location_share_constant() {
    let mut worst = 0.0f64;
    for seed in 0..150u64 {
        let metric = gen_euclidean(12, 2, seed).unwrap();
        let m = [1.0, 2.0, 3.0, 5.0, 10.0][seed as usize % 5];
        let ratios = verify(&instance(&metric, Problem::Cfl, 20, seed, m), 8, seed);
        worst = worst.max(ratios.iter().find(|r| r.0 == "share").map_or(0.0, |r| r.1));
    }
    println!("largest CFL share / OPT_ROB(T_ext) ratio: {worst:.3}");
    assert!(worst <= 16.0);
}

#[test]
fn fractional_m_breaks_the_share_bound() {
    // One far terminal: with M below 1 the tree optimum buys its path for
    // M times the length, while the online share stays at the full class
    // value.
    let pts: Vec<Vec<f64>> = vec![vec![0.0], vec![1.0], vec![1000.0]];
    let metric = MetricSpace::from_points(&pts).unwrap();
    let seq = RequestSequence::new(Problem::Srob, vec![Request::Terminal(2)]).with_root(0).with_m(0.01);
    let inst = Instance::new(metric, seq).unwrap();
    let out = run_instance(&inst).unwrap();
    let check = check_on_tree(&inst, &out.solution, &out.trace, 0).unwrap();
    let share = check.bounds.iter().find(|b| b.name == "share").unwrap();
    assert!(!share.holds());
}

#[test]
fn empty_sequences_cost_nothing() {
    let metric = gen_euclidean(5, 2, 1).unwrap();
    for problem in Problem::ALL {
        let inst = instance(&metric, problem, 0, 1, 2.0);
        let out = run_instance(&inst).unwrap();
        assert_eq!(out.cost.total, 0.0);
        assert!(check_on_tree(&inst, &out.solution, &out.trace, 3).unwrap().violations.is_empty());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn every_prefix_stays_feasible(seed in any::<u64>(), n in 1usize..16, k in 0usize..25, m in 0u8..9) {
        let metric = gen_euclidean(n, 2, seed).unwrap();
        for problem in Problem::ALL {
            let out = run_instance(&instance(&metric, problem, k, seed ^ 7, m as f64)).unwrap();
            prop_assert_eq!(out.first_infeasible_prefix, None);
        }
    }
}
