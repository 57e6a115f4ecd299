use onlinenet::offline::{
    dreyfus_wagner_st, exact_cfl, exact_fl, exact_mrob, exact_pcst, exact_sf, exact_srob,
    exact_sn_tiny,
};
use onlinenet::{run_instance, Facility, Instance, MetricSpace, Problem, Request, RequestSequence};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Shortest-path metric of a random connected graph with integer weights
/// in `1..=6`, one of them 1, so every distance is an exact integer.
fn integer_metric(n: usize, rng: &mut ChaCha8Rng) -> MetricSpace {
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for v in 1..n {
        let u = rng.gen_range(0..v);
        let w = if v == 1 { 1.0 } else { rng.gen_range(1..=6) as f64 };
        d[u][v] = w;
        d[v][u] = w;
    }
    for _ in 0..n {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v {
            let w = rng.gen_range(1..=6) as f64;
            d[u][v] = d[u][v].min(w);
            d[v][u] = d[u][v];
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
            }
        }
    }
    MetricSpace::from_matrix(&d).unwrap()
}

#[test]
fn dreyfus_wagner_matches_forest_on_rooted_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..150 {
        let n = rng.gen_range(2..=8);
        let m = integer_metric(n, &mut rng);
        let mut pts: Vec<usize> = (0..n).collect();
        pts.shuffle(&mut rng);
        let k = rng.gen_range(1..=n.min(6));
        let (r, rest) = (pts[0], &pts[1..k]);
        let pairs: Vec<(usize, usize)> = rest.iter().map(|&t| (t, r)).collect();
        assert_eq!(dreyfus_wagner_st(&m, &pts[..k]).unwrap(), exact_sf(&m, &pairs).unwrap(), "case {case}");
    }
}

#[test]
fn single_source_matches_multi_source_on_rooted_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for case in 0..150 {
        let n = rng.gen_range(2..=7);
        let m = integer_metric(n, &mut rng);
        let r = rng.gen_range(0..n);
        let terms: Vec<usize> = (0..rng.gen_range(0..6)).map(|_| rng.gen_range(0..n)).collect();
        let pairs: Vec<(usize, usize)> = terms.iter().map(|&t| (t, r)).collect();
        let big_m = rng.gen_range(0..=4) as f64;
        assert_eq!(
            exact_srob(&m, r, &terms, big_m).unwrap(),
            exact_mrob(&m, &pairs, big_m).unwrap(),
            "case {case}"
        );
    }
}

#[test]
fn facility_location_and_rent_or_buy_bound_connected_facility_location() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for case in 0..100 {
        let n = rng.gen_range(2..=7);
        let m = integer_metric(n, &mut rng);
        let r = 0;
        let mut facilities = vec![Facility { point: r, cost: 0.0 }];
        for p in 1..n {
            if rng.gen_bool(0.5) {
                facilities.push(Facility { point: p, cost: rng.gen_range(0..6) as f64 });
            }
        }
        let clients: Vec<usize> = (0..rng.gen_range(0..6)).map(|_| rng.gen_range(0..n)).collect();
        let big_m = rng.gen_range(1..=4) as f64;
        let cfl = exact_cfl(&m, &facilities, &clients, big_m, r).unwrap();
        assert!(exact_fl(&m, &facilities, &clients).unwrap() <= cfl, "case {case}");
        assert!(exact_srob(&m, r, &clients, big_m).unwrap() <= cfl, "case {case}");
    }
}

#[test]
fn online_costs_never_beat_the_offline_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for case in 0..60 {
        let n = rng.gen_range(2..=6);
        let m = integer_metric(n, &mut rng);
        let k = rng.gen_range(1..=5);
        let terms: Vec<usize> = (0..k).map(|_| rng.gen_range(0..n)).collect();
        let pairs: Vec<(usize, usize)> = (0..k).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
        let big_m = rng.gen_range(1..=3) as f64;

        let seq = |problem, requests: Vec<Request>| {
            let mut s = RequestSequence::new(problem, requests);
            if problem.is_rooted() {
                s = s.with_root(0);
            }
            if problem.uses_m() {
                s = s.with_m(big_m);
            }
            if problem == Problem::Cfl {
                s = s.with_facilities((0..n).map(|p| Facility { point: p, cost: p as f64 }).collect());
            }
            s
        };
        let cost = |s: RequestSequence| run_instance(&Instance::new(m.clone(), s).unwrap()).unwrap().cost.total;

        let mut st_terms = terms.clone();
        st_terms.push(0);
        let term_reqs: Vec<Request> = terms.iter().map(|&p| Request::Terminal(p)).collect();
        let pair_reqs: Vec<Request> = pairs.iter().map(|&(s, t)| Request::Pair(s, t)).collect();
        let opt_st = dreyfus_wagner_st(&m, &st_terms).unwrap();
        assert!(opt_st <= cost(seq(Problem::SteinerTree, term_reqs.clone())), "case {case}");
        assert!(exact_sf(&m, &pairs).unwrap() <= cost(seq(Problem::SteinerForest, pair_reqs.clone())), "case {case}");
        assert!(exact_srob(&m, 0, &terms, big_m).unwrap() <= cost(seq(Problem::Srob, term_reqs.clone())), "case {case}");
        assert!(exact_mrob(&m, &pairs, big_m).unwrap() <= cost(seq(Problem::Mrob, pair_reqs)), "case {case}");
        let facilities: Vec<Facility> = (0..n).map(|p| Facility { point: p, cost: p as f64 }).collect();
        assert!(exact_cfl(&m, &facilities, &terms, big_m, 0).unwrap() <= cost(seq(Problem::Cfl, term_reqs)), "case {case}");
        let pens: Vec<(usize, f64)> = terms.iter().map(|&p| (p, rng.gen_range(0..10) as f64)).collect();
        let pen_reqs: Vec<Request> = pens.iter().map(|&(p, pi)| Request::Penalty(p, pi)).collect();
        assert!(exact_pcst(&m, 0, &pens).unwrap() <= cost(seq(Problem::Pcst, pen_reqs)), "case {case}");
        if n <= 4 {
            let reqs: Vec<(usize, usize, u32)> =
                pairs.iter().take(2).map(|&(s, t)| (s, t, rng.gen_range(1..=2))).collect();
            let sn_reqs: Vec<Request> = reqs.iter().map(|&(s, t, r)| Request::Requirement(s, t, r)).collect();
            assert!(exact_sn_tiny(&m, &reqs).unwrap() <= cost(seq(Problem::SteinerNetwork, sn_reqs)), "case {case}");
        }
    }
}
