use crate::{exit, CliError, Output};
use onlinenet::offline::{
    dreyfus_wagner_st, exact_cfl, exact_mrob, exact_pcst, exact_sf, exact_sn_tiny, exact_srob,
    MAX_MROB_POINTS, MAX_SN_POINTS, MAX_SN_REQUIREMENT,
};
use onlinenet::{
    gen_diamond_lb, gen_euclidean, gen_requests, run_instance, GenParams, Instance, OracleError,
    Problem, Request,
};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum RatioFamily {
    /// Random points in the unit square; sizes are request counts.
    Euclidean,
    /// The greedy Steiner tree lower-bound family; sizes are depths.
    Diamond,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioRow {
    pub problem: Problem,
    pub k: usize,
    pub n: usize,
    #[serde(rename = "M")]
    pub m: f64,
    pub alg_cost: f64,
    pub opt_cost: f64,
    pub ratio: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeMax {
    pub problem: Problem,
    pub k: usize,
    pub max_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioSummary {
    pub per_size: Vec<SizeMax>,
    /// Least-squares `c` in `ratio ≈ c·log2(k)` over rows with `k ≥ 2`.
    pub fitted_c: f64,
}

pub const CSV_HEADER: &str = "problem,k,n,M,alg_cost,opt_cost,ratio,seed";

impl RatioRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.problem, self.k, self.n, self.m, self.alg_cost, self.opt_cost, self.ratio, self.seed
        )
    }
}

/// Number of metric points used for `k` requests, so that the exact oracle
/// stays within its cap.
fn points_for(problem: Problem, k: usize) -> usize {
    match problem {
        Problem::SteinerNetwork => MAX_SN_POINTS,
        Problem::Mrob => k.clamp(2, MAX_MROB_POINTS),
        _ => k.max(2),
    }
}

fn offline_opt(inst: &Instance) -> Result<f64, OracleError> {
    let seq = &inst.seq;
    let m = &inst.metric;
    let root = || seq.root.expect("rooted problem");
    let terminals = || seq.requests.iter().filter_map(|r| if let Request::Terminal(p) = r { Some(*p) } else { None });
    let pairs = || seq.requests.iter().filter_map(|r| r.endpoints()).collect::<Vec<_>>();
    match seq.problem {
        Problem::SteinerTree => {
            let mut pts: Vec<usize> = terminals().collect();
            pts.push(root());
            dreyfus_wagner_st(m, &pts)
        }
        Problem::SteinerForest => exact_sf(m, &pairs()),
        Problem::SteinerNetwork => {
            let reqs: Vec<(usize, usize, u32)> = seq
                .requests
                .iter()
                .filter_map(|r| if let Request::Requirement(s, t, k) = r { Some((*s, *t, *k)) } else { None })
                .collect();
            exact_sn_tiny(m, &reqs)
        }
        Problem::Srob => exact_srob(m, root(), &terminals().collect::<Vec<_>>(), seq.m),
        Problem::Mrob => exact_mrob(m, &pairs(), seq.m),
        Problem::Cfl => exact_cfl(m, &seq.facilities, &terminals().collect::<Vec<_>>(), seq.m, root()),
        Problem::Pcst => {
            let terms: Vec<(usize, f64)> = seq
                .requests
                .iter()
                .filter_map(|r| if let Request::Penalty(p, pi) = r { Some((*p, *pi)) } else { None })
                .collect();
            exact_pcst(m, root(), &terms)
        }
    }
}

fn ratio(alg: f64, opt: f64) -> f64 {
    if alg == 0.0 && opt == 0.0 {
        1.0
    } else {
        alg / opt
    }
}

fn row(inst: &Instance, k: usize, seed: u64, opt: Option<f64>) -> Result<RatioRow, CliError> {
    let alg = run_instance(inst).map_err(CliError::schema)?.cost.total;
    let opt = match opt {
        Some(v) => v,
        None => offline_opt(inst).map_err(CliError::oracle_cap)?,
    };
    Ok(RatioRow {
        problem: inst.seq.problem,
        k,
        n: inst.metric.n(),
        m: inst.seq.m,
        alg_cost: alg,
        opt_cost: opt,
        ratio: ratio(alg, opt),
        seed,
    })
}

/// One row per `(size, trial)`, in that order. Trial `t` uses seed
/// `seed + t` for both the metric and the requests. Rows are computed in
/// parallel on the ambient thread pool.
pub fn ratio_rows(
    family: RatioFamily,
    problem: Problem,
    sizes: &[usize],
    trials: usize,
    seed: u64,
    m: f64,
) -> Result<Vec<RatioRow>, CliError> {
    let tasks: Vec<(usize, u64)> =
        sizes.iter().flat_map(|&k| (0..trials as u64).map(move |t| (k, seed.wrapping_add(t)))).collect();
    match family {
        RatioFamily::Diamond => {
            if problem != Problem::SteinerTree {
                return Err(CliError::schema("the diamond family is a SteinerTree instance"));
            }
            tasks
                .par_iter()
                .map(|&(depth, s)| {
                    let d = gen_diamond_lb(depth as u32).map_err(CliError::oracle_cap)?;
                    let inst = Instance::new(d.metric, d.seq).map_err(CliError::schema)?;
                    row(&inst, inst.seq.len(), s, Some(d.opt))
                })
                .collect()
        }
        RatioFamily::Euclidean => tasks
            .par_iter()
            .map(|&(k, s)| {
                let metric = gen_euclidean(points_for(problem, k), 2, s).map_err(CliError::schema)?;
                let params = GenParams { m, r_max: MAX_SN_REQUIREMENT, ..GenParams::default() };
                let inst = Instance::new(metric.clone(), gen_requests(problem, &metric, k, s, &params))
                    .map_err(CliError::schema)?;
                row(&inst, k, s, None)
            })
            .collect(),
    }
}

pub fn ratio_summary(rows: &[RatioRow]) -> RatioSummary {
    let mut per_size: Vec<SizeMax> = Vec::new();
    for r in rows {
        match per_size.iter_mut().find(|s| s.problem == r.problem && s.k == r.k) {
            Some(s) => s.max_ratio = s.max_ratio.max(r.ratio),
            None => per_size.push(SizeMax { problem: r.problem, k: r.k, max_ratio: r.ratio }),
        }
    }
    let (mut xy, mut xx) = (0.0, 0.0);
    for r in rows.iter().filter(|r| r.k >= 2 && r.ratio.is_finite()) {
        let x = (r.k as f64).log2();
        xy += x * r.ratio;
        xx += x * x;
    }
    RatioSummary { per_size, fitted_c: if xx > 0.0 { xy / xx } else { 0.0 } }
}

/// CSV rows as the body; the summary as JSON on the log channel.
pub fn cmd_ratio(
    family: RatioFamily,
    problem: Problem,
    sizes: &[usize],
    trials: usize,
    seed: u64,
    m: f64,
) -> Result<Output, CliError> {
    let rows = ratio_rows(family, problem, sizes, trials, seed, m)?;
    let mut body = String::from(CSV_HEADER);
    body.push('\n');
    for r in &rows {
        body.push_str(&r.csv());
        body.push('\n');
    }
    let mut out = Output::new(body, exit::OK);
    out.log = crate::to_json(&ratio_summary(&rows));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_terminal_has_ratio_one() {
        for problem in [Problem::SteinerTree, Problem::Srob] {
            let rows = ratio_rows(RatioFamily::Euclidean, problem, &[1], 5, 3, 4.0).unwrap();
            assert!(rows.iter().all(|r| r.ratio == 1.0), "{problem}: {rows:?}");
        }
    }

    #[test]
    fn diamond_ratios_increase() {
        let rows = ratio_rows(RatioFamily::Diamond, Problem::SteinerTree, &[1, 2, 3, 4, 5], 1, 0, 1.0).unwrap();
        assert!(rows.windows(2).all(|w| w[0].ratio < w[1].ratio));
        let summary = ratio_summary(&rows);
        assert_eq!(summary.per_size.len(), 5);
        assert!(summary.fitted_c > 0.0);
    }

    #[test]
    fn oracle_cap_exits_five() {
        let err = ratio_rows(RatioFamily::Euclidean, Problem::SteinerTree, &[40], 1, 0, 1.0).unwrap_err();
        assert_eq!(err.code, exit::ORACLE_CAP);
        let err = ratio_rows(RatioFamily::Diamond, Problem::SteinerTree, &[11], 1, 0, 1.0).unwrap_err();
        assert_eq!(err.code, exit::ORACLE_CAP);
    }

    #[test]
    fn rows_are_deterministic() {
        let a = cmd_ratio(RatioFamily::Euclidean, Problem::Mrob, &[4, 6], 3, 9, 2.0).unwrap();
        let b = cmd_ratio(RatioFamily::Euclidean, Problem::Mrob, &[4, 6], 3, 9, 2.0).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.body.lines().count(), 7);
    }
}
