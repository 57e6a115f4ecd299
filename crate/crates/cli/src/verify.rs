use crate::run::run_record;
use crate::{exit, load_instance, read_text, to_json, CliError, Output};
use onlinenet::checks::{check_on_tree, TreeCheck};
use onlinenet::{CheckError, Instance, Problem, RunTrace};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::Path;

/// Violation details kept in a report; the counts are always complete.
const MAX_DETAILS: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundSummary {
    pub name: &'static str,
    pub factor: f64,
    pub max_ratio: f64,
    /// Tree seed at which `max_ratio` was observed.
    pub worst_tree_seed: u64,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolationRecord {
    pub tree_seed: Option<u64>,
    pub check: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub problem: Problem,
    pub algo: &'static str,
    pub requests: usize,
    pub trials: usize,
    pub seed: u64,
    pub cost: f64,
    pub feasible_throughout: bool,
    pub bounds: Vec<BoundSummary>,
    /// Trees on which every structural check passed.
    pub clean_trees: usize,
    pub violation_counts: BTreeMap<String, usize>,
    pub violations: Vec<ViolationRecord>,
    pub ok: bool,
}

impl VerifyReport {
    pub fn total_violations(&self) -> usize {
        self.violation_counts.values().sum()
    }

    pub fn bound(&self, name: &str) -> Option<&BoundSummary> {
        self.bounds.iter().find(|b| b.name == name)
    }
}

fn note(report: &mut VerifyReport, tree_seed: Option<u64>, check: String, detail: String) {
    *report.violation_counts.entry(check.clone()).or_default() += 1;
    if report.violations.len() < MAX_DETAILS {
        report.violations.push(ViolationRecord { tree_seed, check, detail });
    }
}

/// Runs the instance once, then checks the run (or `forged`, a trace read
/// from elsewhere, in its place) against `trials` HSTs sampled with seeds
/// `seed, seed + 1, ...`. Trees are checked in parallel on the ambient
/// thread pool; results are merged in seed order.
pub fn verify_report(
    inst: &Instance,
    algo: Option<&str>,
    forged: Option<RunTrace>,
    trials: usize,
    seed: u64,
) -> Result<VerifyReport, CliError> {
    if trials == 0 {
        return Err(CliError::schema("verify needs at least one trial"));
    }
    let (record, out) = run_record(inst, algo)?;
    let trace = match forged {
        Some(t) if t.problem != inst.seq.problem => {
            return Err(CliError::schema(format!("trace is for {}, instance is {}", t.problem, inst.seq.problem)))
        }
        Some(t) => t,
        None => out.trace,
    };
    let checks: Vec<(u64, Result<TreeCheck, CheckError>)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let tree_seed = seed.wrapping_add(t);
            (tree_seed, check_on_tree(inst, &out.solution, &trace, tree_seed))
        })
        .collect();

    let mut report = VerifyReport {
        problem: inst.seq.problem,
        algo: record.algo,
        requests: record.requests,
        trials,
        seed,
        cost: record.cost.total,
        feasible_throughout: record.feasible_throughout,
        bounds: Vec::new(),
        clean_trees: 0,
        violation_counts: BTreeMap::new(),
        violations: Vec::new(),
        ok: false,
    };
    if let Some(i) = record.first_infeasible_prefix {
        note(&mut report, None, "feasibility".into(), format!("infeasible after request {i}"));
    }
    for (tree_seed, result) in checks {
        let check = match result {
            Ok(c) => c,
            Err(e) => {
                note(&mut report, Some(tree_seed), "check error".into(), e.to_string());
                continue;
            }
        };
        if check.violations.is_empty() {
            report.clean_trees += 1;
        }
        for v in check.violations {
            note(&mut report, Some(tree_seed), v.check.to_string(), v.detail);
        }
        for b in check.bounds {
            let holds = b.holds();
            let ratio = b.ratio();
            let idx = match report.bounds.iter().position(|s| s.name == b.name) {
                Some(i) => i,
                None => {
                    report.bounds.push(BoundSummary {
                        name: b.name,
                        factor: b.factor,
                        max_ratio: ratio,
                        worst_tree_seed: tree_seed,
                        passed: 0,
                        failed: 0,
                    });
                    report.bounds.len() - 1
                }
            };
            let s = &mut report.bounds[idx];
            if ratio > s.max_ratio {
                s.max_ratio = ratio;
                s.worst_tree_seed = tree_seed;
            }
            if holds {
                s.passed += 1;
            } else {
                s.failed += 1;
                let detail = format!("{} = {} exceeds {} x {}", b.name, b.lhs, b.factor, b.opt);
                note(&mut report, Some(tree_seed), format!("bound {}", b.name), detail);
            }
        }
    }
    report.ok = report.violation_counts.is_empty();
    Ok(report)
}

/// Exits 4 when any check or bound fails; the report names the tree seed
/// of every failure.
pub fn cmd_verify(
    instance: &Path,
    algo: Option<&str>,
    trace: Option<&Path>,
    trials: usize,
    seed: u64,
) -> Result<Output, CliError> {
    let inst = load_instance(instance)?;
    let forged = match trace {
        Some(path) => Some(
            RunTrace::from_jsonl(inst.seq.problem, inst.seq.root, inst.seq.m, &read_text(path)?)
                .map_err(|e| CliError::schema(format!("{}: {e}", path.display())))?,
        ),
        None => None,
    };
    let report = verify_report(&inst, algo, forged, trials, seed)?;
    let code = if report.ok { exit::OK } else { exit::VIOLATION };
    Ok(Output::new(to_json(&report), code))
}

#[cfg(test)]
mod tests {
    use super::*;
    use onlinenet::{Decision, MetricSpace, Request, RequestSequence};

    fn collinear() -> Instance {
        let m = MetricSpace::from_points(&[vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let seq = RequestSequence::new(Problem::SteinerTree, vec![Request::Terminal(2), Request::Terminal(1)])
            .with_root(0);
        Instance::new(m, seq).unwrap()
    }

    #[test]
    fn collinear_greedy_passes() {
        let report = verify_report(&collinear(), Some("greedy"), None, 20, 0).unwrap();
        assert!(report.ok, "{report:?}");
        assert_eq!(report.bounds[0].passed, 20);
        assert!(report.bounds[0].max_ratio <= 4.0);
    }

    #[test]
    fn forged_trace_is_caught() {
        let inst = collinear();
        let (_, out) = run_record(&inst, None).unwrap();
        let mut forged = out.trace.clone();
        // Claim the second terminal connected in the same class as the
        // first while sitting next to it.
        forged.records[1].class = forged.records[0].class;
        forged.records[1].decision = Decision::Connect;
        let report = verify_report(&inst, None, Some(forged), 5, 0).unwrap();
        assert!(!report.ok);
        assert!(report.violations.iter().all(|v| v.tree_seed.is_some()));
    }

    #[test]
    fn zero_trials_is_rejected() {
        assert_eq!(verify_report(&collinear(), None, None, 0, 0).unwrap_err().code, exit::SCHEMA);
    }
}
