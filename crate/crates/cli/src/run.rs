use crate::{algorithm_name, check_algo, exit, load_instance, to_json, CliError, Output};
use onlinenet::{run_instance, CostBreakdown, Instance, Problem, RunOutcome};
use serde::Serialize;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub problem: Problem,
    pub algo: &'static str,
    pub requests: usize,
    pub cost: CostBreakdown,
    /// Sum of the per-request costs the algorithm reported.
    pub accumulated: f64,
    pub feasible_throughout: bool,
    pub first_infeasible_prefix: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace_path: Option<String>,
}

pub fn run_record(inst: &Instance, algo: Option<&str>) -> Result<(RunRecord, RunOutcome), CliError> {
    check_algo(algo, inst.seq.problem)?;
    let out = run_instance(inst).map_err(CliError::schema)?;
    let record = RunRecord {
        problem: inst.seq.problem,
        algo: algorithm_name(inst.seq.problem),
        requests: inst.seq.len(),
        cost: out.cost,
        accumulated: out.accumulated,
        feasible_throughout: out.first_infeasible_prefix.is_none(),
        first_infeasible_prefix: out.first_infeasible_prefix,
        trace_path: None,
    };
    Ok((record, out))
}

/// Runs the instance file; exits 3 if some prefix was left infeasible.
pub fn cmd_run(instance: &Path, algo: Option<&str>, trace: Option<&Path>) -> Result<Output, CliError> {
    let inst = load_instance(instance)?;
    let (mut record, out) = run_record(&inst, algo)?;
    if let Some(path) = trace {
        std::fs::write(path, out.trace.to_jsonl()).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        record.trace_path = Some(path.display().to_string());
    }
    let code = if record.feasible_throughout { exit::OK } else { exit::INFEASIBLE };
    Ok(Output::new(to_json(&record), code))
}

#[cfg(test)]
mod tests {
    use super::*;
    use onlinenet::{MetricSpace, Request, RequestSequence};

    fn pair_metric() -> MetricSpace {
        MetricSpace::from_points(&[vec![0.0], vec![1.0]]).unwrap()
    }

    #[test]
    fn single_pair_network_costs_eight() {
        let seq = RequestSequence::new(Problem::SteinerNetwork, vec![Request::Requirement(0, 1, 5)]);
        let inst = Instance::new(pair_metric(), seq).unwrap();
        let (record, _) = run_record(&inst, Some("sn")).unwrap();
        assert_eq!(record.cost.total, 8.0);
        assert!(record.feasible_throughout);
    }

    #[test]
    fn empty_requests_cost_nothing() {
        let seq = RequestSequence::new(Problem::SteinerTree, vec![]).with_root(0);
        let inst = Instance::new(pair_metric(), seq).unwrap();
        assert_eq!(run_record(&inst, None).unwrap().0.cost.total, 0.0);
    }

    #[test]
    fn mismatched_algorithm_is_a_schema_error() {
        let seq = RequestSequence::new(Problem::SteinerTree, vec![Request::Terminal(1)]).with_root(0);
        let inst = Instance::new(pair_metric(), seq).unwrap();
        assert_eq!(run_record(&inst, Some("mrob")).unwrap_err().code, exit::SCHEMA);
    }
}
