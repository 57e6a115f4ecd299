//! The `onlinenet` command-line harness as a library: every subcommand is a
//! function from its inputs to a serializable report, so tests can call
//! them without spawning a process.

pub mod embed;
pub mod gen;
pub mod ratio;
pub mod run;
pub mod verify;

use onlinenet::{Instance, Problem};
use std::fmt;
use std::path::Path;

pub use embed::{embed_report, EmbedReport, PairStretch};
pub use gen::{gen_instance, Family, GenArgs};
pub use ratio::{ratio_rows, ratio_summary, RatioFamily, RatioRow, RatioSummary};
pub use run::{run_record, RunRecord};
pub use verify::{verify_report, BoundSummary, VerifyReport};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const SCHEMA: i32 = 2;
    pub const INFEASIBLE: i32 = 3;
    pub const VIOLATION: i32 = 4;
    pub const ORACLE_CAP: i32 = 5;
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn schema(message: impl fmt::Display) -> Self {
        Self { code: exit::SCHEMA, message: message.to_string() }
    }

    pub fn io(message: impl fmt::Display) -> Self {
        Self { code: exit::IO, message: message.to_string() }
    }

    pub fn oracle_cap(message: impl fmt::Display) -> Self {
        Self { code: exit::ORACLE_CAP, message: message.to_string() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

/// A command's result: the text to write and the exit code to return.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub body: String,
    pub code: i32,
    /// Human-oriented summary for standard error.
    pub log: String,
}

impl Output {
    pub fn new(body: String, code: i32) -> Self {
        Self { body, code, log: String::new() }
    }
}

/// Algorithm names accepted by `--algo`, one per problem.
pub const ALGORITHMS: [(&str, Problem); 7] = [
    ("greedy", Problem::SteinerTree),
    ("bc", Problem::SteinerForest),
    ("sn", Problem::SteinerNetwork),
    ("srob", Problem::Srob),
    ("mrob", Problem::Mrob),
    ("cfl", Problem::Cfl),
    ("pcst", Problem::Pcst),
];

pub fn algorithm_name(problem: Problem) -> &'static str {
    ALGORITHMS.iter().find(|a| a.1 == problem).expect("every problem has an algorithm").0
}

/// Checks that `algo` (if given) serves `problem`.
pub fn check_algo(algo: Option<&str>, problem: Problem) -> Result<(), CliError> {
    match algo {
        None => Ok(()),
        Some(name) => match ALGORITHMS.iter().find(|a| a.0.eq_ignore_ascii_case(name)) {
            Some(&(_, p)) if p == problem => Ok(()),
            Some(&(_, p)) => Err(CliError::schema(format!(
                "algorithm {name} solves {p}, but the instance is {problem}"
            ))),
            None => Err(CliError::schema(format!("unknown algorithm {name:?}"))),
        },
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

pub fn load_instance(path: &Path) -> Result<Instance, CliError> {
    Instance::from_json(&read_text(path)?).map_err(|e| CliError::schema(format!("{}: {e}", path.display())))
}

/// Runs `f` on a pool of `jobs` worker threads (0 means one per core).
pub fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool starts")
        .install(f)
}

pub(crate) fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_names_round_trip() {
        for p in Problem::ALL {
            assert!(check_algo(Some(algorithm_name(p)), p).is_ok());
        }
        assert!(check_algo(None, Problem::Pcst).is_ok());
        assert_eq!(check_algo(Some("bc"), Problem::SteinerTree).unwrap_err().code, exit::SCHEMA);
        assert_eq!(check_algo(Some("nope"), Problem::SteinerTree).unwrap_err().code, exit::SCHEMA);
    }
}
