//! Online network design on metric spaces.
//!
//! Deterministic online algorithms for Steiner tree, Steiner forest,
//! Steiner network with edge duplication, single- and multi-source
//! rent-or-buy, connected facility location and prize-collecting Steiner
//! tree, plus the machinery used to analyse them: random HST embeddings,
//! exact optimal values on trees, exact offline optima for small instances,
//! and executable versions of every charging argument.

pub mod cfl;
pub mod checks;
pub mod error;
pub mod gen;
pub mod graph;
pub mod hst;
pub mod metric;
pub mod offline;
pub mod online;
pub mod prize;
pub mod rentorbuy;
pub mod request;
pub mod solution;
pub mod steiner;
pub mod trace;
pub mod tree_brute;
pub mod tree_opt;

pub use error::{CheckError, GenError, HstError, MetricError, OracleError, RequestError};
pub use hst::{sample_frt, validate_hst, Hst, HstNode, HstViolation};
pub use metric::{class_of, MetricSpace};
pub use request::{Facility, Instance, InstanceError, Problem, Request, RequestSequence};
pub use solution::{check_feasible, solution_cost, CostBreakdown, MultiGraphSolution};
pub use trace::{Decision, RunTrace, TraceRecord};
pub use online::{algorithm_for, run_instance, run_unchecked, OnlineAlgorithm, RunOutcome};
pub use gen::{gen_diamond_lb, gen_euclidean, gen_graph_metric, gen_requests, DiamondInstance, GenParams};
