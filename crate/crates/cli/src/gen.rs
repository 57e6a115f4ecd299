use crate::{CliError, Output};
use onlinenet::{gen_diamond_lb, gen_euclidean, gen_graph_metric, gen_requests, GenParams, Instance, Problem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Family {
    /// Uniform points in the unit cube.
    Euclidean,
    /// Shortest paths of a random connected graph.
    Graph,
    /// The greedy Steiner tree lower-bound family.
    Diamond,
}

#[derive(Debug, Clone, PartialEq, clap::Args)]
pub struct GenArgs {
    #[arg(long, value_enum, default_value = "euclidean")]
    pub family: Family,
    #[arg(long, default_value = "SteinerTree")]
    pub problem: Problem,
    #[arg(long, default_value_t = 16)]
    pub points: usize,
    #[arg(long, default_value_t = 10)]
    pub requests: usize,
    #[arg(long, default_value_t = 2)]
    pub dimension: usize,
    /// Extra edge probability for the graph family.
    #[arg(long, default_value_t = 0.2)]
    pub density: f64,
    /// Depth of the diamond family.
    #[arg(long, default_value_t = 3)]
    pub depth: u32,
    #[arg(long = "M", default_value_t = 4.0)]
    pub m: f64,
    #[arg(long, default_value_t = 4)]
    pub r_max: u32,
}

impl Default for GenArgs {
    fn default() -> Self {
        Self {
            family: Family::Euclidean,
            problem: Problem::SteinerTree,
            points: 16,
            requests: 10,
            dimension: 2,
            density: 0.2,
            depth: 3,
            m: 4.0,
            r_max: 4,
        }
    }
}

/// The metric is drawn from `seed`, the requests from `seed + 1`.
pub fn gen_instance(args: &GenArgs, seed: u64) -> Result<Instance, CliError> {
    let metric = match args.family {
        Family::Euclidean => gen_euclidean(args.points, args.dimension, seed),
        Family::Graph => gen_graph_metric(args.points, args.density, seed),
        Family::Diamond => {
            if args.problem != Problem::SteinerTree {
                return Err(CliError::schema("the diamond family is a SteinerTree instance"));
            }
            let d = gen_diamond_lb(args.depth).map_err(CliError::schema)?;
            return Instance::new(d.metric, d.seq).map_err(CliError::schema);
        }
    }
    .map_err(CliError::schema)?;
    let params = GenParams { m: args.m, r_max: args.r_max, ..GenParams::default() };
    let seq = gen_requests(args.problem, &metric, args.requests, seed.wrapping_add(1), &params);
    Instance::new(metric, seq).map_err(CliError::schema)
}

pub fn cmd_gen(args: &GenArgs, seed: u64) -> Result<Output, CliError> {
    let mut body = gen_instance(args, seed)?.to_json();
    body.push('\n');
    Ok(Output::new(body, crate::exit::OK))
}
