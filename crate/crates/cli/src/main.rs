use clap::{Parser, Subcommand};
use onlinenet::Problem;
use onlinenet_cli::ratio::{cmd_ratio, RatioFamily};
use onlinenet_cli::{embed, gen, run, verify, with_jobs, CliError, GenArgs, Output};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

/// Online network design harness: generate instances, run the online
/// algorithms, verify them against sampled tree embeddings, and measure
/// competitive ratios against exact offline optima.
#[derive(Debug, Parser)]
#[command(name = "onlinenet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Sampled trees (verify, embed) or instances per size (ratio).
    #[arg(long, global = true, default_value_t = 20)]
    trials: usize,
    /// Worker threads; 0 uses one per core.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate an instance file.
    Gen(GenArgs),
    /// Run the online algorithm on an instance.
    Run {
        instance: PathBuf,
        #[arg(long)]
        algo: Option<String>,
        /// Write the decision trace (JSON lines) here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Check a run against its per-tree bounds and structural invariants.
    Verify {
        instance: PathBuf,
        #[arg(long)]
        algo: Option<String>,
        /// Check this trace file instead of a fresh run's trace.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Empirical competitive ratios against exact offline optima (CSV).
    Ratio {
        #[arg(long, value_enum, default_value = "euclidean")]
        family: RatioFamily,
        #[arg(long, default_value = "SteinerTree")]
        problem: Problem,
        #[arg(long, value_delimiter = ',', default_value = "4,6,8,10")]
        sizes: Vec<usize>,
        #[arg(long = "M", default_value_t = 4.0)]
        m: f64,
    },
    /// Sample tree embeddings of an instance's metric and report stretch.
    Embed { instance: PathBuf },
}

fn dispatch(cli: &Cli) -> Result<Output, CliError> {
    match &cli.command {
        Command::Gen(args) => gen::cmd_gen(args, cli.seed),
        Command::Run { instance, algo, trace } => run::cmd_run(instance, algo.as_deref(), trace.as_deref()),
        Command::Verify { instance, algo, trace } => {
            verify::cmd_verify(instance, algo.as_deref(), trace.as_deref(), cli.trials, cli.seed)
        }
        Command::Ratio { family, problem, sizes, m } => {
            cmd_ratio(*family, *problem, sizes, cli.trials, cli.seed, *m)
        }
        Command::Embed { instance } => embed::cmd_embed(instance, cli.trials, cli.seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = with_jobs(cli.jobs, || dispatch(&cli)).and_then(|out| {
        match &cli.out {
            Some(path) => std::fs::write(path, &out.body)
                .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?,
            None => std::io::stdout()
                .write_all(out.body.as_bytes())
                .map_err(|e| CliError::io(format!("stdout: {e}")))?,
        }
        eprint!("{}", out.log);
        Ok(out.code)
    });
    let code = result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.code
    });
    ExitCode::from(code as u8)
}
