//! `bethe`: generate block-model graphs, detect communities, score partitions,
//! run benchmark sweeps and trace spectra.

mod commands;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{benchmark, cluster, generate, score, spectrum};

#[derive(Debug, Parser)]
#[command(name = "bethe", version, about = "Community detection with parametrized Bethe-Hessians")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "BETHE_THREADS")]
    threads: Option<usize>,

    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a degree-corrected block-model graph.
    Generate(generate::Args),
    /// Detect communities (Algorithm 2).
    Cluster(cluster::Args),
    /// Score a partition of a graph.
    Score(score::Args),
    /// Compare all methods on a synthetic sweep or on a given graph.
    Benchmark(benchmark::Args),
    /// Trace Bethe-Hessian eigenvalues over a grid of r.
    Spectrum(spectrum::Args),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot set thread count: {e}");
            return ExitCode::from(2);
        }
    }

    let result = match cli.command {
        Command::Generate(a) => generate::run(a),
        Command::Cluster(a) => cluster::run(a),
        Command::Score(a) => score::run(a),
        Command::Benchmark(a) => benchmark::run(a),
        Command::Spectrum(a) => spectrum::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_algorithmic() { 1 } else { 2 })
        }
    }
}
