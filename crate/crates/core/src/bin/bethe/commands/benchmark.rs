use std::path::PathBuf;

use bethe_core::baselines::Method;
use bethe_core::benchmark::{linspace, run_on_graph, run_sweep, summarize, SweepSpec};
use bethe_core::clustering::ClusterOptions;
use bethe_core::generators::ThetaSpec;
use bethe_core::{Error, Result};

use super::{load_graph, load_labels, write_csv};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Run all methods on this edge list instead of a synthetic sweep.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Ground truth for `--graph`.
    #[arg(long, requires = "graph")]
    truth: Option<PathBuf>,
    #[arg(long, default_value_t = 20_000)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Mean degree of the sweep.
    #[arg(long, default_value_t = 5.0)]
    c: f64,
    #[arg(long, default_value = "constant")]
    theta: ThetaSpec,
    /// Smallest α / α_c on the grid.
    #[arg(long, default_value_t = 0.25)]
    alpha_min: f64,
    /// Largest α / α_c on the grid.
    #[arg(long, default_value_t = 2.5)]
    alpha_max: f64,
    #[arg(long, default_value_t = 10)]
    points: usize,
    /// Number of seeds per point.
    #[arg(long, default_value_t = 5)]
    seeds: u64,
    /// First seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated subset of methods.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<Method>>,
    #[arg(long, default_value_t = 10)]
    restarts: usize,
    /// Per-run rows; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-point mean and standard deviation of the overlap.
    #[arg(long)]
    summary: Option<PathBuf>,
}

pub fn run(a: Args) -> Result<()> {
    let methods = a.methods.clone().unwrap_or_else(Method::standard);
    let options = ClusterOptions { restarts: a.restarts, seed: a.seed, ..ClusterOptions::default() };
    if let Some(path) = &a.graph {
        let file = load_graph(path, true)?;
        let truth = match &a.truth {
            Some(p) => Some(load_labels(p, &file)?),
            None => None,
        };
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let rows = run_on_graph(&file.graph, &name, a.k, truth.as_deref(), &methods, &options);
        return write_csv(&rows, a.out.as_deref());
    }
    if a.points == 0 || a.alpha_min > a.alpha_max {
        return Err(Error::InvalidParameter(format!(
            "empty grid: {} points on [{}, {}]",
            a.points, a.alpha_min, a.alpha_max
        )));
    }
    let spec = SweepSpec {
        n: a.n,
        k: a.k,
        c: a.c,
        theta: a.theta.clone(),
        alpha_ratios: linspace(a.alpha_min, a.alpha_max, a.points),
        seeds: (a.seed..a.seed + a.seeds).collect(),
        methods,
        options,
    };
    let rows = run_sweep(&spec)?;
    write_csv(&rows, a.out.as_deref())?;
    if let Some(p) = &a.summary {
        write_csv(&summarize(&rows), Some(p))?;
    }
    Ok(())
}
