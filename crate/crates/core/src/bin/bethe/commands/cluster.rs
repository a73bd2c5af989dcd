use std::io::Write;
use std::path::PathBuf;

use bethe_core::clustering::{algorithm2, ClusterOptions, Timings};
use bethe_core::estimation::{KEstimate, ZetaDiagnostic};
use bethe_core::graph::Cleanup;
use bethe_core::io::write_keyed_labels;
use bethe_core::scoring::{score_partition, ScoreBundle};
use bethe_core::Result;
use serde::Serialize;

use super::{create, load_graph, load_labels, write_json, VERSION};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Edge list, one `u v` pair per line.
    graph: PathBuf,
    /// Number of communities; estimated when omitted.
    #[arg(long)]
    k: Option<usize>,
    /// Skip row normalization of the embedding.
    #[arg(long)]
    no_row_norm: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Eigensolver residual tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// k-means restarts.
    #[arg(long, default_value_t = 10)]
    restarts: usize,
    /// Lloyd iterations per restart.
    #[arg(long, default_value_t = 30)]
    iters: usize,
    /// Drop self-loops and duplicate edges instead of failing.
    #[arg(long)]
    lenient: bool,
    /// Ground-truth labels, for the overlap score.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Output label file (`node_id label` per line).
    #[arg(long, default_value = "labels.txt")]
    labels: PathBuf,
    /// JSON report; printed to stdout when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Serialize)]
struct Config<'a> {
    graph: &'a PathBuf,
    truth: &'a Option<PathBuf>,
    lenient: bool,
    options: &'a ClusterOptions,
}

#[derive(Serialize)]
struct Report<'a> {
    tool: &'static str,
    version: &'static str,
    config: Config<'a>,
    nodes: usize,
    edges: usize,
    cleanup: Cleanup,
    giant_component: usize,
    unassigned: Vec<u64>,
    k_hat: usize,
    k_estimate: Option<KEstimate>,
    rho: f64,
    zeta: Vec<f64>,
    zeta_diagnostics: Vec<ZetaDiagnostic>,
    multiplicity_groups: Vec<Vec<usize>>,
    inertia: f64,
    scores: ScoreBundle,
    timings: Timings,
}

pub fn run(a: Args) -> Result<()> {
    let file = load_graph(&a.graph, a.lenient)?;
    let truth = match &a.truth {
        Some(p) => Some(load_labels(p, &file)?),
        None => None,
    };
    let options = ClusterOptions {
        k: a.k,
        row_norm: !a.no_row_norm,
        seed: a.seed,
        tol: a.tol,
        restarts: a.restarts,
        iters: a.iters,
        ..ClusterOptions::default()
    };
    let res = algorithm2(&file.graph, &options)?;
    let scores = score_partition(&file.graph, &res.labels, truth.as_deref())?;

    let mut w = create(&a.labels)?;
    write_keyed_labels(&file.original_ids, &res.labels, &mut w)?;
    w.flush()?;

    let report = Report {
        tool: "bethe",
        version: VERSION,
        config: Config { graph: &a.graph, truth: &a.truth, lenient: a.lenient, options: &options },
        nodes: file.graph.n(),
        edges: file.graph.m(),
        cleanup: file.cleanup,
        giant_component: res.giant_size,
        unassigned: (0..file.graph.n())
            .filter(|&i| res.unassigned[i])
            .map(|i| file.original_ids[i])
            .collect(),
        k_hat: res.k_hat,
        k_estimate: res.k_estimate.clone(),
        rho: res.zeta.rho,
        zeta: res.zeta.zeta.clone(),
        zeta_diagnostics: res.zeta.diagnostics(),
        multiplicity_groups: res.zeta.multiplicity_groups.clone(),
        inertia: res.inertia,
        scores,
        timings: res.timings.clone(),
    };
    write_json(&report, a.report.as_deref())
}
