use std::path::PathBuf;

use bethe_core::scoring::score_partition;
use bethe_core::Result;

use super::{load_graph, load_labels, write_json};

#[derive(Debug, clap::Args)]
pub struct Args {
    graph: PathBuf,
    /// Labels to score: `node_id label` lines, or one label per line indexed by node id.
    labels: PathBuf,
    /// Ground truth, for the overlap score.
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long)]
    lenient: bool,
    /// Write the JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(a: Args) -> Result<()> {
    let file = load_graph(&a.graph, a.lenient)?;
    let labels = load_labels(&a.labels, &file)?;
    let truth = match &a.truth {
        Some(p) => Some(load_labels(p, &file)?),
        None => None,
    };
    let bundle = score_partition(&file.graph, &labels, truth.as_deref())?;
    write_json(&bundle, a.out.as_deref())
}
