use std::io::Write;
use std::path::PathBuf;

use bethe_core::generators::{
    detectability, planted_partition, random_affinity, sample_dcsbm, DcSbmParams, ModelSpectrum, ThetaSpec,
};
use bethe_core::graph::{graph_stats, GraphStats};
use bethe_core::io::{write_edge_list, write_positional_labels};
use bethe_core::{Error, Result};
use serde::Serialize;

use super::{create, other, write_json, VERSION};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// JSON parameter file (`n`, `affinity`, `pi`, `theta`, `c_out`); overrides the inline flags.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Within-class affinity of a planted partition.
    #[arg(long, conflicts_with = "random_affinity")]
    cin: Option<f64>,
    /// Between-class affinity.
    #[arg(long)]
    cout: Option<f64>,
    /// Draw a random affinity matrix with mean degree `--c` per class.
    #[arg(long, requires = "c")]
    random_affinity: bool,
    #[arg(long)]
    c: Option<f64>,
    /// `constant` or `power-uniform(a,b,e)`.
    #[arg(long, default_value = "constant")]
    theta: ThetaSpec,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Output files are `<name>.edges`, `<name>.labels` and `<name>.json`.
    #[arg(long, default_value = "dcsbm")]
    name: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    seed: u64,
    params: &'a DcSbmParams,
    spectrum: ModelSpectrum,
    stats: Option<GraphStats>,
    nodes: usize,
    edges: usize,
    edge_file: String,
    label_file: String,
}

fn params(a: &Args) -> Result<DcSbmParams> {
    if let Some(path) = &a.params {
        let text = std::fs::read_to_string(path)?;
        let p: DcSbmParams = serde_json::from_str(&text).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        p.validate()?;
        return Ok(p);
    }
    let cout = a.cout.ok_or_else(|| Error::InvalidParameter("--cout is required".into()))?;
    let p = if a.random_affinity {
        random_affinity(a.n, a.k, a.c.expect("required by clap"), cout, a.seed)?
    } else {
        let cin = a.cin.ok_or_else(|| Error::InvalidParameter("--cin is required".into()))?;
        planted_partition(a.n, a.k, cin, cout)?
    };
    let p = p.with_theta(a.theta.clone());
    p.validate()?;
    Ok(p)
}

pub fn run(a: Args) -> Result<()> {
    let params = params(&a)?;
    let lg = sample_dcsbm(&params, a.seed)?;
    std::fs::create_dir_all(&a.out_dir)?;
    let edges = a.out_dir.join(format!("{}.edges", a.name));
    let labels = a.out_dir.join(format!("{}.labels", a.name));
    let manifest = a.out_dir.join(format!("{}.json", a.name));

    let mut w = create(&edges)?;
    writeln!(w, "# degree-corrected block model, n = {}, seed = {}", params.n, a.seed)?;
    write_edge_list(&lg.graph, &mut w)?;
    w.flush()?;
    let mut w = create(&labels)?;
    write_positional_labels(&lg.labels, &mut w)?;
    w.flush()?;

    let m = Manifest {
        tool: "bethe",
        version: VERSION,
        seed: a.seed,
        params: &params,
        spectrum: detectability(&params),
        stats: graph_stats(&lg.graph).ok(),
        nodes: lg.graph.n(),
        edges: lg.graph.m(),
        edge_file: edges.file_name().map(|f| f.to_string_lossy().into_owned()).ok_or_else(|| other("bad name"))?,
        label_file: labels.file_name().map(|f| f.to_string_lossy().into_owned()).ok_or_else(|| other("bad name"))?,
    };
    write_json(&m, Some(&manifest))
}
