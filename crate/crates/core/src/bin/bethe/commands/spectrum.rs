use std::path::PathBuf;

use bethe_core::benchmark::linspace;
use bethe_core::estimation::{compute_zeta, ZetaDiagnostic, ZetaOptions};
use bethe_core::graph::largest_component;
use bethe_core::spectral::arnoldi::{arnoldi, ArnoldiOptions, Target};
use bethe_core::spectral::{
    bethe_hessian, extreme_eigs, reg_sym_laplacian, spectral_radius_b, CompanionOperator, SolverOptions, Which,
};
use bethe_core::{Error, Result};
use serde::Serialize;

use super::{load_graph, write_json, VERSION};

#[derive(Debug, clap::Args)]
pub struct Args {
    graph: PathBuf,
    /// Number of smallest eigenvalues of H_r to trace.
    #[arg(long, default_value_t = 4)]
    p: usize,
    #[arg(long, default_value_t = 1.0)]
    r_min: f64,
    /// Defaults to √ρ(B).
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long, default_value_t = 50)]
    points: usize,
    /// Also report the leading eigenvalues of L^sym_{ρ(B)−1}.
    #[arg(long)]
    lsym: bool,
    /// Number of largest-modulus eigenvalues of B′ to report.
    #[arg(long, default_value_t = 0)]
    outliers: usize,
    /// Compute ζ_1..ζ_K on the giant component for cross-checking.
    #[arg(long)]
    zeta: Option<usize>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long)]
    lenient: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Trace {
    r: f64,
    /// Smallest eigenvalues of H_r, ascending.
    eigenvalues: Vec<f64>,
}

#[derive(Serialize)]
struct LsymReport {
    tau: f64,
    threshold: f64,
    eigenvalues: Vec<f64>,
}

#[derive(Serialize)]
struct Outlier {
    re: f64,
    im: f64,
    residual: f64,
}

#[derive(Serialize)]
struct Report {
    tool: &'static str,
    version: &'static str,
    graph: PathBuf,
    nodes: usize,
    edges: usize,
    rho: f64,
    traces: Vec<Trace>,
    lsym: Option<LsymReport>,
    b_outliers: Vec<Outlier>,
    zeta: Option<Vec<ZetaDiagnostic>>,
}

pub fn run(a: Args) -> Result<()> {
    let file = load_graph(&a.graph, a.lenient)?;
    let g = &file.graph;
    if a.p == 0 || a.p > g.n() {
        return Err(Error::InvalidParameter(format!("--p {} for {} nodes", a.p, g.n())));
    }
    let rho = spectral_radius_b(g, a.tol)?;
    let r_max = a.r_max.unwrap_or(rho.sqrt());
    if a.points == 0 || !(a.r_min.is_finite() && r_max.is_finite()) || a.r_min > r_max {
        return Err(Error::InvalidParameter(format!(
            "invalid r grid: {} points on [{}, {}]",
            a.points, a.r_min, r_max
        )));
    }
    let solver = SolverOptions::with_tol(a.tol);
    let mut traces = Vec::new();
    let mut warm = None;
    for r in linspace(a.r_min, r_max, a.points) {
        let eig = extreme_eigs(&bethe_hessian(g, r), a.p, Which::Smallest, &solver, warm.as_ref())?;
        traces.push(Trace { r, eigenvalues: eig.values });
        warm = Some(eig.vectors);
    }

    let lsym = if a.lsym {
        let tau = rho - 1.0;
        let eig = extreme_eigs(&reg_sym_laplacian(g, tau), a.p, Which::Largest, &solver, None)?;
        Some(LsymReport { tau, threshold: 1.0 / rho.sqrt(), eigenvalues: eig.values })
    } else {
        None
    };

    let mut b_outliers = Vec::new();
    if a.outliers > 0 {
        let op = CompanionOperator::new(g);
        let want = a.outliers;
        let out = arnoldi(&op, Target::LargestModulus, &ArnoldiOptions::new(a.tol, (2 * want + 10).max(20)), |_| want)?;
        if !out.converged {
            return Err(Error::NoConvergence { iterations: out.restarts, residual: f64::NAN });
        }
        b_outliers = out
            .pairs
            .iter()
            .map(|p| Outlier { re: p.value.re, im: p.value.im, residual: p.residual })
            .collect();
    }

    let zeta = match a.zeta {
        Some(k) => {
            let (giant, _) = largest_component(g)?;
            let opts = ZetaOptions { eig_tol: a.tol, ..ZetaOptions::default() };
            Some(compute_zeta(&giant, k, &opts)?.diagnostics())
        }
        None => None,
    };

    let report = Report {
        tool: "bethe",
        version: VERSION,
        graph: a.graph.clone(),
        nodes: g.n(),
        edges: g.m(),
        rho,
        traces,
        lsym,
        b_outliers,
        zeta,
    };
    write_json(&report, a.out.as_deref())
}
