//! The full pipeline: giant component, `k̂`, `ζ_p`, embedding, k-means.

pub mod kmeans;

use std::time::Instant;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimation::{compute_zeta, estimate_k_with_rho, KEstimate, ZetaOptions, ZetaResult};
use crate::graph::{largest_component, SparseGraph, UNMAPPED};
use crate::spectral::spectral_radius_b;

pub use kmeans::{kmeans, KMeansOptions, KMeansResult};

/// Node embedding, one row per node.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub x: DMatrix<f64>,
    pub normalized: bool,
    /// Rows that were zero when normalized.
    pub zero_rows: Vec<usize>,
}

/// Flips `column` so its largest-magnitude entry (first one on ties) is positive.
pub fn fix_sign(x: &mut DMatrix<f64>, column: usize) {
    let mut best = 0;
    for i in 0..x.nrows() {
        if x[(i, column)].abs() > x[(best, column)].abs() {
            best = i;
        }
    }
    if x.nrows() > 0 && x[(best, column)] < 0.0 {
        x.column_mut(column).neg_mut();
    }
}

/// Stacks the null vectors `x_p` of `H_{ζ_p}` as columns. Saturated entries
/// (no `ζ_p` below `√ρ(B)`) carry the `p`-th eigenvector of `H_{√ρ(B)}` and are
/// exempt from the residual check.
pub fn build_embedding(zeta: &ZetaResult, max_residual: f64) -> Result<Embedding> {
    for p in 0..zeta.k() {
        let z = zeta.zeta[p];
        if !zeta.saturated[p] && zeta.residuals[p] > max_residual * (1.0 + z * z) {
            return Err(Error::ResidualTooLarge { column: p + 1, residual: zeta.residuals[p] });
        }
    }
    let mut x = zeta.vectors.clone();
    for c in 0..x.ncols() {
        let nrm = x.column(c).norm();
        if nrm > 0.0 {
            x.column_mut(c).unscale_mut(nrm);
        }
        fix_sign(&mut x, c);
    }
    Ok(Embedding { x, normalized: false, zero_rows: Vec::new() })
}

/// Projects every nonzero row on the unit sphere.
pub fn normalize_rows(x: &DMatrix<f64>) -> Embedding {
    let mut x = x.clone();
    let mut zero_rows = Vec::new();
    for i in 0..x.nrows() {
        let nrm = x.row(i).norm();
        if nrm > 0.0 {
            x.row_mut(i).unscale_mut(nrm);
        } else {
            zero_rows.push(i);
        }
    }
    Embedding { x, normalized: true, zero_rows }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterOptions {
    /// Number of classes; estimated when absent.
    pub k: Option<usize>,
    pub row_norm: bool,
    pub seed: u64,
    /// Eigensolver residual tolerance.
    pub tol: f64,
    /// Stopping tolerance on `|r_{t+1} − r_t|`.
    pub zeta_tol: f64,
    pub zeta_max_iter: usize,
    pub restarts: usize,
    pub iters: usize,
    /// Allowed `|s_p(H_{ζ_p})| / (1 + ζ_p²)` when building the embedding.
    pub max_residual: f64,
}

impl Default for ClusterOptions {
    fn default() -> Self {
        Self {
            k: None,
            row_norm: true,
            seed: 0,
            tol: 1e-10,
            zeta_tol: 1e-10,
            zeta_max_iter: 100,
            restarts: 10,
            iters: 30,
            max_residual: 1e-6,
        }
    }
}

impl ClusterOptions {
    pub fn kmeans(&self) -> KMeansOptions {
        KMeansOptions { restarts: self.restarts, iters: self.iters, seed: self.seed }
    }
}

/// Wall-clock seconds per stage.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Timings {
    pub giant_component: f64,
    pub spectral_radius: f64,
    pub estimate_k: f64,
    pub zeta: f64,
    pub embedding: f64,
    pub kmeans: f64,
    pub total: f64,
}

#[derive(Debug, Clone)]
pub struct ClusteringResult {
    pub k_hat: usize,
    /// Present when `k` was estimated.
    pub k_estimate: Option<KEstimate>,
    pub zeta: ZetaResult,
    /// One label per node of the input graph.
    pub labels: Vec<usize>,
    /// Nodes outside the giant component, labelled 0 arbitrarily.
    pub unassigned: Vec<bool>,
    pub inertia: f64,
    pub giant_size: usize,
    pub timings: Timings,
}

impl ClusteringResult {
    pub fn unassigned_count(&self) -> usize {
        self.unassigned.iter().filter(|&&u| u).count()
    }
}

/// Lifts labels computed on the giant component back to the input graph.
pub fn lift_labels(map: &[usize], giant_labels: &[usize]) -> (Vec<usize>, Vec<bool>) {
    map.iter()
        .map(|&j| if j == UNMAPPED { (0, true) } else { (giant_labels[j], false) })
        .unzip()
}

/// Community detection in sparse, degree-heterogeneous graphs.
///
/// Only the giant component is clustered. Graphs made of several comparable
/// components should be split by the caller first.
pub fn algorithm2(g: &SparseGraph, opts: &ClusterOptions) -> Result<ClusteringResult> {
    let start = Instant::now();
    let mut timings = Timings::default();
    let mut lap = Instant::now();
    let mut tick = |slot: &mut f64| {
        *slot = lap.elapsed().as_secs_f64();
        lap = Instant::now();
    };

    if g.m() == 0 {
        return Err(Error::EdgelessGraph);
    }
    let (giant, map) = largest_component(g)?;
    tick(&mut timings.giant_component);

    let rho = spectral_radius_b(&giant, opts.tol)?;
    tick(&mut timings.spectral_radius);

    let (k, k_estimate) = match opts.k {
        Some(k) => {
            if k == 0 || k > giant.n() {
                return Err(Error::InvalidParameter(format!(
                    "k = {k} for a giant component of {} nodes",
                    giant.n()
                )));
            }
            (k, None)
        }
        None => {
            let est = estimate_k_with_rho(&giant, rho, opts.tol)?;
            (est.k_hat, Some(est))
        }
    };
    tick(&mut timings.estimate_k);

    let zopts = ZetaOptions {
        tol: opts.zeta_tol,
        max_iter: opts.zeta_max_iter,
        eig_tol: opts.tol,
        rho: Some(rho),
    };
    let zeta = compute_zeta(&giant, k, &zopts)?;
    tick(&mut timings.zeta);

    let mut emb = build_embedding(&zeta, opts.max_residual)?;
    if opts.row_norm {
        emb = normalize_rows(&emb.x);
    }
    tick(&mut timings.embedding);

    let km = kmeans(&emb.x, k, &opts.kmeans())?;
    tick(&mut timings.kmeans);
    timings.total = start.elapsed().as_secs_f64();

    let (labels, unassigned) = lift_labels(&map, &km.labels);
    Ok(ClusteringResult {
        k_hat: k,
        k_estimate,
        zeta,
        labels,
        unassigned,
        inertia: km.inertia,
        giant_size: giant.n(),
        timings,
    })
}
