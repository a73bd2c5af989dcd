//! Classical spectral embeddings, clustered with the same k-means stage as
//! [`algorithm2`](crate::clustering::algorithm2).

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::clustering::{algorithm2, fix_sign, kmeans, lift_labels, normalize_rows, ClusterOptions};
use crate::error::{Error, Result};
use crate::graph::{largest_component, SparseGraph};
use crate::spectral::{
    adjacency, bethe_hessian, extreme_eigs, real_top_eigs_b, reg_sym_laplacian, spectral_radius_b,
    SolverOptions, Which,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineMethod {
    /// Top-`k` eigenvectors of `A`.
    Adjacency,
    /// Top-`k` eigenvectors of `D⁻¹A`, obtained as `D^{-1/2}` times those of `D^{-1/2}AD^{-1/2}`.
    RwLaplacian,
    /// Top-`k` eigenvectors of `L^sym_τ` with `τ = d̄`, rows normalized.
    RegSymLaplacian,
    /// Bottom-`k` eigenvectors of `H_r` with `r = √ρ(B)`.
    BetheHessianFixed,
    /// First block of the `B′` eigenvectors of the `k` largest real eigenvalues.
    NonBacktracking,
}

impl BaselineMethod {
    pub const ALL: [BaselineMethod; 5] = [
        BaselineMethod::Adjacency,
        BaselineMethod::RwLaplacian,
        BaselineMethod::RegSymLaplacian,
        BaselineMethod::BetheHessianFixed,
        BaselineMethod::NonBacktracking,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaselineMethod::Adjacency => "adjacency",
            BaselineMethod::RwLaplacian => "rw-laplacian",
            BaselineMethod::RegSymLaplacian => "reg-sym-laplacian",
            BaselineMethod::BetheHessianFixed => "bethe-hessian-fixed",
            BaselineMethod::NonBacktracking => "non-backtracking",
        }
    }
}

/// A detector that can be benchmarked: the main pipeline or a baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Algorithm2,
    /// Algorithm 2 without row normalization.
    Algorithm2Raw,
    Baseline(BaselineMethod),
}

impl Method {
    /// Algorithm 2 and the five baselines.
    pub fn standard() -> Vec<Method> {
        let mut out = vec![Method::Algorithm2];
        out.extend(BaselineMethod::ALL.iter().map(|&b| Method::Baseline(b)));
        out
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Algorithm2 => "algorithm2",
            Method::Algorithm2Raw => "algorithm2-wp",
            Method::Baseline(b) => b.name(),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "algorithm2" {
            return Ok(Method::Algorithm2);
        }
        if s == "algorithm2-wp" {
            return Ok(Method::Algorithm2Raw);
        }
        BaselineMethod::ALL
            .iter()
            .find(|b| b.name() == s)
            .map(|&b| Method::Baseline(b))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method {s:?}")))
    }
}

#[derive(Debug, Clone)]
pub struct MethodResult {
    pub method: Method,
    pub k: usize,
    pub labels: Vec<usize>,
    pub unassigned: Vec<bool>,
    pub inertia: f64,
}

/// Unit-column embedding on a connected graph.
pub fn baseline_embedding(method: BaselineMethod, g: &SparseGraph, k: usize, tol: f64) -> Result<DMatrix<f64>> {
    let opts = SolverOptions::with_tol(tol);
    let mut x = match method {
        BaselineMethod::Adjacency => extreme_eigs(&adjacency(g), k, Which::Largest, &opts, None)?.vectors,
        BaselineMethod::RwLaplacian => {
            let v = extreme_eigs(&reg_sym_laplacian(g, 0.0), k, Which::Largest, &opts, None)?.vectors;
            let d = g.degrees_f64();
            DMatrix::from_fn(g.n(), k, |i, j| v[(i, j)] / d[i].sqrt())
        }
        BaselineMethod::RegSymLaplacian => {
            let tau = 2.0 * g.m() as f64 / g.n() as f64;
            let v = extreme_eigs(&reg_sym_laplacian(g, tau), k, Which::Largest, &opts, None)?.vectors;
            normalize_rows(&v).x
        }
        BaselineMethod::BetheHessianFixed => {
            let r = spectral_radius_b(g, tol)?.sqrt();
            extreme_eigs(&bethe_hessian(g, r), k, Which::Smallest, &opts, None)?.vectors
        }
        BaselineMethod::NonBacktracking => {
            let spec = real_top_eigs_b(g, k, tol)?;
            if !spec.complete {
                return Err(Error::MissingRealEigenvalues { found: spec.values.len(), requested: k });
            }
            spec.vectors
        }
    };
    if method != BaselineMethod::RegSymLaplacian {
        for c in 0..x.ncols() {
            let nrm = x.column(c).norm();
            if nrm > 0.0 {
                x.column_mut(c).unscale_mut(nrm);
            }
        }
    }
    for c in 0..x.ncols() {
        fix_sign(&mut x, c);
    }
    Ok(x)
}

/// Clusters the giant component of `g` into `k` classes with a baseline.
pub fn cluster_with(method: BaselineMethod, g: &SparseGraph, k: usize, opts: &ClusterOptions) -> Result<MethodResult> {
    if g.m() == 0 {
        return Err(Error::EdgelessGraph);
    }
    let (giant, map) = largest_component(g)?;
    if k < 1 || k > giant.n() {
        return Err(Error::InvalidParameter(format!("k = {k} for a giant component of {} nodes", giant.n())));
    }
    let x = baseline_embedding(method, &giant, k, opts.tol)?;
    let km = kmeans(&x, k, &opts.kmeans())?;
    let (labels, unassigned) = lift_labels(&map, &km.labels);
    Ok(MethodResult { method: Method::Baseline(method), k, labels, unassigned, inertia: km.inertia })
}

/// Runs any method with `k` given.
pub fn run_method(method: Method, g: &SparseGraph, k: usize, opts: &ClusterOptions) -> Result<MethodResult> {
    match method {
        Method::Algorithm2 | Method::Algorithm2Raw => {
            let o = ClusterOptions { k: Some(k), row_norm: method == Method::Algorithm2, ..opts.clone() };
            let res = algorithm2(g, &o)?;
            Ok(MethodResult { method, k, labels: res.labels, unassigned: res.unassigned, inertia: res.inertia })
        }
        Method::Baseline(b) => cluster_with(b, g, k, opts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{planted_partition, sample_dcsbm};
    use crate::scoring::overlap;

    #[test]
    fn method_names_round_trip() {
        for m in Method::standard().into_iter().chain([Method::Algorithm2Raw]) {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("louvain".parse::<Method>().is_err());
    }

    #[test]
    fn all_methods_find_an_easy_partition() {
        let params = planted_partition(600, 2, 16.0, 2.0).unwrap();
        let lg = sample_dcsbm(&params, 5).unwrap();
        let opts = ClusterOptions::default();
        for m in Method::standard() {
            let res = run_method(m, &lg.graph, 2, &opts).unwrap();
            let keep: Vec<usize> = (0..600).filter(|&i| !res.unassigned[i]).collect();
            let hat: Vec<usize> = keep.iter().map(|&i| res.labels[i]).collect();
            let truth: Vec<usize> = keep.iter().map(|&i| lg.labels[i]).collect();
            let ov = overlap(&hat, &truth, 2).unwrap();
            assert!(ov > 0.9, "{m}: overlap {ov}");
        }
    }
}
