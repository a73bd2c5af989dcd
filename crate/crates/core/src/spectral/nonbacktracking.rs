//! Spectral facts about the non-backtracking matrix `B`, computed on its
//! `2n × 2n` companion `B′`.

use nalgebra::DMatrix;
use serde::Serialize;

use super::arnoldi::{arnoldi, ArnoldiOptions, Target};
use super::operator::CompanionOperator;
use crate::error::{Error, Result};
use crate::graph::{connected_components, two_core, SparseGraph};

/// Spectral radius of `B`, as the largest-modulus eigenvalue of `B′`.
///
/// Only the 2-core carries non-nilpotent structure, so the search runs on
/// each 2-core component separately. A component that is a bare cycle has
/// radius exactly one. Since `D − A` is singular, `B′` always has the
/// eigenvalue 1, so the result is never below one.
pub fn spectral_radius_b(g: &SparseGraph, tol: f64) -> Result<f64> {
    let (core, _) = two_core(g);
    let cc = connected_components(&core);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); cc.count()];
    for (node, &c) in cc.component_id.iter().enumerate() {
        members[c].push(node);
    }
    let mut rho = 1.0f64;
    for nodes in members {
        let degree_sum: usize = nodes.iter().map(|&i| core.degree(i)).sum();
        if degree_sum / 2 <= nodes.len() {
            continue;
        }
        let (sub, _) = core.induced_subgraph(&nodes);
        let op = CompanionOperator::new(&sub);
        let opts = ArnoldiOptions::new(tol, 20);
        let out = arnoldi(&op, Target::LargestModulus, &opts, |_| 1)?;
        let top = &out.pairs[0];
        if !out.converged {
            return Err(Error::NoConvergence { iterations: out.restarts, residual: top.residual });
        }
        rho = rho.max(top.value.norm());
    }
    Ok(rho)
}

/// Largest real eigenvalues of `B′` with the first `n` coordinates of their
/// eigenvectors (unit norm).
#[derive(Debug, Clone, Serialize)]
pub struct RealSpectrum {
    pub values: Vec<f64>,
    #[serde(skip)]
    pub vectors: DMatrix<f64>,
    pub residuals: Vec<f64>,
    /// False when fewer real eigenvalues than requested were found.
    pub complete: bool,
}

/// The `p` largest real eigenvalues of `B′`, descending.
///
/// Arnoldi targets the largest real parts and keeps extending the wanted set
/// until it contains `p` real values, skipping complex pairs on the way.
pub fn real_top_eigs_b(g: &SparseGraph, p: usize, tol: f64) -> Result<RealSpectrum> {
    let n = g.n();
    let op = CompanionOperator::new(g);
    let basis = (2 * p + 10).max(20);
    let opts = ArnoldiOptions::new(tol, basis);
    let limit = basis / 2;
    let out = arnoldi(&op, Target::LargestReal, &opts, |reps| {
        let mut real = 0;
        for (i, z) in reps.iter().enumerate() {
            if z.im == 0.0 {
                real += 1;
                if real == p {
                    return i + 1;
                }
            }
        }
        reps.len().min(limit)
    })?;
    let mut values = Vec::new();
    let mut residuals = Vec::new();
    let mut cols = Vec::new();
    for pair in out.pairs.iter().filter(|r| r.is_real()).take(p) {
        if pair.residual > tol * pair.value.norm().max(1.0) * 10.0 && !out.converged {
            continue;
        }
        let v = pair.vector.as_ref().expect("real pairs carry vectors");
        let head = v.rows(0, n).into_owned();
        let nrm = head.norm();
        cols.push(if nrm > 0.0 { head / nrm } else { head });
        values.push(pair.value.re);
        residuals.push(pair.residual);
    }
    let vectors = if cols.is_empty() { DMatrix::zeros(n, 0) } else { DMatrix::from_columns(&cols) };
    Ok(RealSpectrum { complete: values.len() == p, values, vectors, residuals })
}
