//! Unsupervised estimation of the number of communities and of the
//! Bethe-Hessian parameters `ζ_p`.
//!
//! `ζ_p` is the smallest `r > 1` at which the `p`-th smallest eigenvalue of
//! `H_r` vanishes. It is found by a monotone fixed-point iteration: from
//! `r_t` with `s_p(H_{r_t}) < 0`, the next iterate is the smaller root of
//!
//! ```text
//! f(r′) = (r′ − r_t)(1 + r′ r_t) + λ_max((r_t − r′) XᵀDX + r′ S)
//! ```
//!
//! where `X` holds the `p` smallest eigenvectors of `H_{r_t}` and `S` their
//! eigenvalues. `f(r′)/r_t` bounds `s_p(H_{r′})` from above, so the iterates
//! decrease towards `ζ_p` without crossing it. Each step costs one sparse
//! eigensolve and a few dozen dense `p × p` ones.

use log::warn;
use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::SparseGraph;
use crate::spectral::{
    bethe_hessian, extreme_eigs, real_top_eigs_b, reg_sym_laplacian, spectral_radius_b,
    SolverOptions, Which,
};

const BISECTION_STEPS: usize = 200;
const BRACKET_EPS: f64 = 1e-12;
/// Cap on the number of communities the estimator will look for.
pub const MAX_CLASSES: usize = 256;

/// Zero tolerance for `s_p(H_r) = 0`.
pub fn zero_tolerance(r: f64) -> f64 {
    1e-8 * (1.0 + r * r)
}

#[derive(Debug, Clone, Serialize)]
pub struct KEstimate {
    pub k_hat: usize,
    pub rho: f64,
    /// `1 / √ρ(B)`.
    pub threshold: f64,
    /// Leading eigenvalues of `L^sym_{ρ(B)−1}` that were computed, descending.
    pub eigenvalues: Vec<f64>,
    /// `eigenvalues[i] − threshold`.
    pub margins: Vec<f64>,
    /// Set when `ρ(B) ≤ 1` and the estimate defaulted to one class.
    pub tree_like: bool,
}

/// Counts eigenvalues of `L^sym_{ρ(B)−1}` above `1/√ρ(B)`, extending the
/// number of computed eigenvalues until one falls below the threshold.
pub fn estimate_k(g: &SparseGraph, tol: f64) -> Result<KEstimate> {
    let rho = spectral_radius_b(g, tol)?;
    estimate_k_with_rho(g, rho, tol)
}

pub fn estimate_k_with_rho(g: &SparseGraph, rho: f64, tol: f64) -> Result<KEstimate> {
    if g.m() == 0 {
        return Err(Error::EdgelessGraph);
    }
    if rho <= 1.0 + 1e-12 {
        warn!("ρ(B) = {rho} ≤ 1: graph is tree-like, reporting a single class");
        return Ok(KEstimate {
            k_hat: 1,
            rho,
            threshold: 1.0,
            eigenvalues: Vec::new(),
            margins: Vec::new(),
            tree_like: true,
        });
    }
    let threshold = 1.0 / rho.sqrt();
    let op = reg_sym_laplacian(g, rho - 1.0);
    let n = g.n();
    let cap = MAX_CLASSES.min(n);
    let mut q = 4.min(cap);
    let mut warm: Option<DMatrix<f64>> = None;
    loop {
        let eig =
            extreme_eigs(&op, q, Which::Largest, &SolverOptions::with_tol(tol), warm.as_ref())?;
        let above = eig.values.iter().take_while(|&&s| s > threshold).count();
        if above < q || q == cap {
            let margins = eig.values.iter().map(|s| s - threshold).collect();
            return Ok(KEstimate {
                k_hat: above.max(1),
                rho,
                threshold,
                eigenvalues: eig.values,
                margins,
                tree_like: false,
            });
        }
        warm = Some(eig.vectors);
        q = (2 * q).min(cap);
    }
}

/// `f_{r_t}(r′)` for the eigenvalues `s` of `H_{r_t}` and `lambda = XᵀDX`.
pub fn f_eval(r_t: f64, r_prime: f64, s: &[f64], lambda: &DMatrix<f64>) -> f64 {
    let p = s.len();
    let mut m = lambda * (r_t - r_prime);
    for i in 0..p {
        m[(i, i)] += r_prime * s[i];
    }
    let m = (&m + m.transpose()) * 0.5;
    let top = SymmetricEigen::new(m).eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (r_prime - r_t) * (1.0 + r_prime * r_t) + top
}

/// Smaller root of `f_{r_t}` in `(1, r_t)` by bisection. Returns the upper
/// end of the final bracket, where `f < 0`, or `None` when `f` does not
/// change sign on the interval.
fn next_iterate(r_t: f64, s: &[f64], lambda: &DMatrix<f64>) -> Option<f64> {
    let f = |x: f64| f_eval(r_t, x, s, lambda);
    let mut lo = 1.0 + BRACKET_EPS;
    let mut hi = r_t;
    if f(lo) <= 0.0 || f(hi) >= 0.0 {
        return None;
    }
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(hi)
}

#[derive(Debug, Clone)]
pub struct ZetaOptions {
    /// Stop when successive iterates differ by less than this.
    pub tol: f64,
    pub max_iter: usize,
    /// Residual tolerance handed to the eigensolver.
    pub eig_tol: f64,
    /// Reuse a precomputed `ρ(B)`.
    pub rho: Option<f64>,
}

impl Default for ZetaOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 100, eig_tol: 1e-10, rho: None }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ZetaDiagnostic {
    pub p: usize,
    pub zeta: f64,
    pub iterations: usize,
    pub residual: f64,
    pub saturated: bool,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct ZetaResult {
    /// `ζ_1 = 1 < ζ_2 ≤ … ≤ ζ_k`.
    pub zeta: Vec<f64>,
    /// Column `p` is the null vector of `H_{ζ_p}` at position `p`.
    pub vectors: DMatrix<f64>,
    pub iterations: Vec<usize>,
    /// `|s_p(H_{ζ_p})|`.
    pub residuals: Vec<f64>,
    /// Entries with no root below `√ρ(B)`, set to `√ρ(B)`.
    pub saturated: Vec<bool>,
    pub converged: Vec<bool>,
    /// Indices (1-based) sharing a common `ζ`.
    pub multiplicity_groups: Vec<Vec<usize>>,
    pub rho: f64,
}

impl ZetaResult {
    pub fn k(&self) -> usize {
        self.zeta.len()
    }

    pub fn diagnostics(&self) -> Vec<ZetaDiagnostic> {
        (0..self.k())
            .map(|i| ZetaDiagnostic {
                p: i + 1,
                zeta: self.zeta[i],
                iterations: self.iterations[i],
                residual: self.residuals[i],
                saturated: self.saturated[i],
                converged: self.converged[i],
            })
            .collect()
    }
}

/// Computes `ζ_1, …, ζ_k` and the matching null vectors, from `ζ_k` down.
/// Each `ζ_p` search starts at `ζ_{p+1}` (`√ρ(B)` for `p = k`).
pub fn compute_zeta(g: &SparseGraph, k: usize, opts: &ZetaOptions) -> Result<ZetaResult> {
    let n = g.n();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("k = {k} for a graph of {n} nodes")));
    }
    if g.m() == 0 {
        return Err(Error::EdgelessGraph);
    }
    let rho = match opts.rho {
        Some(r) => r,
        None => spectral_radius_b(g, opts.eig_tol)?,
    };
    let top = rho.sqrt();
    let degrees = g.degrees_f64();

    let mut zeta = vec![1.0; k];
    let mut vectors = DMatrix::zeros(n, k);
    vectors.column_mut(0).fill(1.0 / (n as f64).sqrt());
    let mut iterations = vec![0; k];
    let mut residuals = vec![0.0; k];
    let mut saturated = vec![false; k];
    let mut converged = vec![true; k];
    let mut groups = vec![vec![1]];

    let solver = SolverOptions::with_tol(opts.eig_tol);
    let mut r = top;
    let mut warm: Option<DMatrix<f64>> = None;
    let mut p = k;
    while p > 1 {
        let solve = |r: f64, warm: Option<&DMatrix<f64>>| {
            extreme_eigs(&bethe_hessian(g, r), p, Which::Smallest, &solver, warm)
        };
        let mut eig = solve(r, warm.as_ref())?;
        let mut steps = 0;
        let mut ok = true;
        let no_root = eig.values[p - 1] > -zero_tolerance(r);
        if !no_root {
            loop {
                let x = &eig.vectors;
                let dx = DMatrix::from_fn(n, p, |i, j| degrees[i] * x[(i, j)]);
                let lambda = x.tr_mul(&dx);
                let Some(next) = next_iterate(r, &eig.values, &lambda) else {
                    // s_p < 0 but no root: can only happen through rounding
                    // near convergence.
                    break;
                };
                steps += 1;
                eig = solve(next, Some(&eig.vectors))?;
                let delta = (r - next).abs();
                r = next;
                if delta < opts.tol {
                    break;
                }
                if steps >= opts.max_iter {
                    ok = false;
                    warn!("ζ_{p} did not converge in {steps} iterations (last step {delta:e})");
                    break;
                }
            }
        }
        if no_root && eig.values[p - 1].abs() > zero_tolerance(r) {
            // s_p(H_r) > 0 already at the start: ζ_p saturates at √ρ(B).
            warn!("ζ_{p} has no root below √ρ(B); saturating");
            r = top;
            zeta[p - 1] = top;
            saturated[p - 1] = true;
            residuals[p - 1] = eig.values[p - 1].abs();
            vectors.set_column(p - 1, &eig.vectors.column(p - 1));
            iterations[p - 1] = 0;
            groups.push(vec![p]);
            warm = Some(eig.vectors.columns(0, p - 1).clone_owned());
            p -= 1;
            continue;
        }

        let tol0 = zero_tolerance(r);
        let mut delta = 1;
        while delta < p - 1 && eig.values[p - 1 - delta].abs() <= tol0 {
            delta += 1;
        }
        let mut group = Vec::new();
        for j in 0..delta {
            let idx = p - 1 - j;
            zeta[idx] = r;
            vectors.set_column(idx, &eig.vectors.column(idx));
            residuals[idx] = eig.values[idx].abs();
            iterations[idx] = steps;
            converged[idx] = ok;
            group.push(idx + 1);
        }
        group.reverse();
        groups.push(group);
        warm = Some(eig.vectors.columns(0, p - delta).clone_owned());
        p -= delta;
    }
    groups.sort();
    Ok(ZetaResult {
        zeta,
        vectors,
        iterations,
        residuals,
        saturated,
        converged,
        multiplicity_groups: groups,
        rho,
    })
}

/// Fast estimate `ζ_p ≈ ρ(B) / s_p(B)` from the leading real eigenvalues of
/// `B′`, capped at `√ρ(B)`. Accurate on block-model graphs only.
pub fn zeta_from_b(g: &SparseGraph, k: usize, rho: f64, tol: f64) -> Result<Vec<f64>> {
    let spec = real_top_eigs_b(g, k, tol)?;
    if !spec.complete {
        return Err(Error::MissingRealEigenvalues { found: spec.values.len(), requested: k });
    }
    let cap = rho.sqrt();
    Ok(spec.values.iter().map(|&s| if s > 0.0 { (rho / s).min(cap) } else { cap }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::EdgePolicy;

    #[test]
    fn f_is_negative_at_rt_when_sp_negative() {
        let s = [-0.8, -0.3];
        let lambda = DMatrix::from_row_slice(2, 2, &[4.0, 0.5, 0.5, 3.0]);
        let r_t = 2.0;
        // λ_max(r_t S) = r_t · s_p
        assert!((f_eval(r_t, r_t, &s, &lambda) - r_t * -0.3).abs() < 1e-12);
        assert!(f_eval(r_t, r_t, &s, &lambda) < 0.0);
    }

    #[test]
    fn scalar_case_matches_formula() {
        let (r_t, r1, cbar) = (1.9, 1.4, 4.2);
        let lambda = DMatrix::from_element(1, 1, cbar);
        let want = (r1 - r_t) * (1.0 + r1 * r_t) + (r_t - r1) * cbar;
        assert!((f_eval(r_t, r1, &[0.0], &lambda) - want).abs() < 1e-12);
    }

    #[test]
    fn f_is_convex() {
        let s = [-1.1, -0.4, -0.05];
        let lambda = DMatrix::from_row_slice(3, 3, &[5.0, 0.3, -0.2, 0.3, 4.0, 0.1, -0.2, 0.1, 6.0]);
        let r_t = 2.2;
        let xs: Vec<f64> = (0..40).map(|i| 1.0 + i as f64 * 0.05).collect();
        for w in xs.windows(3) {
            let (a, b) = (w[0], w[2]);
            let mid = 0.5 * (a + b);
            let chord = 0.5 * (f_eval(r_t, a, &s, &lambda) + f_eval(r_t, b, &s, &lambda));
            assert!(f_eval(r_t, mid, &s, &lambda) <= chord + 1e-12);
        }
    }

    #[test]
    fn complete_graph_has_one_class() {
        let mut edges = Vec::new();
        for i in 0..20 {
            for j in i + 1..20 {
                edges.push((i, j));
            }
        }
        let g = SparseGraph::from_edge_list(&edges, None, EdgePolicy::Strict).unwrap();
        let est = estimate_k(&g, 1e-10).unwrap();
        assert_eq!(est.k_hat, 1);
        assert!((est.rho - 18.0).abs() < 1e-8);
    }

    #[test]
    fn tree_defaults_to_one_class() {
        let edges: Vec<_> = (1..50).map(|i| ((i - 1) / 2, i)).collect();
        let g = SparseGraph::from_edge_list(&edges, None, EdgePolicy::Strict).unwrap();
        let est = estimate_k(&g, 1e-10).unwrap();
        assert_eq!(est.k_hat, 1);
        assert!(est.tree_like);
    }

    #[test]
    fn zeta_one_is_one() {
        let edges: Vec<_> = (0..30).flat_map(|i| [(i, (i + 1) % 30), (i, (i + 7) % 30)]).collect();
        let g = SparseGraph::from_edge_list(&edges, None, EdgePolicy::Lenient).unwrap();
        let z = compute_zeta(&g, 1, &ZetaOptions::default()).unwrap();
        assert_eq!(z.zeta, vec![1.0]);
        let c = z.vectors.column(0);
        assert!((c.norm() - 1.0).abs() < 1e-12);
    }

    /// `s_p(H_r)` from a dense eigendecomposition.
    fn dense_sp(g: &SparseGraph, r: f64, p: usize) -> f64 {
        use crate::spectral::LinearOperator;
        let mut v: Vec<f64> =
            SymmetricEigen::new(bethe_hessian(g, r).to_dense()).eigenvalues.iter().cloned().collect();
        v.sort_by(f64::total_cmp);
        v[p - 1]
    }

    /// First sign change of `s_p(H_r)` on a grid over `(1, √ρ]`, refined by bisection.
    fn grid_zeta(g: &SparseGraph, p: usize, rho: f64) -> f64 {
        let top = rho.sqrt();
        let steps = 60;
        let mut prev = 1.0 + 1e-6;
        for i in 1..=steps {
            let r = 1.0 + (top - 1.0) * i as f64 / steps as f64;
            if dense_sp(g, r, p) <= 0.0 {
                let (mut lo, mut hi) = (prev, r);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if dense_sp(g, mid, p) > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return 0.5 * (lo + hi);
            }
            prev = r;
        }
        top
    }

    #[test]
    fn zeta_matches_dense_grid_search() {
        use crate::generators::{planted_partition, sample_dcsbm};
        use crate::graph::largest_component;
        let params = planted_partition(300, 3, 14.0, 3.0).unwrap();
        let lg = sample_dcsbm(&params, 11).unwrap();
        let (g, _) = largest_component(&lg.graph).unwrap();
        let z = compute_zeta(&g, 3, &ZetaOptions::default()).unwrap();
        for p in 2..=3 {
            let want = grid_zeta(&g, p, z.rho);
            assert!((z.zeta[p - 1] - want).abs() < 1e-8, "p={p}: {} vs {want}", z.zeta[p - 1]);
            assert!(z.residuals[p - 1] < zero_tolerance(z.zeta[p - 1]));
            assert!(!z.saturated[p - 1]);
        }
        assert!(z.zeta[1] <= z.zeta[2]);
        let gram = z.vectors.tr_mul(&z.vectors);
        for i in 0..3 {
            assert!((gram[(i, i)] - 1.0).abs() < 1e-10);
        }
    }
}
