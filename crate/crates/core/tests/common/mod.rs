//! Dense reference computations, built straight from edge lists so they
//! share no code with the library's operators.

#![allow(dead_code)]

use bethe_core::SparseGraph;
use nalgebra::{DMatrix, SymmetricEigen};

pub fn dense_adjacency(g: &SparseGraph) -> DMatrix<f64> {
    let n = g.n();
    let mut a = DMatrix::zeros(n, n);
    for (i, j) in g.to_edge_list() {
        a[(i, j)] = 1.0;
        a[(j, i)] = 1.0;
    }
    a
}

pub fn dense_degrees(a: &DMatrix<f64>) -> Vec<f64> {
    a.row_iter().map(|r| r.sum()).collect()
}

/// `(r² − 1) I + D − r A`.
pub fn dense_bethe_hessian(a: &DMatrix<f64>, r: f64) -> DMatrix<f64> {
    let d = dense_degrees(a);
    let mut h = a * -r;
    for i in 0..a.nrows() {
        h[(i, i)] += r * r - 1.0 + d[i];
    }
    h
}

/// Ascending eigenvalues.
pub fn sorted_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.symmetric_eigenvalues().iter().cloned().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Ascending eigenvalues with matching unit eigenvectors.
pub fn sorted_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let e = SymmetricEigen::new(m);
    let mut idx: Vec<usize> = (0..e.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let vals = idx.iter().map(|&i| e.eigenvalues[i]).collect();
    let cols: Vec<_> = idx.iter().map(|&i| e.eigenvectors.column(i).into_owned()).collect();
    (vals, DMatrix::from_columns(&cols))
}

/// `ζ_p` as the first sign change of `s_p↑(H_r)` on a uniform grid over
/// `(1, √ρ]`, refined by bisection. Returns `√ρ` when there is none.
pub fn grid_zeta(a: &DMatrix<f64>, p: usize, rho: f64, grid: usize, tol: f64) -> f64 {
    let sp = |r: f64| sorted_eigenvalues(dense_bethe_hessian(a, r))[p - 1];
    let top = rho.sqrt();
    let mut prev = 1.0 + 1e-9;
    for i in 1..=grid {
        let r = 1.0 + (top - 1.0) * i as f64 / grid as f64;
        if sp(r) <= 0.0 {
            let (mut lo, mut hi) = (prev, r);
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                if sp(mid) > 0.0 {
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

/// The `2n × 2n` matrix `[[A, I − D], [I, 0]]`.
pub fn dense_companion(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let d = dense_degrees(a);
    let mut b = DMatrix::zeros(2 * n, 2 * n);
    b.view_mut((0, 0), (n, n)).copy_from(a);
    for i in 0..n {
        b[(i, n + i)] = 1.0 - d[i];
        b[(n + i, i)] = 1.0;
    }
    b
}

/// `(1/2|E|) Σ_ij (A_ij − d_i d_j / 2|E|) δ(ℓ_i, ℓ_j)`, term by term.
pub fn modularity_direct(a: &DMatrix<f64>, labels: &[usize]) -> f64 {
    let d = dense_degrees(a);
    let two_m: f64 = d.iter().sum();
    let n = a.nrows();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                q += a[(i, j)] - d[i] * d[j] / two_m;
            }
        }
    }
    q / two_m
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

/// Overlap by trying every relabeling.
pub fn overlap_exhaustive(hat: &[usize], truth: &[usize], k: usize) -> f64 {
    let n = hat.len() as f64;
    let best = permutations(k)
        .iter()
        .map(|perm| hat.iter().zip(truth).filter(|(h, t)| perm[**h] == **t).count())
        .max()
        .unwrap_or(0) as f64;
    let chance = 1.0 / k as f64;
    (best / n - chance) / (1.0 - chance)
}

/// Normalized negative log-likelihood of the fitted degree-corrected block
/// model, summing `ln P` over edges and `ln(1 − P)` over non-edges `i < j`,
/// with probabilities clipped into `(0, 1]`.
pub fn likelihood_direct(a: &DMatrix<f64>, labels: &[usize]) -> f64 {
    let n = a.nrows();
    let k = labels.iter().max().unwrap() + 1;
    let d = dense_degrees(a);
    let mean = d.iter().sum::<f64>() / n as f64;
    let theta: Vec<f64> = d.iter().map(|x| x / mean).collect();
    let mut num = vec![vec![0.0; k]; k];
    let mut den = vec![vec![0.0; k]; k];
    for i in 0..n {
        for j in 0..n {
            num[labels[i]][labels[j]] += a[(i, j)];
            den[labels[i]][labels[j]] += theta[i] * theta[j];
        }
    }
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let c_hat = n as f64 * num[labels[i]][labels[j]] / den[labels[i]][labels[j]];
            let p = theta[i] * theta[j] * c_hat / n as f64;
            s += if a[(i, j)] > 0.0 {
                p.min(1.0).ln()
            } else if p >= 1.0 {
                f64::MIN_POSITIVE.ln()
            } else {
                (1.0 - p).ln()
            };
        }
    }
    -s / d.iter().sum::<f64>()
}
