//! Block Lanczos with full reorthogonalization and thick restarts.
//!
//! The basis `V` and its image `Op V` are stored explicitly, so the
//! projected matrix `Vᵀ Op V` is built one block at a time and Ritz
//! residuals are exact. On restart the best Ritz vectors are kept and the
//! basis is extended by their residuals, which spans the same space as one
//! more block Krylov step from the kept vectors. A block (rather than a
//! single start vector) lets repeated eigenvalues, such as the `n_CC`
//! zeros of `D − A`, be resolved.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::operator::LinearOperator;
use super::EigenPairs;
use crate::error::{Error, Result};

/// Problems up to this size are solved densely.
pub const DENSE_LIMIT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Smallest,
    Largest,
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Residual bound, relative to `max(1, |largest Ritz value|)`.
    pub tol: f64,
    pub max_restarts: usize,
    /// Maximum basis dimension; defaults to `max(3·nev, nev + 30)`.
    pub basis_size: Option<usize>,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_restarts: 2_000, basis_size: None, seed: 0x5eed }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

fn random_vector(n: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    DVector::from_fn(n, |_, _| StandardNormal.sample(rng))
}

/// Rows per pass of the tall-skinny kernels below, sized so that a chunk of
/// the basis stays in cache while every column of the block is processed.
const ROW_CHUNK: usize = 256;

/// Four independent partial sums, so the loop vectorizes.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for k in 0..4 {
            acc[k] += x[k] * y[k];
        }
    }
    acc[0] + acc[1] + acc[2] + acc[3] + tail
}

/// `Vᵀ W` for the first `cols` columns of `v`, reading `v` once.
fn tr_mul_prefix(v: &DMatrix<f64>, cols: usize, w: &DMatrix<f64>) -> DMatrix<f64> {
    let n = v.nrows();
    let (vs, ws) = (v.as_slice(), w.as_slice());
    let mut out = DMatrix::zeros(cols, w.ncols());
    for start in (0..n).step_by(ROW_CHUNK) {
        let end = (start + ROW_CHUNK).min(n);
        for i in 0..cols {
            let vi = &vs[i * n + start..i * n + end];
            for j in 0..w.ncols() {
                let wj = &ws[j * n + start..j * n + end];
                out[(i, j)] += dot(vi, wj);
            }
        }
    }
    out
}

/// `W −= V C` for the first `cols` columns of `v`, reading `v` once. With
/// `then_gram` the product `Vᵀ W` of the updated `W` is accumulated in the
/// same sweep, since each row chunk of `W` is final once it is updated.
fn sub_mul_prefix(
    w: &mut DMatrix<f64>,
    v: &DMatrix<f64>,
    cols: usize,
    c: &DMatrix<f64>,
    then_gram: bool,
) -> Option<DMatrix<f64>> {
    let n = v.nrows();
    let q = w.ncols();
    let vs = v.as_slice();
    let ws = w.as_mut_slice();
    let mut gram = then_gram.then(|| DMatrix::zeros(cols, q));
    for start in (0..n).step_by(ROW_CHUNK) {
        let end = (start + ROW_CHUNK).min(n);
        for i in 0..cols {
            let vi = &vs[i * n + start..i * n + end];
            for j in 0..q {
                let cij = c[(i, j)];
                let wj = &mut ws[j * n + start..j * n + end];
                for (x, a) in wj.iter_mut().zip(vi) {
                    *x -= cij * a;
                }
            }
        }
        if let Some(gram) = gram.as_mut() {
            for i in 0..cols {
                let vi = &vs[i * n + start..i * n + end];
                for j in 0..q {
                    gram[(i, j)] += dot(vi, &ws[j * n + start..j * n + end]);
                }
            }
        }
    }
    gram
}

/// Orthonormalizes the columns of `block` against the first `cols` columns
/// of `basis` and each other (block classical Gram–Schmidt, applied twice).
/// Columns that vanish are replaced by random directions.
///
/// `known` may supply `basisᵀ block` when the caller already has it, which
/// saves one pass over the basis.
pub(crate) fn orthonormalize_block(
    basis: &DMatrix<f64>,
    cols: usize,
    block: &DMatrix<f64>,
    known: Option<DMatrix<f64>>,
    rng: &mut ChaCha8Rng,
) -> DMatrix<f64> {
    let n = block.nrows();
    let against_basis = |w: &mut DMatrix<f64>, known: Option<DMatrix<f64>>| {
        if cols > 0 {
            let c1 = known.unwrap_or_else(|| tr_mul_prefix(basis, cols, w));
            let c2 = sub_mul_prefix(w, basis, cols, &c1, true).unwrap();
            sub_mul_prefix(w, basis, cols, &c2, false);
        }
    };
    let reference: Vec<f64> = block.column_iter().map(|c| c.norm()).collect();
    let mut w = block.clone();
    against_basis(&mut w, known);

    let mut out = DMatrix::zeros(n, block.ncols());
    for j in 0..block.ncols() {
        let mut col = w.column(j).clone_owned();
        let mut reference = reference[j];
        for _attempt in 0..8 {
            if j > 0 {
                let prev = out.columns(0, j);
                for _pass in 0..2 {
                    let c = prev.tr_mul(&col);
                    col -= prev * c;
                }
            }
            let norm = col.norm();
            if norm > 1e-10 * reference && norm > f64::MIN_POSITIVE {
                out.set_column(j, &(col / norm));
                break;
            }
            let mut fresh = DMatrix::from_column_slice(n, 1, random_vector(n, rng).as_slice());
            reference = fresh.norm();
            against_basis(&mut fresh, None);
            col = fresh.column(0).clone_owned();
        }
    }
    out
}

fn sorted_order(values: &[f64], which: Which) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    match which {
        Which::Smallest => idx.sort_by(|&a, &b| values[a].total_cmp(&values[b])),
        Which::Largest => idx.sort_by(|&a, &b| values[b].total_cmp(&values[a])),
    }
    idx
}

fn residual_norms<O: LinearOperator + ?Sized>(
    op: &O,
    vectors: &DMatrix<f64>,
    values: &[f64],
) -> Vec<f64> {
    let image = op.apply_block(vectors);
    (0..values.len())
        .map(|j| (image.column(j) - vectors.column(j) * values[j]).norm())
        .collect()
}

fn dense_extreme<O: LinearOperator + ?Sized>(op: &O, nev: usize, which: Which) -> EigenPairs {
    let m = op.to_dense();
    let sym = (&m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let order = sorted_order(eig.eigenvalues.as_slice(), which);
    let values: Vec<f64> = order[..nev].iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(op.dim(), nev, |r, c| eig.eigenvectors[(r, order[c])]);
    let residuals = residual_norms(op, &vectors, &values);
    EigenPairs { values, vectors, residuals, restarts: 0 }
}

/// The `nev` extreme eigenpairs of a symmetric operator.
///
/// `start` seeds the first block; warm-starting from nearby eigenvectors
/// cuts the iteration count sharply when solving a family of operators.
pub fn extreme_eigs<O: LinearOperator + ?Sized>(
    op: &O,
    nev: usize,
    which: Which,
    opts: &SolverOptions,
    start: Option<&DMatrix<f64>>,
) -> Result<EigenPairs> {
    let n = op.dim();
    if nev == 0 || nev > n {
        return Err(Error::InvalidParameter(format!(
            "requested {nev} eigenpairs of a {n}-dimensional operator"
        )));
    }
    let block = nev.clamp(1, 8);
    let m = opts
        .basis_size
        .unwrap_or((3 * nev).max(nev + 30))
        .max(nev + 2 * block);
    if n <= DENSE_LIMIT || m + block >= n {
        return Ok(dense_extreme(op, nev, which));
    }
    let keep = (nev + (m - nev) / 2).min(m - block);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut v = DMatrix::<f64>::zeros(n, m);
    let mut av = DMatrix::<f64>::zeros(n, m);
    let mut t = DMatrix::<f64>::zeros(m, m);
    let mut cur = 0usize;

    // Appends an orthonormalized block; returns the column range it occupies.
    let insert = |v: &mut DMatrix<f64>,
                      av: &mut DMatrix<f64>,
                      t: &mut DMatrix<f64>,
                      cur: &mut usize,
                      raw: &DMatrix<f64>,
                      known: Option<DMatrix<f64>>,
                      rng: &mut ChaCha8Rng|
     -> (usize, usize) {
        let width = raw.ncols().min(m - *cur);
        let raw = raw.columns(0, width).clone_owned();
        let known = known.map(|k| k.columns(0, width).clone_owned());
        let q = orthonormalize_block(v, *cur, &raw, known, rng);
        let aq = op.apply_block(&q);
        v.columns_mut(*cur, width).copy_from(&q);
        av.columns_mut(*cur, width).copy_from(&aq);
        let coeff = tr_mul_prefix(v, *cur + width, &aq);
        t.view_mut((0, *cur), (*cur + width, width)).copy_from(&coeff);
        t.view_mut((*cur, 0), (width, *cur + width)).copy_from(&coeff.transpose());
        let range = (*cur, width);
        *cur += width;
        range
    };

    let mut first = DMatrix::<f64>::zeros(n, 0);
    if let Some(s) = start {
        if s.nrows() == n {
            first = s.columns(0, s.ncols().min(m / 2)).clone_owned();
        }
    }
    let width0 = first.ncols().max(block);
    let mut init = DMatrix::<f64>::zeros(n, width0);
    for j in 0..width0 {
        if j < first.ncols() {
            // A small random component keeps the block from being exactly
            // invariant when the warm start is already converged.
            let noise = random_vector(n, &mut rng) * (1e-3 / (n as f64).sqrt());
            init.set_column(j, &(first.column(j) + noise));
        } else {
            init.set_column(j, &random_vector(n, &mut rng));
        }
    }
    let mut last = insert(&mut v, &mut av, &mut t, &mut cur, &init, None, &mut rng);

    let mut worst = f64::INFINITY;
    for restart in 0..=opts.max_restarts {
        while cur < m {
            // Vᵀ (A q) for the newest block q is already in T.
            let next = av.columns(last.0, last.1).clone_owned();
            let known = t.view((0, last.0), (cur, last.1)).clone_owned();
            last = insert(&mut v, &mut av, &mut t, &mut cur, &next, Some(known), &mut rng);
        }

        let proj = t.view((0, 0), (cur, cur));
        let sym = (&proj + proj.transpose()) * 0.5;
        let eig = SymmetricEigen::new(sym);
        let order = sorted_order(eig.eigenvalues.as_slice(), which);
        let nk = keep.min(cur);
        let sel = DMatrix::from_fn(cur, nk, |r, c| eig.eigenvectors[(r, order[c])]);
        let theta: Vec<f64> = order[..nk].iter().map(|&i| eig.eigenvalues[i]).collect();
        let y = v.columns(0, cur) * &sel;
        let ay = av.columns(0, cur) * &sel;
        let mut r = ay.clone();
        for (j, th) in theta.iter().enumerate() {
            r.column_mut(j).axpy(-th, &y.column(j), 1.0);
        }
        let res: Vec<f64> = (0..nk).map(|j| r.column(j).norm()).collect();
        let scale = eig.eigenvalues.iter().fold(1.0f64, |a, &b| a.max(b.abs()));
        let threshold = opts.tol * scale;
        worst = res[..nev].iter().cloned().fold(0.0, f64::max);

        if worst <= threshold {
            let mut vectors = y.columns(0, nev).clone_owned();
            for mut col in vectors.column_iter_mut() {
                let nrm = col.norm();
                col /= nrm;
            }
            return Ok(EigenPairs {
                values: theta[..nev].to_vec(),
                vectors,
                residuals: res[..nev].to_vec(),
                restarts: restart,
            });
        }
        if restart == opts.max_restarts {
            break;
        }

        v.columns_mut(0, nk).copy_from(&y);
        av.columns_mut(0, nk).copy_from(&ay);
        t.fill(0.0);
        for (j, th) in theta.iter().enumerate() {
            t[(j, j)] = *th;
        }
        cur = nk;

        let mut pick: Vec<usize> = (0..nk).filter(|&j| res[j] > threshold).take(block).collect();
        if pick.is_empty() {
            pick.push(0);
        }
        let dirs = DMatrix::from_fn(n, pick.len(), |row, c| r[(row, pick[c])]);
        last = insert(&mut v, &mut av, &mut t, &mut cur, &dirs, None, &mut rng);
    }
    Err(Error::NoConvergence { iterations: opts.max_restarts, residual: worst })
}

/// The `p` algebraically smallest eigenpairs, ascending.
pub fn smallest_eigs<O: LinearOperator + ?Sized>(op: &O, p: usize, tol: f64) -> Result<EigenPairs> {
    extreme_eigs(op, p, Which::Smallest, &SolverOptions::with_tol(tol), None)
}

/// The `p` algebraically largest eigenpairs, descending.
pub fn largest_eigs<O: LinearOperator + ?Sized>(op: &O, p: usize, tol: f64) -> Result<EigenPairs> {
    extreme_eigs(op, p, Which::Largest, &SolverOptions::with_tol(tol), None)
}
