//! Restarted Arnoldi for a few exterior eigenvalues of a real nonsymmetric
//! operator.
//!
//! Restarts are thick: the kept subspace is an orthonormal basis of the
//! wanted Ritz vectors of the projected matrix (real and imaginary parts for
//! complex pairs). Since that basis spans an invariant subspace of the
//! projected matrix, the Krylov relation `Op V = V H + v bᵀ` survives the
//! restart with `H` no longer Hessenberg, which is all the eigensolve needs.

use nalgebra::{Complex, DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::lanczos::DENSE_LIMIT;
use super::operator::LinearOperator;
use crate::error::Result;

/// Relative size of an imaginary part below which a Ritz value counts as real.
pub const REAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    LargestModulus,
    LargestReal,
}

impl Target {
    fn key(self, z: Complex<f64>) -> f64 {
        match self {
            Target::LargestModulus => z.norm(),
            Target::LargestReal => z.re,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ArnoldiOptions {
    /// Residual bound relative to `max(1, |λ|)`.
    pub tol: f64,
    pub max_restarts: usize,
    pub basis_size: usize,
    pub seed: u64,
}

impl ArnoldiOptions {
    pub fn new(tol: f64, basis_size: usize) -> Self {
        Self { tol, max_restarts: 3_000, basis_size, seed: 0xb0b }
    }
}

/// One Ritz value per conjugate pair (the one with non-negative imaginary part).
#[derive(Debug, Clone)]
pub struct RitzPair {
    pub value: Complex<f64>,
    pub residual: f64,
    /// Unit Ritz vector, present for real values only.
    pub vector: Option<DVector<f64>>,
}

impl RitzPair {
    pub fn is_real(&self) -> bool {
        self.value.im == 0.0
    }
}

#[derive(Debug, Clone)]
pub struct ArnoldiOutput {
    pub pairs: Vec<RitzPair>,
    pub converged: bool,
    pub restarts: usize,
}

fn snap_real(z: Complex<f64>) -> Complex<f64> {
    if z.im.abs() <= REAL_TOL * z.norm().max(f64::MIN_POSITIVE) {
        Complex::new(z.re, 0.0)
    } else {
        z
    }
}

/// Representatives sorted by `target`, descending.
fn representatives(values: &[Complex<f64>], target: Target) -> Vec<Complex<f64>> {
    let mut reps: Vec<Complex<f64>> =
        values.iter().map(|&z| snap_real(z)).filter(|z| z.im >= 0.0).collect();
    reps.sort_by(|a, b| target.key(*b).total_cmp(&target.key(*a)));
    reps
}

fn real_null_vector(h: &DMatrix<f64>, lambda: f64) -> DVector<f64> {
    let n = h.nrows();
    let shifted = h - DMatrix::identity(n, n) * lambda;
    let svd = shifted.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let i = svd.singular_values.argmin().0;
    vt.row(i).transpose().normalize()
}

fn complex_null_vector(h: &DMatrix<f64>, lambda: Complex<f64>) -> DVector<Complex<f64>> {
    let n = h.nrows();
    let shifted = DMatrix::from_fn(n, n, |r, c| {
        let d = if r == c { lambda } else { Complex::new(0.0, 0.0) };
        Complex::new(h[(r, c)], 0.0) - d
    });
    let svd = shifted.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let i = svd.singular_values.argmin().0;
    vt.row(i).adjoint().normalize()
}

/// Gram–Schmidt that drops dependent columns.
fn orthonormal_columns(cols: &[DVector<f64>]) -> DMatrix<f64> {
    let mut kept: Vec<DVector<f64>> = Vec::new();
    for c in cols {
        let mut w = c.clone();
        for _ in 0..2 {
            for q in &kept {
                let d = q.dot(&w);
                w.axpy(-d, q, 1.0);
            }
        }
        let nrm = w.norm();
        if nrm > 1e-8 * c.norm().max(f64::MIN_POSITIVE) {
            kept.push(w / nrm);
        }
    }
    DMatrix::from_columns(&kept)
}

fn dense_arnoldi<O, F>(op: &O, target: Target, wanted: F) -> ArnoldiOutput
where
    O: LinearOperator + ?Sized,
    F: Fn(&[Complex<f64>]) -> usize,
{
    let m = op.to_dense();
    let values: Vec<Complex<f64>> = m.complex_eigenvalues().iter().cloned().collect();
    let reps = representatives(&values, target);
    let nw = wanted(&reps).min(reps.len());
    let pairs = reps[..nw]
        .iter()
        .map(|&z| {
            if z.im == 0.0 {
                let x = real_null_vector(&m, z.re);
                let res = (&m * &x - &x * z.re).norm();
                RitzPair { value: z, residual: res, vector: Some(x) }
            } else {
                let x = complex_null_vector(&m, z);
                let mc = m.map(|v| Complex::new(v, 0.0));
                let res = (&mc * &x - &x * z).norm();
                RitzPair { value: z, residual: res, vector: None }
            }
        })
        .collect();
    ArnoldiOutput { pairs, converged: true, restarts: 0 }
}

/// Runs restarted Arnoldi until the leading `wanted(reps)` representatives
/// (sorted by `target`) have converged.
pub fn arnoldi<O, F>(op: &O, target: Target, opts: &ArnoldiOptions, wanted: F) -> Result<ArnoldiOutput>
where
    O: LinearOperator + ?Sized,
    F: Fn(&[Complex<f64>]) -> usize,
{
    let n = op.dim();
    let m = opts.basis_size.max(4);
    if n <= DENSE_LIMIT || m + 2 >= n {
        return Ok(dense_arnoldi(op, target, wanted));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let random = |rng: &mut ChaCha8Rng| DVector::from_fn(n, |_, _| StandardNormal.sample(rng));

    let mut v = DMatrix::<f64>::zeros(n, m + 1);
    let mut h = DMatrix::<f64>::zeros(m + 1, m);
    let v0 = random(&mut rng);
    v.set_column(0, &v0.normalize());
    let mut cur = 0usize;
    let mut w = vec![0.0; n];

    for restart in 0..=opts.max_restarts {
        for j in cur..m {
            op.apply(v.column(j).as_slice(), &mut w);
            let mut wv = DVector::from_column_slice(&w);
            let basis = v.columns(0, j + 1);
            let mut coeff = DVector::zeros(j + 1);
            for _ in 0..2 {
                let c = basis.tr_mul(&wv);
                wv -= &basis * &c;
                coeff += c;
            }
            let beta = wv.norm();
            h.view_mut((0, j), (j + 1, 1)).copy_from(&coeff);
            if beta > 1e-12 * coeff.norm().max(1.0) {
                h[(j + 1, j)] = beta;
                v.set_column(j + 1, &(wv / beta));
            } else {
                // Invariant subspace: continue with a fresh orthogonal direction.
                h[(j + 1, j)] = 0.0;
                let mut fresh = random(&mut rng);
                for _ in 0..2 {
                    let c = basis.tr_mul(&fresh);
                    fresh -= &basis * c;
                }
                v.set_column(j + 1, &fresh.normalize());
            }
        }

        let hm = h.view((0, 0), (m, m)).clone_owned();
        let b = h.row(m).transpose();
        let values: Vec<Complex<f64>> = hm.complex_eigenvalues().iter().cloned().collect();
        let reps = representatives(&values, target);
        let nw = wanted(&reps).min(reps.len());
        let width = |z: &Complex<f64>| if z.im == 0.0 { 1 } else { 2 };
        let wanted_dims: usize = reps[..nw].iter().map(width).sum();
        let target_dims = (wanted_dims + (m - wanted_dims.min(m)) / 2).min(m - 1).max(wanted_dims);

        enum Small {
            Real(DVector<f64>),
            Cplx(DVector<Complex<f64>>),
        }
        let mut small = Vec::new();
        let mut dims = 0;
        for (i, z) in reps.iter().enumerate() {
            if i >= nw && dims + width(z) > target_dims {
                break;
            }
            dims += width(z);
            small.push(if z.im == 0.0 {
                Small::Real(real_null_vector(&hm, z.re))
            } else {
                Small::Cplx(complex_null_vector(&hm, *z))
            });
        }
        let residual_of = |s: &Small| match s {
            Small::Real(y) => b.dot(y).abs(),
            Small::Cplx(y) => y.iter().zip(b.iter()).map(|(a, bb)| a * *bb).sum::<Complex<f64>>().norm(),
        };
        let mut converged = true;
        for (z, s) in reps[..nw].iter().zip(&small) {
            if residual_of(s) > opts.tol * z.norm().max(1.0) {
                converged = false;
            }
        }

        if converged || restart == opts.max_restarts {
            let basis = v.columns(0, m);
            let mut tmp = vec![0.0; n];
            let pairs = reps[..nw]
                .iter()
                .zip(&small)
                .map(|(&z, s)| match s {
                    Small::Real(y) => {
                        let x = (basis * y).normalize();
                        op.apply(x.as_slice(), &mut tmp);
                        let mut r = DVector::from_column_slice(&tmp);
                        r.axpy(-z.re, &x, 1.0);
                        let res = r.norm();
                        RitzPair { value: z, residual: res, vector: Some(x) }
                    }
                    Small::Cplx(_) => RitzPair { value: z, residual: residual_of(s), vector: None },
                })
                .collect();
            return Ok(ArnoldiOutput { pairs, converged, restarts: restart });
        }

        let mut raw = Vec::new();
        for s in &small {
            match s {
                Small::Real(y) => raw.push(y.clone()),
                Small::Cplx(y) => {
                    raw.push(y.map(|c| c.re));
                    raw.push(y.map(|c| c.im));
                }
            }
        }
        let q = orthonormal_columns(&raw);
        let kq = q.ncols();
        let new_basis = v.columns(0, m) * &q;
        let residual_vec = v.column(m).clone_owned();
        let t = q.transpose() * &hm * &q;
        let coupling = q.transpose() * &b;
        v.fill(0.0);
        v.columns_mut(0, kq).copy_from(&new_basis);
        v.set_column(kq, &residual_vec);
        h.fill(0.0);
        h.view_mut((0, 0), (kq, kq)).copy_from(&t);
        h.view_mut((kq, 0), (1, kq)).copy_from(&coupling.transpose());
        cur = kq;
    }
    unreachable!("loop returns on its last iteration")
}
