use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::graph::SparseGraph;

/// Row count above which matrix-vector products are split across threads.
const PARALLEL_ROWS: usize = 16_384;
const ROW_CHUNK: usize = 4_096;

/// A square matrix known only through its action on vectors.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;

    /// `y = Op x`.
    fn apply(&self, x: &[f64], y: &mut [f64]);

    /// Applies the operator to every column of `x`.
    fn apply_block(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut y = DMatrix::zeros(x.nrows(), x.ncols());
        for j in 0..x.ncols() {
            let xs = x.column(j);
            let mut ys = y.column_mut(j);
            self.apply(xs.as_slice(), ys.as_mut_slice());
        }
        y
    }

    /// Dense copy, built column by column. Only sensible for small operators.
    fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut out = DMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            self.apply(&e, &mut col);
            out.column_mut(j).copy_from_slice(&col);
            e[j] = 0.0;
        }
        out
    }
}

/// Writes `row(i)` into `y[i]` for every row, in parallel for large outputs.
fn fill_rows<F>(y: &mut [f64], row: F)
where
    F: Fn(usize) -> f64 + Sync,
{
    if y.len() >= PARALLEL_ROWS {
        y.par_chunks_mut(ROW_CHUNK).enumerate().for_each(|(c, chunk)| {
            let base = c * ROW_CHUNK;
            for (k, v) in chunk.iter_mut().enumerate() {
                *v = row(base + k);
            }
        });
    } else {
        for (i, v) in y.iter_mut().enumerate() {
            *v = row(i);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SymKind {
    /// `H_r = (r² − 1) I + D − r A`.
    BetheHessian { r: f64 },
    /// `D_τ^{-1/2} A D_τ^{-1/2}` with `D_τ = D + τ I`.
    RegSymLaplacian { tau: f64 },
    /// `D − r A`.
    ShiftedLaplacian { r: f64 },
    /// `A`.
    Adjacency,
}

/// Implicit symmetric operator over a borrowed graph.
#[derive(Debug, Clone)]
pub struct SymOperator<'g> {
    kind: SymKind,
    graph: &'g SparseGraph,
    /// Diagonal term for the Hessian-type kinds, `D_τ^{-1/2}` for the Laplacian.
    diag: Vec<f64>,
}

impl<'g> SymOperator<'g> {
    pub fn new(graph: &'g SparseGraph, kind: SymKind) -> Self {
        let d = graph.degrees_f64();
        let diag = match kind {
            SymKind::BetheHessian { r } => d.iter().map(|di| r * r - 1.0 + di).collect(),
            SymKind::RegSymLaplacian { tau } => d
                .iter()
                .map(|di| {
                    let s = di + tau;
                    if s > 0.0 {
                        1.0 / s.sqrt()
                    } else {
                        0.0
                    }
                })
                .collect(),
            SymKind::ShiftedLaplacian { .. } => d,
            SymKind::Adjacency => Vec::new(),
        };
        Self { kind, graph, diag }
    }

    pub fn kind(&self) -> SymKind {
        self.kind
    }

    pub fn graph(&self) -> &'g SparseGraph {
        self.graph
    }

    /// Gershgorin bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        let g = self.graph;
        (0..g.n())
            .map(|i| {
                let d = g.degree(i) as f64;
                match self.kind {
                    SymKind::BetheHessian { r } => self.diag[i].abs() + r.abs() * d,
                    SymKind::ShiftedLaplacian { r } => d + r.abs() * d,
                    SymKind::Adjacency => d,
                    SymKind::RegSymLaplacian { .. } => {
                        self.diag[i] * g.neighbors(i).iter().map(|&j| self.diag[j]).sum::<f64>()
                    }
                }
            })
            .fold(0.0, f64::max)
    }
}

impl LinearOperator for SymOperator<'_> {
    fn dim(&self) -> usize {
        self.graph.n()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let g = self.graph;
        let nsum = |i: usize| g.neighbors(i).iter().map(|&j| x[j]).sum::<f64>();
        match self.kind {
            SymKind::BetheHessian { r } | SymKind::ShiftedLaplacian { r } => {
                fill_rows(y, |i| self.diag[i] * x[i] - r * nsum(i))
            }
            SymKind::Adjacency => fill_rows(y, nsum),
            SymKind::RegSymLaplacian { .. } => {
                let s = &self.diag;
                fill_rows(y, |i| s[i] * g.neighbors(i).iter().map(|&j| s[j] * x[j]).sum::<f64>())
            }
        }
    }

    /// Works on a row-major copy of the block so that each neighbour lookup
    /// fetches all columns at once.
    fn apply_block(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let b = x.ncols();
        if b <= 1 {
            let mut y = DMatrix::zeros(x.nrows(), b);
            if b == 1 {
                self.apply(x.as_slice(), y.as_mut_slice());
            }
            return y;
        }
        let g = self.graph;
        let xt = x.transpose();
        let xs = xt.as_slice();
        let mut yt = DMatrix::zeros(b, x.nrows());
        let row = |i: usize, out: &mut [f64]| {
            match self.kind {
                SymKind::BetheHessian { r } | SymKind::ShiftedLaplacian { r } => {
                    for &j in g.neighbors(i) {
                        for (o, v) in out.iter_mut().zip(&xs[j * b..(j + 1) * b]) {
                            *o += v;
                        }
                    }
                    let d = self.diag[i];
                    for (o, v) in out.iter_mut().zip(&xs[i * b..(i + 1) * b]) {
                        *o = d * v - r * *o;
                    }
                }
                SymKind::Adjacency => {
                    for &j in g.neighbors(i) {
                        for (o, v) in out.iter_mut().zip(&xs[j * b..(j + 1) * b]) {
                            *o += v;
                        }
                    }
                }
                SymKind::RegSymLaplacian { .. } => {
                    let s = &self.diag;
                    for &j in g.neighbors(i) {
                        for (o, v) in out.iter_mut().zip(&xs[j * b..(j + 1) * b]) {
                            *o += s[j] * v;
                        }
                    }
                    for o in out.iter_mut() {
                        *o *= s[i];
                    }
                }
            }
        };
        let ys = yt.as_mut_slice();
        if x.nrows() >= PARALLEL_ROWS {
            ys.par_chunks_mut(ROW_CHUNK * b).enumerate().for_each(|(c, chunk)| {
                for (k, out) in chunk.chunks_mut(b).enumerate() {
                    row(c * ROW_CHUNK + k, out);
                }
            });
        } else {
            for (i, out) in ys.chunks_mut(b).enumerate() {
                row(i, out);
            }
        }
        yt.transpose()
    }
}

/// `H_r = (r² − 1) I + D − r A`.
pub fn bethe_hessian(g: &SparseGraph, r: f64) -> SymOperator<'_> {
    SymOperator::new(g, SymKind::BetheHessian { r })
}

/// `L^sym_τ = D_τ^{-1/2} A D_τ^{-1/2}`.
pub fn reg_sym_laplacian(g: &SparseGraph, tau: f64) -> SymOperator<'_> {
    SymOperator::new(g, SymKind::RegSymLaplacian { tau })
}

/// `D − r A`.
pub fn shifted_laplacian(g: &SparseGraph, r: f64) -> SymOperator<'_> {
    SymOperator::new(g, SymKind::ShiftedLaplacian { r })
}

pub fn adjacency(g: &SparseGraph) -> SymOperator<'_> {
    SymOperator::new(g, SymKind::Adjacency)
}

/// The `2n × 2n` companion `B′ = [[A, I − D], [I, 0]]` of the non-backtracking
/// matrix. Its eigenvalues other than ±1 are those of `B`.
#[derive(Debug, Clone)]
pub struct CompanionOperator<'g> {
    graph: &'g SparseGraph,
    one_minus_d: Vec<f64>,
}

impl<'g> CompanionOperator<'g> {
    pub fn new(graph: &'g SparseGraph) -> Self {
        let one_minus_d = graph.degrees_f64().iter().map(|d| 1.0 - d).collect();
        Self { graph, one_minus_d }
    }

    pub fn graph(&self) -> &'g SparseGraph {
        self.graph
    }
}

impl LinearOperator for CompanionOperator<'_> {
    fn dim(&self) -> usize {
        2 * self.graph.n()
    }

    fn apply(&self, v: &[f64], out: &mut [f64]) {
        let n = self.graph.n();
        let (x, y) = v.split_at(n);
        let (top, bottom) = out.split_at_mut(n);
        let g = self.graph;
        fill_rows(top, |i| {
            g.neighbors(i).iter().map(|&j| x[j]).sum::<f64>() + self.one_minus_d[i] * y[i]
        });
        bottom.copy_from_slice(x);
    }
}
