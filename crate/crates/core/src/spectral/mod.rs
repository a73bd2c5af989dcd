//! Implicit graph operators and the eigensolvers that act on them.

pub mod arnoldi;
pub mod lanczos;
pub mod nonbacktracking;
pub mod operator;

use nalgebra::DMatrix;

pub use lanczos::{extreme_eigs, largest_eigs, smallest_eigs, SolverOptions, Which};
pub use nonbacktracking::{real_top_eigs_b, spectral_radius_b, RealSpectrum};
pub use operator::{
    adjacency, bethe_hessian, reg_sym_laplacian, shifted_laplacian, CompanionOperator,
    LinearOperator, SymKind, SymOperator,
};

/// Eigenpairs sorted in the requested order, with unit eigenvectors in the
/// columns of `vectors`.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
    /// `‖Op v − s v‖` for each pair.
    pub residuals: Vec<f64>,
    pub restarts: usize,
}
