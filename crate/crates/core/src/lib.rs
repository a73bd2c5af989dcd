//! Community detection in sparse graphs with heterogeneous degrees.
//!
//! The pipeline estimates the number of communities from the regularized
//! Laplacian, finds for each informative direction the smallest `r > 1` at
//! which the `p`-th eigenvalue of the Bethe-Hessian `H_r` vanishes, embeds
//! the nodes with the corresponding null vectors and clusters the embedding
//! with k-means.

pub mod error;
pub mod graph;
pub mod io;
pub mod generators;
pub mod spectral;
pub mod estimation;
pub mod scoring;
pub mod clustering;
pub mod baselines;
pub mod benchmark;

pub use error::{Error, Result};
pub use graph::{EdgePolicy, SparseGraph};
