use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed edge on line {line}: {reason}")]
    MalformedEdge { line: usize, reason: String },

    #[error("node index {index} out of range for graph with {n} nodes")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("self-loop on node {0}")]
    SelfLoop(usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("graph has no edges")]
    EdgelessGraph,

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("eigensolver did not converge after {iterations} iterations (worst residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("only {found} real eigenvalues found, {requested} requested")]
    MissingRealEigenvalues { found: usize, requested: usize },

    #[error("class {0} is empty")]
    EmptyClass(usize),

    #[error("degenerate affinity estimate between classes {0} and {1}")]
    DegenerateAffinity(usize, usize),

    #[error("label {label} out of range for {k} classes")]
    LabelOutOfRange { label: usize, k: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("k-means needs {k} distinct points, found {distinct}")]
    TooFewDistinctPoints { k: usize, distinct: usize },

    #[error("embedding column {column} has residual {residual:e} above tolerance")]
    ResidualTooLarge { column: usize, residual: f64 },

    #[error("infeasible affinity constraint after {0} attempts")]
    InfeasibleAffinity(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Failures of the numerical pipeline itself, as opposed to bad input.
    pub fn is_algorithmic(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::MissingRealEigenvalues { .. }
                | Error::TooFewDistinctPoints { .. }
                | Error::ResidualTooLarge { .. }
                | Error::InfeasibleAffinity(_)
        )
    }
}
