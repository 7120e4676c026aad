use std::path::PathBuf;

use thiserror::Error;

use crate::simulate::StartVerdict;

pub type Result<T, E = GroverError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum GroverError {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("resource limit: dimension {dim} exceeds dense limit {limit}")]
    ResourceLimit { dim: usize, limit: usize },

    /// `V|γ⟩` is numerically orthogonal to the target subspace, so `a = 0`.
    #[error("orthogonal start: sum of squared overlaps {ssq:e} is below the positivity threshold")]
    OrthogonalStart { ssq: f64 },

    #[error("numerical consistency: {0}")]
    NumericalConsistency(String),

    #[error("invalid unitary: {0}")]
    InvalidUnitary(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid target set: {0}")]
    InvalidTarget(String),

    #[error("invalid spec `{input}`: {reason}")]
    InvalidSpec { input: String, reason: String },

    #[error("precheck failed: {0}")]
    Precheck(StartVerdict),

    #[error("degenerate subspace: {0}")]
    DegenerateSubspace(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed file {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl GroverError {
    pub(crate) fn dim_mismatch(what: &str, left: usize, right: usize) -> Self {
        GroverError::Dimension(format!("{what}: {left} != {right}"))
    }
}
