//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors produced by construction, verification and solver routines.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Two objects that must live on the same lattice Z^d disagree on d.
    #[error("dimension mismatch: expected d = {expected}, got d = {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Matrix shapes are incompatible for the requested operation.
    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },

    /// A caller-supplied argument is structurally invalid.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A matrix that must be Hermitian is not, within tolerance.
    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e} exceeds tol {tol:.3e})")]
    NotHermitian { asymmetry: f64, tol: f64 },

    /// A Gram matrix failed the positive-semidefiniteness test.
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.6e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    /// An operator that must be a contraction has norm > 1.
    #[error("operator is not a contraction (norm {norm:.6})")]
    NotContractive { norm: f64 },

    /// An iterative limit failed to settle within the iteration budget.
    #[error("no convergence after {iterations} iterations (last delta {last_delta:.3e})")]
    NoConvergence { iterations: usize, last_delta: f64 },

    /// A colligation failed its structural validation.
    #[error("colligation validation failed: {0}")]
    ValidationFailed(String),

    /// The lurking-isometry data is rank deficient, so no unitary
    /// closely-connected realization can be solved for directly.
    #[error(
        "realization data is rank deficient (domain defect {domain_defect}, \
         range defect {range_defect}); the colligation data is not strictly closely connected"
    )]
    NotStrictlyCloselyConnected {
        domain_defect: usize,
        range_defect: usize,
    },

    /// Required trajectory data was missing during a lattice sweep.
    #[error("missing boundary data at {site:?} (axis {axis})")]
    MissingBoundaryData { site: Vec<i64>, axis: usize },

    /// JSON (de)serialization failure.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    /// I/O failure while reading or writing bundled data.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, CoreError>;
