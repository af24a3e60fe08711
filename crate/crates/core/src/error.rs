//! Crate-wide error type.
//!
//! Every failure carries enough diagnostic payload to state *which* invariant
//! broke and by how much.  Callers that surface errors to a command line
//! should distinguish input/validation failures from numerical-regime
//! failures; [`Error::is_numerical_regime`] encodes that split.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A matrix claimed Hermitian deviates from its adjoint beyond tolerance.
    #[error("matrix is not Hermitian: max |A - A*| = {deviation:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { deviation: f64, tol: f64 },

    /// A matrix required to be symmetric positive definite is not.
    #[error("matrix is not positive definite{context}: smallest eigenvalue {eigenvalue:.6e}")]
    NotPositiveDefinite { eigenvalue: f64, context: String },

    /// Shape mismatch between operands.
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        expected: usize,
        found: usize,
        context: String,
    },

    /// An index (frame index, mode label, grid point) is outside its range.
    #[error("index out of range in {context}: {index} not in 0..={max}")]
    IndexOutOfRange {
        index: i64,
        max: i64,
        context: String,
    },

    /// A leading-minor Gram determinant is too close to zero to divide by.
    #[error("near-singular Gram minor at index {index}: determinant {determinant:.3e} < 1e-14")]
    SingularGram { index: usize, determinant: f64 },

    /// A LAPACK routine reported failure (`info != 0`).
    #[error("LAPACK routine {routine} failed with info = {info}")]
    LapackFailure { routine: &'static str, info: i32 },

    /// Two fields that must share a grid (dimension/resolution) do not.
    #[error("grid mismatch: {context}")]
    GridMismatch { context: String },

    /// A coefficient table has non-negligible mass at the resolution boundary,
    /// so grid sampling would alias.  Re-run with a finer grid.
    #[error(
        "aliasing risk in field `{field}`: coefficient tail {tail:.3e} at the \
         boundary of a resolution-{grid_resolution} grid exceeds 1e-10; \
         increase grid_resolution"
    )]
    Aliasing {
        field: String,
        tail: f64,
        grid_resolution: usize,
    },

    /// An assembled operator's pre-averaging Hermiticity deviation is too
    /// large to trust; indicates aliasing or a convention bug, not input error.
    #[error(
        "assembled operator Hermiticity deviation {deviation:.3e} exceeds {tol:.3e}; \
         the truncation/grid combination is outside the trustworthy regime"
    )]
    HermiticityResidual { deviation: f64, tol: f64 },

    /// An eigendecomposition failed its post-hoc residual verification.
    #[error("eigendecomposition residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    ResidualCheck { residual: f64, tol: f64 },

    /// A product construction needed a grading that was not supplied.
    #[error("missing grading: {context}")]
    MissingGrading { context: String },

    /// A supplied grading is not a self-adjoint unitary squaring to identity.
    #[error("invalid grading: residual {residual:.3e} (must be Hermitian, unitary, square to I)")]
    GradingInvalid { residual: f64 },

    /// A grading fails to anticommute with the operator it must grade.
    #[error("grading does not anticommute with the operator: residual {residual:.3e}")]
    AnticommutationFailure { residual: f64 },

    /// The window edge ±Λ is too close to a spectrum value for counting
    /// diagnostics to be meaningful.
    #[error(
        "window edge lambda = {lambda} violates the gap hypothesis: distance \
         {distance:.3e} to the spectrum is below gap_tol = {gap_tol:.3e}"
    )]
    LambdaNearSpectrum {
        lambda: f64,
        distance: f64,
        gap_tol: f64,
    },

    /// An operation on sets of reals received an empty set.
    #[error("empty set: {context}")]
    EmptySet { context: String },

    /// Anything else that makes the input ill-formed.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// I/O failure while reading or writing files.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization failure.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// `true` for failures of the numerical regime (aliasing, Hermiticity
    /// drift, LAPACK non-convergence) as opposed to ill-formed input.
    pub fn is_numerical_regime(&self) -> bool {
        matches!(
            self,
            Error::Aliasing { .. }
                | Error::HermiticityResidual { .. }
                | Error::LapackFailure { .. }
                | Error::ResidualCheck { .. }
        )
    }
}
