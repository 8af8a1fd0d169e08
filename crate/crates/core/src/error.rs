use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
///
/// Variants split into three families: input/format problems (`Parse`, `Io`),
/// shape and validity problems on values, and mathematical hypothesis failures
/// raised by the decomposition and factorization pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("packed length {found} does not match order {n} (expected {expected})")]
    PackedLength {
        n: usize,
        expected: usize,
        found: usize,
    },

    #[error("matrix order must be positive")]
    EmptyMatrix,

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not symmetric at ({row}, {col}): {upper} vs {lower}")]
    NotSymmetric {
        row: usize,
        col: usize,
        upper: f64,
        lower: f64,
    },

    #[error("index ({i}, {j}) out of range for order {n}")]
    IndexOutOfRange { n: usize, i: usize, j: usize },

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("Jacobi eigensolver did not converge in {sweeps} sweeps (off-diagonal norm {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },

    #[error(
        "definiteness routes disagree: eigenvalues say {eigen_verdict}, pivots say {pivot_verdict} \
         (min eigenvalue {min_eigenvalue:e}); tolerance too tight for the conditioning"
    )]
    InconsistentDefiniteness {
        eigen_verdict: bool,
        pivot_verdict: bool,
        min_eigenvalue: f64,
    },

    #[error("matrix is not positive semi-definite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("matrix is not positive definite (pivot {pivot:e} at index {index})")]
    NotPd { index: usize, pivot: f64 },

    #[error("matrix {index} is singular (normalized determinant {measure:e})")]
    Singular { index: usize, measure: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("image of the identity is not positive definite")]
    IdentityImageNotPd,

    #[error("image rank {rank} at {}", basis_label(*.index))]
    ImageRank { index: usize, rank: usize },

    #[error(
        "image of E_({i},{j})+E_({j},{i}) leaves its support: off-support magnitude {magnitude:e}"
    )]
    OffSupport { i: usize, j: usize, magnitude: f64 },

    #[error(
        "images of the diagonal basis do not form an orthonormal frame (deviation {deviation:e})"
    )]
    NotOrthonormal { deviation: f64 },

    #[error("recovered H is not positive semi-definite (min eigenvalue {min_eigenvalue:e})")]
    HNotPsd { min_eigenvalue: f64 },

    #[error("reconstruction residual {residual:e} exceeds limit {limit:e}")]
    ResidualTooLarge { residual: f64, limit: f64 },

    #[error("rank(H)={rank}; {expected}")]
    HRank { rank: usize, expected: &'static str },

    #[error("|u_{index}| = {magnitude} deviates from 1")]
    SignMagnitude { index: usize, magnitude: f64 },

    #[error("witness construction failed at {stage}: {reason}")]
    Witness { stage: &'static str, reason: String },

    #[error("internal numerical failure: {0}")]
    Internal(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for I/O and text-format failures, as opposed to mathematical ones.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::Io(_))
    }
}

/// One-based label of a diagonal basis element, `E_11`, `E_22`, ...
pub(crate) fn basis_label(index: usize) -> String {
    let k = index + 1;
    if k < 10 {
        format!("E_{k}{k}")
    } else {
        format!("E_({k},{k})")
    }
}
