use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not symmetric (max asymmetry {max_asymmetry:.3e})")]
    NotSymmetric { max_asymmetry: f64 },

    #[error("zero pivot encountered at row {row}")]
    ZeroPivot { row: usize },

    #[error("all {dropped} columns were dropped as numerically dependent")]
    EmptyBasis { dropped: usize },

    #[error("basis is not orthonormal (max |QᵀQ - I| = {deviation:.3e})")]
    NotOrthonormal { deviation: f64 },

    #[error("singular projection matrix: {0}")]
    SingularProjection(String),

    #[error("subdomain {subdomain}: {source}")]
    Subdomain {
        subdomain: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("eigensolver did not converge after {iterations} sweeps")]
    NoConvergence { iterations: usize },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("operator of order {n} exceeds dense spectrum cap {cap}; use Ritz estimates instead")]
    SpectrumCap { n: usize, cap: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
