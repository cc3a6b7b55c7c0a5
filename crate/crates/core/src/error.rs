use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: asymmetry {asymmetry:e} exceeds tolerance {tol:e}")]
    NotHermitian { asymmetry: f64, tol: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal mass {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },

    #[error("matrix is singular to working precision")]
    Singular,

    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("invalid frame spec: {0}")]
    InvalidSpec(String),

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid row subset: {0}")]
    InvalidSubset(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("problem too large: {0}")]
    TooLarge(String),

    #[error("invalid noise model: {0}")]
    InvalidModel(String),

    /// A construction produced a result that contradicts its own guarantees.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}
