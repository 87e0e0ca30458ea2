use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {max_deviation:.3e})")]
    NotHermitian { max_deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("subsystem index {index} out of range for {count} subsystems")]
    SubsystemOutOfRange { index: usize, count: usize },

    #[error("invalid permutation {0:?}")]
    InvalidPermutation(Vec<usize>),

    #[error("matrix function undefined at eigenvalue {eigenvalue:.6e}")]
    FunctionUndefined { eigenvalue: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("leg mismatch: {0}")]
    LegMismatch(String),

    #[error("support condition violated: {0}")]
    SupportViolation(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("malformed problem: {0}")]
    MalformedProblem(String),

    #[error("solver failed with status {status}: {detail}")]
    SolverFailure { status: String, detail: String },

    #[error("symmetry check failed: {0}")]
    SymmetryViolation(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}
