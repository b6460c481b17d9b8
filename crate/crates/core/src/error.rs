use thiserror::Error;

/// Errors raised by the truncated Hardy-space machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degree budget exceeded: need degree {needed}, cap is {cap}")]
    BudgetExceeded { needed: usize, cap: usize },

    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not analytic: negative-index coefficient of magnitude {witness:.3e}")]
    NotAnalytic { witness: f64 },

    #[error("empty generator list")]
    EmptyInput,

    #[error("subspace inclusion fails: residual {residual:.3e} exceeds tolerance")]
    NotASubspaceOf { residual: f64 },

    #[error("exponent {exponent} lies outside the tracked cap {cap}")]
    OutOfCap { exponent: usize, cap: usize },

    #[error("element is not a member of the subspace (residual {residual:.3e})")]
    NotAMember { residual: f64 },

    #[error("decomposition did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("Blaschke zero {index} has modulus {modulus} (must be < 1)")]
    ZeroOnCircle { index: usize, modulus: f64 },

    #[error("Wold depth exhausted: uncovered residual {residual:.3e}")]
    DepthExhausted { residual: f64 },

    #[error("unsupported operation: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
