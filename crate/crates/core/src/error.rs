use alloc::string::String;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("qudit dimension must be at least 2, got {0}")]
    InvalidDim(usize),
    #[error("unknown qudit label `{0}`")]
    UnknownLabel(String),
    #[error("qudit label `{0}` appears more than once")]
    DuplicateLabel(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("register too large: {0} entries exceed the dense storage cap")]
    TooLarge(usize),
    #[error("index {index} out of range 0..{bound}")]
    OutOfRange { index: usize, bound: usize },
    #[error("coefficients cannot be normalized: quadratic form is {0}")]
    NotNormalizable(f64),
    #[error("coefficients violate the normalization constraint by {0:e}")]
    Unnormalized(f64),
    #[error("degenerate machine: {0}")]
    Degenerate(&'static str),
    #[error("coefficient system is singular for these targets")]
    Singular,
    #[error("mixture infeasible: {0}")]
    InfeasibleMixture(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),
}

pub type Result<T> = core::result::Result<T, Error>;
