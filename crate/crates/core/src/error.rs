use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Hardy admissibility violated: a = {a} <= -(N-2)^2/4 = {floor}")]
    HardyViolation { a: f64, floor: f64 },
    #[error("hypothesis violation: {0}")]
    HypothesisViolation(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("empty Sobolev window ({lo}, {hi})")]
    EmptyWindow { lo: f64, hi: f64 },
    #[error("negative quadratic form ({0}); grid under-resolved near the origin")]
    NegativeForm(f64),
    #[error("division by zero in {0}")]
    DivisionByZero(&'static str),
    #[error("field does not decay at r_max: |u(r_max)| = {tail:.3e}, max|u| = {peak:.3e}")]
    TruncationWarning { tail: f64, peak: f64 },
    #[error("finite variance required but the field does not decay at r_max")]
    FiniteVarianceViolation,
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("regime mismatch: {0}")]
    RegimeMismatch(String),
    #[error("singular linear system at row {0}")]
    SolveFailure(usize),
    #[error("overflow in nonlinear phase at node {0}")]
    Overflow(usize),
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
