use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("order ν = {0} is outside [2, 3]")]
    NuOutOfRange(f64),

    #[error("ω_ν({t}) is undefined for ν = {nu} (requires t < 1)")]
    OmegaDomain { nu: f64, t: f64 },

    #[error("invalid GSC constant M_f = {0}")]
    InvalidConstant(f64),

    #[error("step-size parameters are undefined (δ = {delta}, ξ = {xi})")]
    UndefinedStepParams { delta: f64, xi: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("linear oracle violation: gap = {0}")]
    OracleViolation(f64),

    #[error("point is outside the domain of the objective")]
    NotInDomain,

    #[error("starting point is infeasible: {0}")]
    InfeasibleStart(String),

    #[error("matrix is not symmetric (max asymmetry {0})")]
    Asymmetric(f64),

    #[error("backtracking did not accept a step after {0} increases")]
    BacktrackingFailed(usize),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("LIBSVM parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
