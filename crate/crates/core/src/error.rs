use thiserror::Error;

/// Errors raised by the solver, the diagnostics and the run harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field length {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("field mean {mean:e} exceeds zero-mean tolerance {tolerance:e}")]
    NonZeroMean { mean: f64, tolerance: f64 },

    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("closed-form solution denominator {min_denominator:e} below blowup-proximity threshold")]
    BlowupProximity { min_denominator: f64 },

    #[error("h2 is ill-defined for this state: {0}")]
    IllDefinedH2(String),

    #[error("inconsistent initial data: {0}")]
    InconsistentData(String),

    #[error("kernel argument w = {0} is singular (w = 1)")]
    SingularKernel(f64),

    #[error("kernel argument w = {0} is outside the domain w >= 0")]
    KernelDomain(f64),

    #[error("kernel inequality violated: {0}")]
    InequalityViolation(String),

    #[error("insufficient support: {0}")]
    InsufficientSupport(String),

    #[error("margin undefined for the zero field")]
    UndefinedMargin,

    #[error("blowup-time fit unavailable: {0}")]
    FitUnavailable(String),

    #[error("non-finite value in Runge-Kutta stage {stage} at t = {time}")]
    NumericalOverflow { stage: usize, time: f64 },

    #[error("omega mean drifted to {drift:e} in one step")]
    MeanDrift { drift: f64 },

    #[error("config error in `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
