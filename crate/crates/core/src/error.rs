use thiserror::Error;

/// Errors raised by the collapse-model calculators and integrators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid geometry: {0}")]
    Geometry(String),

    /// A caller broke a documented precondition (e.g. passed an unnormalized state).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("outside validity range: {0}")]
    OutOfValidity(String),

    #[error("numeric failure at step {step}: {detail}")]
    NumericFailure { step: usize, detail: String },

    #[error("step size too large: norm drift {drift:.3e} at step {step} exceeds {tolerance:.3e}")]
    StepSize {
        step: usize,
        drift: f64,
        tolerance: f64,
    },

    #[error("probability {leaked:.3e} reached the outer grid margin at step {step}")]
    BoundaryLeak { step: usize, leaked: f64 },

    #[error("first passage not reached within {steps} steps (|Gamma| = {last:.3})")]
    Runaway { steps: usize, last: f64 },

    #[error("noise path exhausted after {0} increments")]
    NoiseExhausted(usize),

    #[error("degenerate localization: {0}")]
    DegenerateJump(String),

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidArgument(msg()))
    }
}

pub(crate) fn ensure_positive(name: &str, value: f64) -> Result<()> {
    ensure(value.is_finite() && value > 0.0, || {
        format!("{name} must be positive and finite, got {value}")
    })
}
