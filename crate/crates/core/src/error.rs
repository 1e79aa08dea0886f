use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("second-order RKC needs at least 2 stages, got {0}")]
    TooFewStages(usize),

    #[error("damping must be finite and nonnegative, got {0}")]
    InvalidDamping(f64),

    #[error("unsupported method order {0} (expected 1 or 2)")]
    UnsupportedOrder(u8),

    #[error("step size must be positive and finite, got {0}")]
    InvalidStepSize(f64),

    #[error("scaled spectral radius must be finite and nonnegative, got {0}")]
    InvalidSpectralRadius(f64),

    #[error("no stage count up to {max} covers tau*rho = {scaled}")]
    StageCountTooLarge { scaled: f64, max: usize },

    #[error("stability violation: tau*rho = {scaled} exceeds the {stages}-stage bound {bound}")]
    StabilityViolation { scaled: f64, bound: f64, stages: usize },

    #[error("stage sequencing: abscissa {at} is outside the interpolation bracket [{lo}, {hi}]")]
    Sequencing { lo: f64, hi: f64, at: f64 },

    #[error("state vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite state after the step ending at t = {0}")]
    NonFinite(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
