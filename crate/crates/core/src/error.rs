use thiserror::Error;

/// Errors surfaced by distribution construction, numerical evaluation, and analysis runs.
#[derive(Debug, Error)]
pub enum Error {
    /// Distribution parameters fail validation (non-positive rates, reversed bounds, ...).
    #[error("invalid distribution parameters: {0}")]
    InvalidParameters(String),

    /// A scale factor must be strictly positive.
    #[error("scale factor must be strictly positive, got {0}")]
    NonPositiveScale(f64),

    /// The requested point lies outside the domain the operation is defined on.
    #[error("point {x} is outside the valid domain [{lo}, {hi}]")]
    OutOfSupport { x: f64, lo: f64, hi: f64 },

    /// The operation requires a strictly positive evaluation point.
    #[error("evaluation point must be strictly positive, got {0}")]
    NonPositivePoint(f64),

    /// Survival mass underflowed to zero where a positive value is required.
    #[error("survival function is numerically zero at x = {0}")]
    ZeroSurvival(f64),

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature failed to converge: requested {requested:e}, achieved {achieved:e}")]
    QuadratureFailure { requested: f64, achieved: f64 },

    /// The operation needs a density and the distribution does not expose one.
    #[error("operation requires a density, which this distribution does not provide")]
    DensityNotAvailable,

    /// Market-level assumption violated (mean demand must exceed marginal cost).
    #[error("market assumption violated: mean demand {mean} must exceed marginal cost {cost}")]
    AssumptionViolated { mean: f64, cost: f64 },

    /// Classification produced verdicts that contradict known implications.
    #[error("inconsistent classification verdicts: {0}")]
    InconsistentVerdict(String),

    /// A scan or check was asked to operate on an empty region.
    #[error("requested region is empty: {0}")]
    EmptyRegion(String),

    /// Configuration file could not be parsed.
    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::InvalidParameters(_) | Error::NonPositiveScale(_) | Error::ConfigParse(_) => 2,
            Error::AssumptionViolated { .. } => 3,
            Error::QuadratureFailure { .. } => 4,
            Error::OutOfSupport { .. }
            | Error::NonPositivePoint(_)
            | Error::ZeroSurvival(_)
            | Error::DensityNotAvailable
            | Error::EmptyRegion(_) => 5,
            Error::InconsistentVerdict(_) => 6,
            Error::Io(_) => 7,
        }
    }
}
