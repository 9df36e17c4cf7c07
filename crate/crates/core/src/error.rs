use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("profile has {got} samples, grid expects {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("profile contains non-finite values")]
    NonFinite,

    #[error("inadmissible class (m, n) = ({m}, {n}): {reason}")]
    InadmissibleClass { m: u32, n: u32, reason: String },

    #[error("ODE integration failed at θ = {theta}: {reason}")]
    IntegrationFailure { theta: f64, reason: String },

    #[error("no sign change of the half-period defect on (1, {cap}] for target {target}")]
    BracketingFailure { target: f64, cap: f64 },

    #[error(
        "Newton polish did not converge (residual {residual:e} after {iterations} iterations)"
    )]
    NewtonDivergence { residual: f64, iterations: usize },

    #[error("grid too coarse for class: {0}")]
    UnderResolved(String),

    #[error("invalid ε = {eps}: {reason}")]
    InvalidEpsilon { eps: f64, reason: String },

    #[error("curvature blowup: min(h + h_θθ) = {min_radius:e}")]
    CurvatureBlowup { min_radius: f64 },

    #[error("non-positive curvature (min κ = {0:e})")]
    NonPositiveCurvature(f64),

    #[error("time step underflow (dt = {dt:e} at time {time})")]
    StepUnderflow { dt: f64, time: f64 },

    #[error("invalid time {0}: the unnormalized frame requires t < 1/2")]
    InvalidTime(f64),

    #[error("state mismatch: {0}")]
    StateMismatch(String),

    #[error("invalid run configuration: {0}")]
    InvalidConfig(String),

    #[error("no transversal self-crossing closes the leaf")]
    NoCrossing,

    #[error("need at least {needed} leaf-area records, found {found}")]
    InsufficientRecords { needed: usize, found: usize },

    #[error("malformed profile record: {0}")]
    Parse(String),
}
