use thiserror::Error;

/// Failures raised by frame construction, rate evaluation and integration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("energy gap {gap:e} at t = {t:e} is at or below the floor {floor:e}")]
    GapCollapse { t: f64, gap: f64, floor: f64 },

    #[error("local adiabatic parameter {alpha} at t = {t} is not below 1")]
    NonPerturbative { t: f64, alpha: f64 },

    #[error("central-difference w violates Hermiticity by {residual:e} (limit {limit:e}); reduce the step")]
    StepTooCoarse { residual: f64, limit: f64 },

    #[error("anchored gauge component vanishes at t = {t} (|v_{index}| = {magnitude:e})")]
    GaugeSingular { t: f64, index: usize, magnitude: f64 },

    #[error("query {value} lies outside the tabulated range [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("time {t} lies outside the path domain [0, {duration}]")]
    TimeOutOfDomain { t: f64, duration: f64 },

    #[error("frame history grid unsupported: {0}")]
    NonUniformGridUnsupported(String),

    #[error("loop not closed: control endpoints differ by {gap:e}")]
    LoopNotClosed { gap: f64 },

    #[error("adaptive step rejected {rejections} times in a row at t = {t} (dt = {dt:e})")]
    StepRejectionLimit { t: f64, dt: f64, rejections: usize },

    #[error("state became non-finite at t = {t}")]
    NonFiniteState { t: f64 },

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
