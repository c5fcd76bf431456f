use thiserror::Error;

/// Errors raised by the laboratory's numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point ({x:e}, {y:e}) lies outside {chart}")]
    Domain { chart: &'static str, x: f64, y: f64 },

    #[error("root finder did not converge after {iterations} steps (last {last:e}, residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        last: f64,
        residual: f64,
    },

    #[error("no vertical tangency of the transition image for n = {n}")]
    NoVerticalTangency { n: u32 },

    #[error("parameter search left the t-window for n = {n}")]
    WindowExceeded { n: u32 },

    #[error("small expanding condition violated: {0}")]
    SmallExpandingViolation(String),

    #[error("projection pr_x = {0:e} is not positive (wrong quadrant for this sign case)")]
    WrongQuadrant(f64),

    #[error("orbit left the chart: {0}")]
    ChartExit(String),

    #[error("slope bound fails: {0}")]
    LemmaCounterexample(String),

    #[error("search exhausted: {0}")]
    NotFound(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("sign case {0} is not adaptable")]
    NotAdaptable(String),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, LabError>;
