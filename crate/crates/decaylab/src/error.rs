//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("eigenmode index {j} out of range 1..={max}")]
    InvalidMode { j: usize, max: usize },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("dt = {dt:.6e} exceeds the stability limit {limit:.6e}")]
    UnstableDt { dt: f64, limit: f64 },

    #[error("solution unstable at t = {t:.6}: |u| = {norm:.3e} with initial scale {scale:.3e}")]
    Instability { t: f64, norm: f64, scale: f64 },

    #[error("{op} is not defined for equation kind `{kind}`")]
    KindNotSupported { op: &'static str, kind: &'static str },

    #[error(
        "domain too small for the finite-speed guard: influence from the data \
         support can reach the boundary monitor layers (needs half-width >= \
         {required:.3}, have {half_width:.3})"
    )]
    SpeedGuard { required: f64, half_width: f64 },

    #[error("fit error: {0}")]
    Fit(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("unknown scenario id `{0}`")]
    UnknownScenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
