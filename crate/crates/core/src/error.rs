use thiserror::Error;

/// Errors raised by the numerical kernels and solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("gamma function pole at x = {pole}")]
    Pole { pole: f64 },

    #[error("argument z = {z} is outside the supported range (z <= {max})")]
    UnsupportedRange { z: f64, max: f64 },

    #[error("quadrature did not reach tolerance {tol:e}: estimate {estimate}, error estimate {error:e}")]
    Accuracy { estimate: f64, error: f64, tol: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("degenerate horizon: mode {k} denominator {value:e} is below 1e-300")]
    DegenerateHorizon { k: usize, value: f64 },

    #[error("reference solver unstable: {0}")]
    Unstable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
