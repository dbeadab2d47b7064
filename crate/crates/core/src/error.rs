use thiserror::Error;

/// Errors raised by the geometry, channel, entropy and simulator modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("distance {r} outside the support [0, {diameter}]")]
    OutOfSupport { r: f64, diameter: f64 },

    #[error("negative distance {0}")]
    NegativeDistance(f64),

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown domain shape {0:?} (expected square, disk or triangle)")]
    UnknownShape(String),

    #[error("quadrature did not converge on [{a}, {b}] within depth {max_depth}")]
    QuadratureNotConverged { a: f64, b: f64, max_depth: u32 },

    #[error("indeterminate stationary distribution: frozen chain and no marginal supplied")]
    IndeterminateStationary,

    #[error("block length {0} outside the supported range 1..=12")]
    BlockLength(usize),

    #[error("need at least {required} steps, ensemble has {actual}")]
    TooFewSteps { required: usize, actual: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
