use thiserror::Error;

/// Errors raised by the special functions, the transformation engine and the
/// propagator constructions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("Wronskian vanishes at x = {x}")]
    NodelessViolation { x: f64 },
    #[error("spectral condition violated: {0}")]
    ConditionViolation(String),
    #[error("singular evaluation: {0}")]
    Singularity(String),
    #[error("quadrature did not converge: {0}")]
    Convergence(String),
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("energy {energy} collides with an included level")]
    Pole { energy: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
