use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the domain of an operation (NaN, out of range, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Airy Bi overflows f64 at this argument; use the scaled evaluation.
    #[error("Bi({w}) overflows f64; use the exponentially scaled representation")]
    Overflow { w: f64 },

    /// A potential descriptor failed validation.
    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    /// An iterative method did not converge.
    #[error("{method} did not converge after {iterations} iterations: {detail}")]
    NoConvergence {
        method: &'static str,
        iterations: usize,
        detail: String,
    },

    /// Quadrature failed to reach the requested tolerance.
    #[error("quadrature failed: {0}")]
    Quadrature(String),

    /// No isolated sign change of the shooting function could be found.
    #[error("could not bracket eigenvalue n={n}: {detail}")]
    Bracket { n: usize, detail: String },

    /// dψ/dz vanished at a computed eigenvalue.
    #[error("degenerate eigenvalue n={n}: dpsi/dz(0) = {value}")]
    Degenerate { n: usize, value: f64 },

    /// Two routes to the same quantity disagree beyond tolerance.
    #[error("inconsistent results: {0}")]
    Inconsistent(String),

    /// Finite-difference domain too short for the requested eigenpairs.
    #[error("truncation error: {0}")]
    Truncation(String),

    /// Not enough data for a requested statistic.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Configuration could not be parsed or validated.
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
