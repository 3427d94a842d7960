use thiserror::Error;

/// Errors raised by the simulator and the analytical evaluator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates its documented range.
    #[error("configuration error: {0}")]
    Config(String),

    /// A value fell outside the domain of a map or formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// Bit/symbol framing mismatch.
    #[error("framing error: {0}")]
    Framing(String),

    /// Stream state (chip history) is missing or has the wrong shape.
    #[error("state error: {0}")]
    State(String),

    /// Two mixture means coincide, so the partial-fraction coefficients do not exist.
    #[error("degenerate fading mixture: entries {first} and {second} share mean {value}")]
    Degenerate {
        first: usize,
        second: usize,
        value: f64,
    },

    /// Adaptive quadrature did not reach the requested tolerance.
    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e}")]
    Quadrature { estimate: f64, error: f64 },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
