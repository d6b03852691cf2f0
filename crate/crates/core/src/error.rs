use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A precondition on an input value was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid configuration, naming the offending field.
    #[error("invalid config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    /// Adaptive quadrature hit its refinement limit.
    #[error("quadrature did not converge: estimated error {achieved:e} > requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    /// Extrapolation or iteration failed to stabilize.
    #[error("no convergence: {what} (best estimate {best:e}, error {error:e})")]
    Convergence { what: String, best: f64, error: f64 },

    /// The exponent guard `alpha |t|^{N'} > 700` was tripped.
    #[error("exponential overflow at t = {t}")]
    Overflow { t: f64 },

    /// The mountain-pass solve stopped above the residual tolerance; carries the best iterate.
    #[error("mountain-pass solve did not reach the residual tolerance (residual {:e}, level {:e})", .0.residual, .0.level_c)]
    Stagnated(Box<crate::mountain_pass::SolveReport>),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
