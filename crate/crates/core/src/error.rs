use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the support of the function it was passed to.
    #[error("{what} = {value} is outside [{lo}, {hi}]")]
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// The irregular horizontal law is undefined for a zero node density.
    #[error("irregular horizontal law needs lambda_n > 0 (got {0})")]
    DegenerateDensity(f64),

    #[error("invalid parameter `{key}`: {reason}")]
    InvalidParam { key: &'static str, reason: String },

    /// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
    #[error("quadrature did not converge: estimate {estimate} with error {error_estimate}")]
    Convergence { estimate: f64, error_estimate: f64 },

    /// A Taylor series hit its term budget before the tail dropped below tolerance.
    #[error("series not converged after {terms} terms (last term {last_term:e})")]
    SeriesNotConverged { terms: usize, last_term: f64 },

    #[error("config error at line {line}, key `{key}`: {reason}")]
    Config {
        key: String,
        line: usize,
        reason: String,
    },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64, lo: f64, hi: f64) -> Self {
        Error::Domain {
            what,
            value,
            lo,
            hi,
        }
    }

    pub(crate) fn param(key: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            key,
            reason: reason.into(),
        }
    }
}
