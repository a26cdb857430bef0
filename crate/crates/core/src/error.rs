use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or argument is outside the domain of the operation.
    #[error("{name} = {value} is outside the domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    /// The caller asked for something that cannot be done with these inputs.
    #[error("{0}")]
    Usage(String),

    /// A sample or functional produced NaN or infinite values.
    #[error("{count} non-finite value(s) encountered in {context}")]
    NonFinite { count: usize, context: &'static str },

    /// Adaptive quadrature ran out of subdivisions.
    #[error("quadrature did not converge: estimate {estimate}, error {error:e} after {intervals} intervals")]
    Quadrature {
        estimate: f64,
        error: f64,
        intervals: usize,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(name: &'static str, value: f64, domain: &'static str) -> Result<T> {
    Err(Error::Domain { name, value, domain })
}
