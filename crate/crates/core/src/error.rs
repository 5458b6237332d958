use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{what} = {value} lies outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error(
        "exponents {first} and {second} are closer than the relative gap {min_gap:e}; \
         merge them into a single value with multiplicity"
    )]
    Clustered {
        first: f64,
        second: f64,
        min_gap: f64,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(
        "quadrature did not converge: error estimate {estimate:e} exceeds tolerance {tolerance:e}"
    )]
    NonConvergence { estimate: f64, tolerance: f64 },

    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
