use thiserror::Error;

/// Errors raised by the numerical layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive refinement ran out of budget before meeting the tolerance.
    #[error("accuracy error: {context}: estimated error {estimate:e} exceeds tolerance {tolerance:e}")]
    Accuracy {
        context: String,
        estimate: f64,
        tolerance: f64,
    },

    /// A configured resource cap (series terms, panels) was exceeded.
    #[error("resource limit: {0}")]
    Resource(String),

    /// A structural precondition (sizes, grid resolution, index window) failed.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Sampled growth is not bounded by any member of the polynomial ladder.
    #[error("growth classification failed: {0}")]
    Classification(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// Prefixes the error context, used when an inner quadrature fails for a
    /// specific matrix entry or criterion cell.
    pub fn within(self, what: impl std::fmt::Display) -> Self {
        match self {
            Error::Accuracy {
                context,
                estimate,
                tolerance,
            } => Error::Accuracy {
                context: format!("{what}: {context}"),
                estimate,
                tolerance,
            },
            Error::Domain(m) => Error::Domain(format!("{what}: {m}")),
            Error::Resource(m) => Error::Resource(format!("{what}: {m}")),
            Error::Precondition(m) => Error::Precondition(format!("{what}: {m}")),
            Error::Classification(m) => Error::Classification(format!("{what}: {m}")),
        }
    }
}
