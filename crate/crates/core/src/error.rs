use thiserror::Error;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function or model.
    #[error("domain error: {0}")]
    Domain(String),

    /// A series, quadrature or search exhausted its budget.
    #[error("numeric error: {message}")]
    Numeric {
        message: String,
        /// Best value reached before the budget ran out, when one exists.
        partial: Option<f64>,
    },

    /// The parameters are valid but this evaluator has no route for them.
    #[error("unsupported parameters: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>, partial: Option<f64>) -> Self {
        Error::Numeric {
            message: msg.into(),
            partial,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
