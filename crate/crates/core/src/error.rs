//! Error type shared by all modules.

/// Errors surfaced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of an operation
    /// (non-positive radius, impossible circle configuration, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration value is invalid or inconsistent (zero density,
    /// unrepresentable expected point count, empty grids, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// A numerical routine failed to reach its target accuracy. Carries the
    /// partial estimate and the error bound actually achieved so callers can
    /// decide whether the partial result is still usable.
    #[error("numerical error: {message} (partial value {value}, error bound {error_bound})")]
    Numerical {
        message: String,
        value: f64,
        error_bound: f64,
    },

    /// Filesystem or formatting failure in import/export helpers.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// A text representation could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
