//! Error type shared by every module of the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors reported by model construction, transform evaluation, root
/// finding, Laplace inversion and the Monte Carlo estimators.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A model specification string failed to parse. `index` is the
    /// offending whitespace-separated token (0-based), `offset` the byte
    /// offset of that token in the input.
    #[error("parse error at token {index} (byte {offset}): {message}")]
    Parse {
        index: usize,
        offset: usize,
        message: String,
    },

    /// A parameter violates a model invariant (e.g. sigma <= 0).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An operation was called on a model of the wrong one-sidedness class.
    #[error("{operation} requires a spectrally {required} model, got {model}")]
    WrongSidedness {
        operation: &'static str,
        required: &'static str,
        model: String,
    },

    /// An argument lies outside the domain of the requested quantity.
    #[error("domain error in {operation}: {message}")]
    Domain {
        operation: &'static str,
        message: String,
    },

    /// The model class does not support the requested quantity at all.
    #[error("unsupported model in {operation}: {message}")]
    Unsupported {
        operation: &'static str,
        message: String,
    },

    /// A numeric procedure failed (non-finite transform value, overshoot
    /// beyond the clamping budget, non-convergence, ...).
    #[error("numeric failure in {operation}: {message}")]
    Numeric {
        operation: &'static str,
        message: String,
    },

    /// Root bracketing failed; the message carries the search diagnostics.
    #[error("root bracketing failed in {operation}: {message}")]
    Bracket {
        operation: &'static str,
        message: String,
    },
}
