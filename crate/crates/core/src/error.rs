use thiserror::Error;

/// Errors raised before any law is evaluated.
///
/// Law *violations* are never errors; they are recorded in a
/// [`LawReport`](crate::report::LawReport).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Input is malformed: unknown elements, tables of the wrong size,
    /// mismatched endpoints.
    #[error("structural error: {0}")]
    Structural(String),
    /// Input is well formed but an operation's precondition does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// Enumeration would exceed the carrier cap.
    #[error("carrier of {size} elements exceeds the enumeration cap of {cap} (set OPCMLINK_MAX_CARRIER to raise it)")]
    Resource { size: usize, cap: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn structural(msg: impl Into<String>) -> Error {
    Error::Structural(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
