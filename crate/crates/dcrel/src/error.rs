use thiserror::Error;

/// Errors surfaced by construction and checking.
///
/// Property *failures* are not errors: they are reported verdicts with
/// witnesses. An `Error` means the request itself could not be carried out.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("unresolved reference: {0}")]
    Unresolved(String),

    #[error("ill-formed input: {0}")]
    IllFormed(String),

    #[error("enumeration budget exceeded in {context}: needed {needed}, cap {cap}")]
    BudgetExceeded {
        context: String,
        needed: u128,
        cap: u128,
    },

    #[error("required limit absent: {0}")]
    MissingLimit(String),

    #[error("precondition not verified: {0}")]
    Unverified(String),

    /// A structural guarantee was violated at run time. Reaching this
    /// indicates a bug or an invalid instance that slipped past validation.
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("operation unsupported on this backend: {0}")]
    Unsupported(String),

    #[error("parse errors:\n{0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
