use thiserror::Error;

/// Errors surfaced by the toolkit.
///
/// `Inconsistency` is special: it signals that two routes which are
/// mathematically forced to agree (e.g. the two factor criteria, or the
/// equivalent factorizability tests) disagreed beyond tolerance. That is
/// never a property of the input alone; it means the numerics broke down.
#[derive(Debug, Error)]
pub enum Error {
    /// A dimension or site-count cap was exceeded.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// A documented precondition of an operation was violated.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Two mathematically equivalent routes disagreed beyond tolerance.
    #[error("numerical inconsistency: {0}")]
    Inconsistency(String),

    /// A condition that cannot occur for valid inputs occurred anyway.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
