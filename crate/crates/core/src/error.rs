use thiserror::Error;

/// Errors raised by the engine.
///
/// Variants are grouped by the kind of contract that was broken so callers
/// (the CLI in particular) can map them onto exit codes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed graph or set input: self-loops, out-of-range ids, non-subsets.
    #[error("structural error: {0}")]
    Structural(String),

    /// A precondition of an operation was not met (e.g. `i` not in `C`).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Illegal gadget or reduction parameters.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The instance is too large for the requested exhaustive strategy.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// Syntax error while reading an instance file.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// The document parsed but violates a semantic rule.
    #[error("invalid field `{field}`: {message}")]
    Validation { field: String, message: String },

    /// An internal invariant failed. Always a bug.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
