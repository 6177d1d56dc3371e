use thiserror::Error;

/// Errors reported by the library, grouped by how callers should react.
///
/// The CLI maps each class to a stable exit code: precondition failures to 2,
/// resource limits to 3 and input errors to 4.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input (unknown symbol, duplicate rule,
    /// mismatched alphabets, ...).
    #[error("input error: {0}")]
    Input(String),

    /// A stated precondition of an operation does not hold (morphism not
    /// primitive, fixed point undefined, alphabet too small, ...).
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A configurable budget or cap was exceeded. Raising the limit may make
    /// the operation succeed; the result is never silently degraded.
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
}

impl Error {
    /// Exit code class for the CLI (2, 3 or 4).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Precondition(_) => 2,
            Error::ResourceLimit(_) => 3,
            Error::Input(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
