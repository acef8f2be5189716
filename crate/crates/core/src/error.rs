use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// A dense object would exceed the configured size cap.
    #[error("resource cap exceeded: {what} needs {requested}, cap is {cap}")]
    Capacity {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    /// A numerical postcondition failed (negative probability, complex expectation, ...).
    #[error("numerical error: {0}")]
    Numerical(String),

    /// The comparison problem has an empty hypothesis.
    #[error("degenerate scenario: {0}")]
    DegenerateScenario(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
