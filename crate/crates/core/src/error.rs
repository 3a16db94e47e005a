use alloc::string::String;

/// Errors raised by parameter validation and by the LP engine.
///
/// Decoder failures that are part of normal operation (an infeasible LiPo
/// program, a No-Un-LiPo sweep without an accepted candidate) are reported in
/// the decoder outputs, not through this type.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("malformed linear program: {0}")]
    MalformedProgram(String),

    #[error("LP solver defect: {0}")]
    Solver(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

pub(crate) fn check_dim(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension {
            what,
            expected,
            found,
        })
    }
}
