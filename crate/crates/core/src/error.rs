use alloc::string::String;

/// Errors produced by the core library.
///
/// The variants map onto the failure classes the command-line tool reports
/// with distinct exit codes: configuration, data integrity and numerics.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch in {op}: expected {expected}, got {actual}")]
    Shape {
        op: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("symbol id {id} out of range (dictionary has {len} symbols)")]
    UnknownId { id: usize, len: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("data integrity: {0}")]
    Integrity(String),

    #[error("metric undefined: {0}")]
    UndefinedMetric(&'static str),

    #[error("numerical failure: {0}")]
    NonFinite(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn check_len(op: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::Shape {
            op,
            expected,
            actual,
        })
    }
}
