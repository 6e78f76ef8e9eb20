use std::path::PathBuf;

/// Process exit codes. Stable so scripts can branch on them.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const DATA: i32 = 3;
    pub const NUMERIC: i32 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Data {
        path: PathBuf,
        #[source]
        source: sme_core::Error,
    },

    #[error("{0}")]
    Core(#[from] sme_core::Error),

    #[error("model file: {0}")]
    ModelFile(String),

    #[error("out-of-dictionary symbol `{0}`")]
    UnknownSymbol(String),

    #[error("report: {0}")]
    Report(String),
}

pub type Result<T> = std::result::Result<T, AppError>;

impl AppError {
    pub fn exit_code(&self) -> i32 {
        use sme_core::Error as E;
        match self {
            AppError::Usage(_) => exit::USAGE,
            AppError::Io { .. } | AppError::ModelFile(_) | AppError::Report(_) => exit::DATA,
            AppError::UnknownSymbol(_) => exit::DATA,
            AppError::Data { source, .. } | AppError::Core(source) => match source {
                E::Config(_) => exit::USAGE,
                E::NonFinite(_) => exit::NUMERIC,
                E::Shape { .. }
                | E::UnknownId { .. }
                | E::Parse { .. }
                | E::Integrity(_)
                | E::UndefinedMetric(_) => exit::DATA,
            },
        }
    }
}
