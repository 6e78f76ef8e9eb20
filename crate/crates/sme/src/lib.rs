//! File formats, manifests, reports and subcommand implementations for the
//! `sme` command-line tool. The model itself lives in `sme-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod model_file;
pub mod report;

pub use error::{exit, AppError, Result};
