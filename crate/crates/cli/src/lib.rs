//! File-based harness around `pwroc-core`: CSV ingestion, synthetic data,
//! evaluation runs, the range-based comparison and the cost benchmark.

pub mod bench;
pub mod compare;
pub mod config;
mod error;
pub mod evaluate;
pub mod io;

pub use error::{CliError, Result};
