//! Command-line front end: CSV ingestion, transformations, filter design and
//! validation experiments.

pub mod args;
pub mod data;
pub mod error;
pub mod run;

pub use error::{CliError, Result};
pub use run::{design, run, Design, DiagnosticsReport};
