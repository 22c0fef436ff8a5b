//! File formats, orchestration and the command-line frontend for
//! `teichflow`.

pub mod acceptance;
pub mod cli;
pub mod config;
pub mod csv_io;
pub mod error;
pub mod numfmt;
pub mod parallel;
pub mod plot;
pub mod report;

pub use error::{LabError, LabResult};
