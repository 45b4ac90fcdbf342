//! Config files, built-in scenarios and output formats for running the
//! `sbc-core` simulator from the command line.

pub mod compare;
pub mod config;
mod error;
pub mod output;
pub mod plot;
pub mod run;
pub mod scenario;

pub use error::LabError;
