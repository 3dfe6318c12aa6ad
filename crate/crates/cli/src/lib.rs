//! Command-line front end for the qtherm toolkit: experiment configs in,
//! CSV or JSON result tables out.

pub mod catalog;
pub mod config;
pub mod error;
pub mod experiments;
pub mod run;
pub mod table;

pub use catalog::Experiment;
pub use config::ExperimentConfig;
pub use error::CliError;
pub use table::ResultTable;
