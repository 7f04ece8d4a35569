//! Batch front end for classifying weighted composition operators: reads a
//! JSON configuration, runs classifications or parameter sweeps and writes
//! JSON/CSV reports.

pub mod config;
pub mod output;
pub mod runner;
pub mod suite;

pub use config::{Check, ConfigError, RunConfig};
pub use runner::{run, sweep, Options, Outcome, RunError, Status};
