//! Command-line driver: experiment configs, sweeps and report tables.

pub mod config;
pub mod experiment;
pub mod report;
