//! Experiment driver: configuration, commands and CSV/JSON output.

pub mod commands;
pub mod config;
pub mod output;
