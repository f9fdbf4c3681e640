//! Command-line front end: configuration, CSV reports and subcommands.

pub mod app;
pub mod config;
pub mod report;
