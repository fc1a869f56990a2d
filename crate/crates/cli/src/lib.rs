//! Command-line harness around `abcd-ldg-core`: configuration, drivers
//! for the accuracy tables and collision runs, and CSV/JSON output.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
