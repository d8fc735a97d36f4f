//! Command-line front end and verification suites for the pair nilmanifolds.

pub mod config;
pub mod error;
pub mod report;
pub mod state;
pub mod suites;
