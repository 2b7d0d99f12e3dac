//! File formats, invariant suites and the command implementations behind the
//! `mlk` binary.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 the input could
//! not be parsed, 3 the input parsed but a matrix or the embedding data is
//! invalid.

pub mod commands;
pub mod document;
pub mod error;
pub mod parallel;
pub mod suites;

pub use error::CliError;
