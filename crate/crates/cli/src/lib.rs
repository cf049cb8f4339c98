// SPDX-License-Identifier: MIT OR Apache-2.0

//! Command-line front end for the `mxpbf` change-point library.

pub mod args;
pub mod commands;
pub mod csvio;
pub mod error;
pub mod report;

pub use args::Cli;
pub use commands::run;
pub use error::{exit, CliError, CliResult};
