//! Command-line front end for `hermite-core`: mask files, CSV/SVG output and
//! the `hermite` subcommands.

pub mod args;
pub mod commands;
pub mod error;
pub mod maskfile;
pub mod output;

pub use error::{CliError, Exit};
