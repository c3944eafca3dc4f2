//! File formats and command-line front-end for [`twoproof_core`].

pub mod cli;
pub mod error;
pub mod formats;

pub use error::{CliError, Result};
