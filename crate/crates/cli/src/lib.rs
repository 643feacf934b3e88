//! Command-line front end of `jnr-core`: file formats, reports and commands.

pub mod commands;
pub mod error;
pub mod io;
pub mod report;
