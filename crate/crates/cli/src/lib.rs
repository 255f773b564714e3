#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! File formats and the command-line front end of the `qls` tool.

pub mod catalog_io;
pub mod cli;
pub mod error;
pub mod table;

pub use error::CliError;
