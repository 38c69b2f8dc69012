//! File formats, plots, the experiment harness and the `netid` command-line
//! front end on top of [`netid_core`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dot;
mod error;
pub mod experiment;
pub mod io;
pub mod report;
pub mod svg;

pub use error::{CliError, CliResult};
