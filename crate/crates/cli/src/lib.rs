//! Config-driven front end: each subcommand reads a [`config::RunConfig`],
//! runs one stage of the pipeline and writes CSV/JSON artifacts stamped with
//! the config hash and tool version.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod gnuplot;
pub mod output;

pub use config::{Delay, DelayUnit, Preset, RunConfig};
pub use error::CliError;
pub use output::{Output, TOOL_VERSION};
