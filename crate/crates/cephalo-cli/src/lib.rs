//! File formats, reports, plots, and the command-line front end for the
//! growth-direction prediction pipeline.
//!
//! The core algorithms live in `cephalo-core`; this crate owns everything
//! that touches the filesystem: CSV schemas, JSON configs and reports
//! (`"schema": 1`), SVG plot emission, and the `cephalo` binary's
//! subcommands.

pub mod commands;
pub mod config;
pub mod csv_io;
pub mod error;
pub mod model_io;
pub mod report;
pub mod svg;

pub use error::CliError;
