//! Command-line front end: JSON system documents, report rendering and the
//! `zsf` subcommands.

pub mod commands;
pub mod corpus;
pub mod document;
pub mod report;

pub use commands::{exit, run, Cli, Command, Output};
pub use document::{DocumentError, SystemDocument, ToleranceOverrides};
