//! Script language and runner behind the `torfib` command.

pub mod cache;
pub mod dsl;
pub mod runner;

pub use dsl::{parse, Diagnostic, InputModel};
pub use runner::{run_model, run_text, CliError, Report, RunOptions};
