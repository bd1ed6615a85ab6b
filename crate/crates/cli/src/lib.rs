//! Std companion to `sc-rates`: CSV and manifest files, parallel trial
//! execution, the validation suites and the command implementations behind
//! the `sc-rates` binary.

pub mod commands;
pub mod error;
pub mod manifest;
pub mod parallel;
pub mod results;
pub mod validate;

pub use error::{CliError, ExitStatus};
