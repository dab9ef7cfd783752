//! Scenario runner for the displacemon simulator: reads a TOML scenario,
//! runs one experiment and writes CSV/JSON artifacts with a manifest.

// Parameter checks are written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{load, ScenarioConfig};
pub use error::CliError;
pub use output::{RunManifest, MANIFEST};
pub use run::{run, RunOutcome, RunRequest, Subcommand, OUT_ENV};
