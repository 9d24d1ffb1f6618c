//! Experiment harness for `avalanche-core`: configuration files, seed
//! derivation, replica-parallel execution, output files and self-tests.

pub mod config;
pub mod error;
pub mod experiments;
pub mod manifest;
pub mod selftest;

pub use config::{ExperimentConfig, ExperimentKind, ModelKind, RegionSpec};
pub use error::{CliError, Result};
pub use experiments::{run_experiment, thread_count, with_threads, Outcome};
pub use manifest::RunManifest;
