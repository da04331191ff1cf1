//! Experiment runner for the `gscfw` solvers: TOML-configured grids,
//! line-delimited JSON run records, and success/iteration/time profiles.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod profile;
pub mod records;
pub mod runner;

pub use config::{ExperimentConfig, ProblemSpec};
pub use error::{BenchError, Result};
pub use profile::{profile_table, relative_error, ProfilePoint, RunSeries};
pub use records::RunRecord;
pub use runner::{run_experiment, run_single, ExperimentOutput, Job};
