//! Configuration, orchestration and export for phase-estimation experiments.

// `!(x > 0.0)` style checks reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod export;
pub mod fig4;
pub mod manifest;
pub mod params;
pub mod pipeline;

pub use config::{ExperimentConfig, Mode};
pub use error::{CliError, CliResult};
pub use fig4::{reproduce_fig4, Fig4Options, ParameterProfile};
pub use manifest::RunManifest;
pub use params::solve_params;
pub use pipeline::{resolve_out_dir, run_experiment, RunOutcome, Stages, OUT_DIR_ENV};
