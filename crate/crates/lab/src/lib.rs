//! Experiment drivers for the diagonal and diffusion test problems.

pub mod bound_suite;
pub mod bvp;
pub mod config;
pub mod diag;
pub mod output;
pub mod run;

pub use config::{ExperimentConfig, ExperimentId, Resolved};
pub use output::{version, Count, Output};
pub use run::{run_experiment, RunOutcome};
