//! File formats, configuration, and the parallel Monte Carlo runner around
//! [`gtkit_core`].
//!
//! A run is described by an [`ExperimentConfig`] (usually read from JSON),
//! executed with [`run_experiment`], and persisted as a per-trial CSV plus a
//! one-row summary CSV. Aggregates do not depend on the thread schedule.

mod config;
mod error;
mod experiment;
pub mod formats;
mod records;

pub use config::{DefectiveCount, ExperimentConfig, NoiseConfig, TestCount};
pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, run_trials, summarize, OutputPaths, RunOptions, SweepSummary};
pub use records::{
    read_summary_csv, read_trial_csv, write_summary_csv, TrialCsvWriter, SUMMARY_HEADER, TRIAL_HEADER,
};

pub use gtkit_core;
