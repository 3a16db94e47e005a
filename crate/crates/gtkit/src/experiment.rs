use std::ops::Range;
use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use gtkit_core::trial::{run_trial, wilson_interval, TrialConfig, TrialRecord, Z_95};

use crate::config::{DefectiveCount, ExperimentConfig};
use crate::error::Result;
use crate::records::{write_summary_csv, TrialCsvWriter};

/// One summary row per experiment point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub n: usize,
    #[serde(rename = "D")]
    pub max_defectives: usize,
    /// A count or `random`.
    pub d: String,
    pub delta: f64,
    pub algo: String,
    pub noise: String,
    #[serde(rename = "T")]
    pub tests: usize,
    #[serde(rename = "T_theory")]
    pub tests_theory: Option<usize>,
    pub trials: u64,
    pub errors: u64,
    pub err_rate: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub eps_target: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub parallel: bool,
    /// Trials per batch; each finished batch is appended to the trial CSV.
    pub batch: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            parallel: true,
            batch: 256,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct OutputPaths {
    pub trials: Option<PathBuf>,
    pub summary: Option<PathBuf>,
}

fn timed_trial(config: &TrialConfig, index: u64) -> Result<TrialRecord> {
    let start = Instant::now();
    let mut record = run_trial(config, index)?;
    record.ms = start.elapsed().as_micros() as f64 / 1000.0;
    Ok(record)
}

/// Runs the trials in `range`, returned in index order either way.
pub fn run_trials(config: &TrialConfig, range: Range<u64>, parallel: bool) -> Result<Vec<TrialRecord>> {
    if parallel {
        range.into_par_iter().map(|i| timed_trial(config, i)).collect()
    } else {
        range.map(|i| timed_trial(config, i)).collect()
    }
}

/// Folds records in index order.
pub fn summarize(config: &ExperimentConfig, trial: &TrialConfig, records: &[TrialRecord]) -> SweepSummary {
    let trials = records.len() as u64;
    let errors = records.iter().filter(|r| r.is_error()).count() as u64;
    let (wilson_lo, wilson_hi) = wilson_interval(errors, trials, Z_95);
    let d = match (&config.defectives, config.defective_count()) {
        (Some(set), _) => set.len().to_string(),
        (None, DefectiveCount::Exact(d)) => d.to_string(),
        (None, DefectiveCount::Random) => "random".to_string(),
    };
    SweepSummary {
        n: config.n,
        max_defectives: config.max_defectives,
        d,
        delta: config.delta,
        algo: trial.algo.name().to_string(),
        noise: trial.noise.to_string(),
        tests: trial.tests,
        tests_theory: config.theory_tests().ok().flatten(),
        trials,
        errors,
        err_rate: if trials == 0 { 0.0 } else { errors as f64 / trials as f64 },
        wilson_lo,
        wilson_hi,
        eps_target: trial.eps_target(),
    }
}

/// Runs every trial of `config`, writing the CSVs named in `out`. Trial rows
/// are flushed batch by batch, so an interrupted run keeps what it finished.
pub fn run_experiment(
    config: &ExperimentConfig,
    options: RunOptions,
    out: &OutputPaths,
) -> Result<(Vec<TrialRecord>, SweepSummary)> {
    let trial = config.to_trial_config()?;
    let mut writer = out.trials.as_deref().map(TrialCsvWriter::create).transpose()?;
    let batch = options.batch.max(1) as u64;
    let mut records = Vec::with_capacity(config.trials as usize);
    let mut start = 0;
    while start < config.trials {
        let end = (start + batch).min(config.trials);
        let chunk = run_trials(&trial, start..end, options.parallel)?;
        if let Some(w) = writer.as_mut() {
            for r in &chunk {
                w.write(r)?;
            }
            w.flush()?;
        }
        records.extend(chunk);
        start = end;
    }
    let summary = summarize(config, &trial, &records);
    if let Some(path) = &out.summary {
        write_summary_csv(path, std::slice::from_ref(&summary))?;
    }
    Ok((records, summary))
}
