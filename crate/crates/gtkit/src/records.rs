use std::fs::File;
use std::path::Path;

use serde::{Deserialize, Serialize};

use gtkit_core::trial::{Algorithm, TrialRecord};

use crate::error::{format_err, io_err, Result};
use crate::experiment::SweepSummary;

pub const TRIAL_HEADER: &str = "trial,seed,T,algo,exact,false_def,false_nondef,fail,integral,ms";
pub const SUMMARY_HEADER: &str =
    "n,D,d,delta,algo,noise,T,T_theory,trials,errors,err_rate,wilson_lo,wilson_hi,eps_target";

// Flags are written as 0/1; `integral` is empty for combinatorial decoders.
#[derive(Debug, Serialize, Deserialize)]
struct TrialRow {
    trial: u64,
    seed: u64,
    #[serde(rename = "T")]
    tests: usize,
    algo: String,
    exact: u8,
    false_def: usize,
    false_nondef: usize,
    fail: u8,
    integral: Option<u8>,
    ms: f64,
}

impl From<&TrialRecord> for TrialRow {
    fn from(r: &TrialRecord) -> Self {
        TrialRow {
            trial: r.trial,
            seed: r.seed,
            tests: r.tests,
            algo: r.algo.name().to_string(),
            exact: r.exact as u8,
            false_def: r.false_def,
            false_nondef: r.false_nondef,
            fail: r.fail as u8,
            integral: r.integral.map(u8::from),
            ms: r.ms,
        }
    }
}

fn flag(v: u8, name: &str) -> Result<bool> {
    match v {
        0 => Ok(false),
        1 => Ok(true),
        _ => Err(format_err(format!("column {name} must be 0 or 1, found {v}"))),
    }
}

impl TryFrom<TrialRow> for TrialRecord {
    type Error = crate::HarnessError;
    fn try_from(r: TrialRow) -> Result<Self> {
        Ok(TrialRecord {
            trial: r.trial,
            seed: r.seed,
            tests: r.tests,
            algo: Algorithm::from_name(&r.algo)
                .ok_or_else(|| format_err(format!("unknown algo {:?}", r.algo)))?,
            exact: flag(r.exact, "exact")?,
            false_def: r.false_def,
            false_nondef: r.false_nondef,
            fail: flag(r.fail, "fail")?,
            integral: r.integral.map(|v| flag(v, "integral")).transpose()?,
            ms: r.ms,
        })
    }
}

/// Streams trial rows to a CSV file.
#[derive(Debug)]
pub struct TrialCsvWriter {
    inner: csv::Writer<File>,
}

impl TrialCsvWriter {
    pub fn create(path: &Path) -> Result<Self> {
        let file = File::create(path).map_err(io_err(path))?;
        let mut inner = csv::WriterBuilder::new().has_headers(false).from_writer(file);
        inner.write_record(TRIAL_HEADER.split(','))?;
        Ok(TrialCsvWriter { inner })
    }

    pub fn write(&mut self, record: &TrialRecord) -> Result<()> {
        self.inner.serialize(TrialRow::from(record))?;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<()> {
        self.inner.flush().map_err(|e| crate::HarnessError::Csv(e.into()))
    }
}

pub fn read_trial_csv(path: &Path) -> Result<Vec<TrialRecord>> {
    let mut reader = csv::Reader::from_path(path)?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != TRIAL_HEADER {
        return Err(format_err(format!("unexpected trial header {:?}", header.join(","))));
    }
    reader
        .deserialize::<TrialRow>()
        .map(|row| TrialRecord::try_from(row?))
        .collect()
}

pub fn write_summary_csv(path: &Path, rows: &[SweepSummary]) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    w.write_record(SUMMARY_HEADER.split(','))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

pub fn read_summary_csv(path: &Path) -> Result<Vec<SweepSummary>> {
    let mut reader = csv::Reader::from_path(path)?;
    Ok(reader.deserialize().collect::<std::result::Result<_, _>>()?)
}
