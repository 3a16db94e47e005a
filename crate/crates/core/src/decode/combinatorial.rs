use alloc::format;
use alloc::vec::Vec;

use crate::bits::BitVec;
use crate::error::{check_dim, param, Error, Result};
use crate::model::{ResultVector, TestMatrix};

/// Boundary slack for the No-CoMa threshold comparison.
const THRESHOLD_TOL: f64 = 1e-12;

/// Per-item counts behind a column-matching decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColumnMatch {
    /// Tests containing the item.
    pub tested: usize,
    /// Of those, tests with a positive outcome.
    pub matched: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutput {
    pub estimate: BitVec,
    /// Filled by the column-matching decoders.
    pub diagnostics: Option<Vec<ColumnMatch>>,
}

/// Clears every item that appears in a negative test.
pub fn decode_coco(m: &TestMatrix, y: &ResultVector) -> Result<DecodeOutput> {
    check_dim("outcome length", m.rows(), y.len())?;
    let negative = y.not();
    let estimate = (0..m.cols())
        .map(|j| !m.column(j).intersects(&negative))
        .collect();
    Ok(DecodeOutput {
        estimate,
        diagnostics: None,
    })
}

fn column_matches(m: &TestMatrix, y: &ResultVector) -> Vec<ColumnMatch> {
    (0..m.cols())
        .map(|j| {
            let col = m.column(j);
            ColumnMatch {
                tested: col.count_ones(),
                matched: col.and_count(y),
            }
        })
        .collect()
}

/// Declares an item defective when every test containing it is positive.
pub fn decode_coma(m: &TestMatrix, y: &ResultVector) -> Result<DecodeOutput> {
    check_dim("outcome length", m.rows(), y.len())?;
    let diag = column_matches(m, y);
    let estimate = diag.iter().map(|c| c.matched == c.tested).collect();
    Ok(DecodeOutput {
        estimate,
        diagnostics: Some(diag),
    })
}

/// Declares an item defective when at least a `1 - q(1 + tau)` fraction of
/// its tests are positive.
pub fn decode_nocoma(m: &TestMatrix, y: &ResultVector, q: f64, tau: f64) -> Result<DecodeOutput> {
    check_dim("outcome length", m.rows(), y.len())?;
    if q == 0.0 {
        return Err(Error::Usage(
            "No-CoMa needs q > 0; use decode_coma for noiseless outcomes".into(),
        ));
    }
    if !(q > 0.0 && q < 0.5) {
        return Err(param(format!("q = {q} outside (0, 1/2)")));
    }
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(param(format!("tau = {tau} must be positive")));
    }
    let slack = q * (1.0 + tau);
    if slack >= 1.0 {
        return Err(param(format!(
            "q(1 + tau) = {slack} >= 1 makes the threshold vacuous"
        )));
    }
    let diag = column_matches(m, y);
    let estimate = diag
        .iter()
        .map(|c| c.matched as f64 >= c.tested as f64 * (1.0 - slack) - THRESHOLD_TOL)
        .collect();
    Ok(DecodeOutput {
        estimate,
        diagnostics: Some(diag),
    })
}
