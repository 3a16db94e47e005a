//! Measurement noise channels.
//!
//! Every channel consumes the generator in test order, so a realization is a
//! pure function of its inputs and seed.

use alloc::format;

use crate::bits::{BitMatrix, BitVec};
use crate::error::{check_dim, param, Error, Result};
use crate::model::{noiseless_outcomes, ProblemInstance, ResultVector, TestMatrix};
use crate::rng::GtRng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    Noiseless,
    /// Each outcome flips independently with probability `q`.
    Bsc { q: f64 },
    /// Negative outcomes turn positive with probability `q0`; positive ones
    /// turn negative with probability `q1`.
    Asymmetric { q0: f64, q1: f64 },
    /// Each pooled defective fails to activate with probability `u`; an
    /// outcome that is still negative turns positive with probability `q0`.
    Activation { u: f64, q0: f64 },
}

fn in_unit(x: f64) -> bool {
    (0.0..1.0).contains(&x)
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseModel::Noiseless => Ok(()),
            NoiseModel::Bsc { q } => {
                if (0.0..0.5).contains(&q) {
                    Ok(())
                } else {
                    Err(param(format!("BSC flip probability q = {q} outside [0, 1/2)")))
                }
            }
            NoiseModel::Asymmetric { q0, q1 } => {
                if in_unit(q0) && in_unit(q1) && q0 + q1 < 1.0 {
                    Ok(())
                } else {
                    Err(param(format!(
                        "asymmetric noise needs q0, q1 in [0, 1) with q0 + q1 < 1 (q0 = {q0}, q1 = {q1})"
                    )))
                }
            }
            NoiseModel::Activation { u, q0 } => {
                if in_unit(u) && in_unit(q0) {
                    Ok(())
                } else {
                    Err(param(format!(
                        "activation noise needs u, q0 in [0, 1) (u = {u}, q0 = {q0})"
                    )))
                }
            }
        }
    }

    /// Activation parameters must also keep `2 - u^d - 2 q0` positive.
    pub fn validate_for(&self, d: usize) -> Result<()> {
        self.validate()?;
        if let NoiseModel::Activation { u, q0 } = *self {
            let margin = 2.0 - libm::pow(u, d as f64) - 2.0 * q0;
            if !(margin > 0.0) {
                return Err(param(format!(
                    "activation noise with u = {u}, q0 = {q0} has 2 - u^d - 2 q0 = {margin} <= 0 at d = {d}"
                )));
            }
        }
        Ok(())
    }

    /// Symmetric flip probability, if the model is noiseless or a BSC.
    pub fn symmetric_q(&self) -> Option<f64> {
        match *self {
            NoiseModel::Noiseless => Some(0.0),
            NoiseModel::Bsc { q } => Some(q),
            _ => None,
        }
    }

    pub fn is_noiseless(&self) -> bool {
        match *self {
            NoiseModel::Noiseless => true,
            NoiseModel::Bsc { q } => q == 0.0,
            NoiseModel::Asymmetric { q0, q1 } => q0 == 0.0 && q1 == 0.0,
            NoiseModel::Activation { u, q0 } => u == 0.0 && q0 == 0.0,
        }
    }

    /// Short tag used in CSV output and configs.
    pub fn kind(&self) -> &'static str {
        match self {
            NoiseModel::Noiseless => "noiseless",
            NoiseModel::Bsc { .. } => "bsc",
            NoiseModel::Asymmetric { .. } => "asym",
            NoiseModel::Activation { .. } => "activation",
        }
    }
}

impl core::fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match *self {
            NoiseModel::Noiseless => write!(f, "noiseless"),
            NoiseModel::Bsc { q } => write!(f, "bsc(q={q})"),
            NoiseModel::Asymmetric { q0, q1 } => write!(f, "asym(q0={q0};q1={q1})"),
            NoiseModel::Activation { u, q0 } => write!(f, "activation(u={u};q0={q0})"),
        }
    }
}

/// What the channel did to one outcome vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoiseRealization {
    /// `ŷ XOR y`.
    pub nu: BitVec,
    /// For activation noise with capture enabled: entry `(i, j)` is set when
    /// defective `j` was pooled in test `i` but did not activate.
    pub inactive: Option<BitMatrix>,
}

/// Passes `y` through a flip channel. Activation noise acts on individual
/// items and must go through [`apply_activation`].
pub fn apply_noise(
    y: &ResultVector,
    model: &NoiseModel,
    seed: u64,
) -> Result<(ResultVector, NoiseRealization)> {
    model.validate()?;
    let (p01, p10) = match *model {
        NoiseModel::Noiseless => {
            return Ok((
                y.clone(),
                NoiseRealization {
                    nu: BitVec::zeros(y.len()),
                    inactive: None,
                },
            ))
        }
        NoiseModel::Bsc { q } => (q, q),
        NoiseModel::Asymmetric { q0, q1 } => (q0, q1),
        NoiseModel::Activation { .. } => {
            return Err(Error::Usage(
                "activation noise depends on the pooling matrix; use apply_activation".into(),
            ))
        }
    };
    let mut rng = GtRng::new(seed);
    let mut nu = BitVec::zeros(y.len());
    for i in 0..y.len() {
        let flip_prob = if y.get(i) { p10 } else { p01 };
        if rng.unit() < flip_prob {
            nu.set(i, true);
        }
    }
    Ok((y.xor(&nu), NoiseRealization { nu, inactive: None }))
}

/// Activation noise without retaining the per-item mask.
pub fn apply_activation(
    m: &TestMatrix,
    inst: &ProblemInstance,
    u: f64,
    q0: f64,
    seed: u64,
) -> Result<(ResultVector, NoiseRealization)> {
    activation(m, inst, u, q0, seed, false)
}

/// Activation noise that also records which pooled defectives stayed inactive.
pub fn apply_activation_captured(
    m: &TestMatrix,
    inst: &ProblemInstance,
    u: f64,
    q0: f64,
    seed: u64,
) -> Result<(ResultVector, NoiseRealization)> {
    activation(m, inst, u, q0, seed, true)
}

fn activation(
    m: &TestMatrix,
    inst: &ProblemInstance,
    u: f64,
    q0: f64,
    seed: u64,
    capture: bool,
) -> Result<(ResultVector, NoiseRealization)> {
    NoiseModel::Activation { u, q0 }.validate_for(inst.d())?;
    check_dim("instance item count", m.cols(), inst.n())?;
    let t = m.rows();
    let mut rng = GtRng::new(seed);
    let mut y_hat = BitVec::zeros(t);
    let mut mask = capture.then(|| BitMatrix::zeros(t, inst.n()));
    for i in 0..t {
        let mut positive = false;
        for &j in inst.defectives() {
            if m.get(i, j) {
                if rng.unit() < u {
                    if let Some(mask) = mask.as_mut() {
                        mask.set(i, j, true);
                    }
                } else {
                    positive = true;
                }
            }
        }
        // The false-positive draw is always taken so that the stream position
        // does not depend on the raw outcome.
        let fp = rng.unit() < q0;
        if positive || fp {
            y_hat.set(i, true);
        }
    }
    let y = noiseless_outcomes(m, inst)?;
    let nu = y_hat.xor(&y);
    Ok((y_hat, NoiseRealization { nu, inactive: mask }))
}
