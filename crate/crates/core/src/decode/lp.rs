//! LP-relaxation decoders.
//!
//! Every program here has variables `x_0..x_{n-1}` followed by one slack
//! `η_i` per test. A negative test pins `η_i = m_i·x`; a positive test asks
//! for `m_i·x + η_i ≥ 1`.
//!
//! The `build_*` functions produce the programs literally. The decoders solve
//! an equivalent smaller problem instead: eliminating `η` leaves
//! `min c·x + Σ_{i∈P} (1 - m_i·x)⁺` over `{0 ≤ x ≤ 1, Σx = d̄}`, where `c_j`
//! counts the negative tests containing item `j` and `P` is the set of
//! positive tests kept by the variant. Its dual has one row per item, a
//! feasible all-slack starting basis, and returns `x` as the row multipliers.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::bits::BitVec;
use crate::error::{check_dim, param, Error, Result};
use crate::lp::{check_feasibility, solve, Feasibility, LinearProgram, Relation};
use crate::model::{ResultVector, TestMatrix};

/// Integrality tolerance for LP solutions and slack supports.
pub const TOL_INT: f64 = 1e-6;

/// Which tests contribute slack to the objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Both,
    /// Positive outcomes only.
    Positive,
    /// Negative outcomes only.
    Negative,
}

impl Side {
    fn keeps(self, outcome: bool) -> bool {
        match self {
            Side::Both => true,
            Side::Positive => outcome,
            Side::Negative => !outcome,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpDecodeOutput {
    /// `fractional` rounded at 0.5, ties to 1.
    pub estimate: BitVec,
    /// Slack per test at `fractional`; zero for tests the variant ignores.
    pub eta: Vec<f64>,
    pub fractional: Vec<f64>,
    /// Every entry of `fractional` within [`TOL_INT`] of 0 or 1.
    pub integral: bool,
    /// `Σ eta`.
    pub objective_value: f64,
    /// The `d̄` the program was solved with.
    pub assumed_defectives: usize,
}

fn check_inputs(m: &TestMatrix, y: &ResultVector, d_bar: usize) -> Result<()> {
    check_dim("outcome length", m.rows(), y.len())?;
    if d_bar > m.cols() {
        return Err(param(format!(
            "assumed defective count {d_bar} exceeds n = {}",
            m.cols()
        )));
    }
    Ok(())
}

fn row_terms(m: &TestMatrix, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
    m.row_support(i).map(|j| (j, 1.0))
}

fn build_with_side(m: &TestMatrix, y: &ResultVector, d_bar: usize, side: Side) -> Result<LinearProgram> {
    check_inputs(m, y, d_bar)?;
    let (n, t) = (m.cols(), m.rows());
    let mut lp = LinearProgram::new(n + t);
    for i in 0..t {
        let eta = n + i;
        let positive = y.get(i);
        if !side.keeps(positive) {
            lp.set_bounds(eta, 0.0, 0.0);
            continue;
        }
        lp.set_cost(eta, 1.0);
        if positive {
            lp.set_bounds(eta, 0.0, 1.0);
            lp.add_sparse_constraint(row_terms(m, i).chain([(eta, 1.0)]), Relation::Ge, 1.0)?;
        } else {
            lp.set_bounds(eta, 0.0, d_bar as f64);
            lp.add_sparse_constraint(row_terms(m, i).chain([(eta, -1.0)]), Relation::Eq, 0.0)?;
        }
    }
    lp.add_sparse_constraint((0..n).map(|j| (j, 1.0)), Relation::Eq, d_bar as f64)?;
    Ok(lp)
}

/// The slack-minimizing program for an assumed defective count `d_bar`.
pub fn build_nolipo_lp(m: &TestMatrix, y: &ResultVector, d_bar: usize) -> Result<LinearProgram> {
    build_with_side(m, y, d_bar, Side::Both)
}

/// Positive-outcome constraints only; negative tests get fixed zero slack.
pub fn build_nolipo_plus_lp(m: &TestMatrix, y: &ResultVector, d_bar: usize) -> Result<LinearProgram> {
    build_with_side(m, y, d_bar, Side::Positive)
}

/// Negative-outcome constraints only; positive tests get fixed zero slack.
pub fn build_nolipo_minus_lp(m: &TestMatrix, y: &ResultVector, d_bar: usize) -> Result<LinearProgram> {
    build_with_side(m, y, d_bar, Side::Negative)
}

/// Feasibility program over `x` alone: negative tests pool no defective,
/// positive tests pool at least one, and `Σx = d`.
pub fn build_lipo_lp(m: &TestMatrix, y: &ResultVector, d: usize) -> Result<LinearProgram> {
    check_inputs(m, y, d)?;
    let n = m.cols();
    let mut lp = LinearProgram::new(n);
    for i in 0..m.rows() {
        if y.get(i) {
            lp.add_sparse_constraint(row_terms(m, i), Relation::Ge, 1.0)?;
        } else {
            lp.add_sparse_constraint(row_terms(m, i), Relation::Eq, 0.0)?;
        }
    }
    lp.add_sparse_constraint((0..n).map(|j| (j, 1.0)), Relation::Eq, d as f64)?;
    Ok(lp)
}

/// Slack of each test at `x`: `m_i·x` for negative tests and `(1 - m_i·x)⁺`
/// for positive ones, zero where `side` ignores the test.
pub fn eta_at(m: &TestMatrix, y: &ResultVector, x: &[f64], side: Side) -> Result<Vec<f64>> {
    check_dim("outcome length", m.rows(), y.len())?;
    check_dim("point length", m.cols(), x.len())?;
    Ok((0..m.rows())
        .map(|i| {
            let positive = y.get(i);
            if !side.keeps(positive) {
                return 0.0;
            }
            let dot: f64 = m.row_support(i).map(|j| x[j]).sum();
            if positive {
                (1.0 - dot).max(0.0)
            } else {
                dot
            }
        })
        .collect())
}

/// `Σ_i η_i(x)` over the tests `side` keeps.
pub fn one_sided_objective(m: &TestMatrix, y: &ResultVector, x: &[f64], side: Side) -> Result<f64> {
    Ok(eta_at(m, y, x, side)?.iter().sum())
}

/// Rounds at 0.5 (ties to 1) and reports whether every entry was already
/// within `tol_int` of 0 or 1.
pub fn round_solution(fractional: &[f64], tol_int: f64) -> (BitVec, bool) {
    let estimate = fractional.iter().map(|&v| v >= 0.5).collect();
    let integral = fractional
        .iter()
        .all(|&v| v.abs() <= tol_int || (v - 1.0).abs() <= tol_int);
    (estimate, integral)
}

/// Solves the η-eliminated program through its dual and returns `x`.
fn solve_relaxation(m: &TestMatrix, y: &ResultVector, d_bar: usize, side: Side) -> Result<Vec<f64>> {
    check_inputs(m, y, d_bar)?;
    let n = m.cols();
    if d_bar == 0 {
        return Ok(vec![0.0; n]);
    }
    if d_bar == n {
        return Ok(vec![1.0; n]);
    }
    let use_negatives = side.keeps(false);
    let use_positives = side.keeps(true);

    let mut dual_index = vec![usize::MAX; m.rows()];
    let mut kept = 0;
    if use_positives {
        for (i, slot) in dual_index.iter_mut().enumerate() {
            if y.get(i) {
                *slot = kept;
                kept += 1;
            }
        }
    }
    let mu_plus = kept;
    let mu_minus = kept + 1;
    let w = kept + 2;

    let mut dual = LinearProgram::new(kept + 2 + n);
    for k in 0..kept {
        dual.set_cost(k, -1.0);
    }
    dual.set_cost(mu_plus, -(d_bar as f64));
    dual.set_cost(mu_minus, d_bar as f64);
    dual.set_bounds(mu_plus, 0.0, f64::INFINITY);
    dual.set_bounds(mu_minus, 0.0, f64::INFINITY);
    for j in 0..n {
        dual.set_cost(w + j, 1.0);
        dual.set_bounds(w + j, 0.0, f64::INFINITY);
    }
    for j in 0..n {
        let mut terms = Vec::new();
        let mut negatives = 0usize;
        for i in m.column_support(j) {
            if y.get(i) {
                if use_positives {
                    terms.push((dual_index[i], 1.0));
                }
            } else {
                negatives += 1;
            }
        }
        terms.extend([(mu_plus, 1.0), (mu_minus, -1.0), (w + j, -1.0)]);
        let c = if use_negatives { negatives as f64 } else { 0.0 };
        dual.add_sparse_constraint(terms, Relation::Le, c)?;
    }

    let sol = solve(&dual)?;
    if !sol.is_optimal() {
        return Err(Error::Solver("relaxation dual reported infeasible".into()));
    }
    Ok(sol.duals.iter().map(|&pi| (-pi).clamp(0.0, 1.0)).collect())
}

fn finish(m: &TestMatrix, y: &ResultVector, x: Vec<f64>, side: Side, d_bar: usize) -> Result<LpDecodeOutput> {
    let eta = eta_at(m, y, &x, side)?;
    let (estimate, integral) = round_solution(&x, TOL_INT);
    Ok(LpDecodeOutput {
        estimate,
        objective_value: eta.iter().sum(),
        eta,
        fractional: x,
        integral,
        assumed_defectives: d_bar,
    })
}

/// Minimizes total slack with `d` known.
pub fn decode_nolipo(m: &TestMatrix, y: &ResultVector, d: usize) -> Result<LpDecodeOutput> {
    let x = solve_relaxation(m, y, d, Side::Both)?;
    finish(m, y, x, Side::Both, d)
}

/// Minimizes slack over positive tests only.
pub fn decode_nolipo_plus(m: &TestMatrix, y: &ResultVector, d: usize) -> Result<LpDecodeOutput> {
    let x = solve_relaxation(m, y, d, Side::Positive)?;
    finish(m, y, x, Side::Positive, d)
}

/// Minimizes slack over negative tests only.
pub fn decode_nolipo_minus(m: &TestMatrix, y: &ResultVector, d: usize) -> Result<LpDecodeOutput> {
    let x = solve_relaxation(m, y, d, Side::Negative)?;
    finish(m, y, x, Side::Negative, d)
}

/// Any point consistent with noiseless outcomes and `Σx = d`; `None` when no
/// such point exists.
pub fn decode_lipo(m: &TestMatrix, y: &ResultVector, d: usize) -> Result<Option<LpDecodeOutput>> {
    let lp = build_lipo_lp(m, y, d)?;
    match check_feasibility(&lp)? {
        Feasibility::Infeasible => Ok(None),
        Feasibility::Feasible(x) => {
            let (estimate, integral) = round_solution(&x, TOL_INT);
            Ok(Some(LpDecodeOutput {
                estimate,
                eta: vec![0.0; m.rows()],
                fractional: x,
                integral,
                objective_value: 0.0,
                assumed_defectives: d,
            }))
        }
    }
}

/// Sweeps `d̄ = 0, 1, ..., D` and returns the first solution that is binary
/// and has at most `T q (1 + tau)` tests with nonzero slack. `None` signals a
/// decoding failure.
pub fn decode_nounlipo(
    m: &TestMatrix,
    y: &ResultVector,
    max_defectives: usize,
    q: f64,
    tau: f64,
) -> Result<Option<LpDecodeOutput>> {
    check_dim("outcome length", m.rows(), y.len())?;
    if !(0.0..0.5).contains(&q) {
        return Err(param(format!("q = {q} outside [0, 1/2)")));
    }
    if max_defectives < 1 {
        return Err(param("D must be at least 1"));
    }
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(param(format!("tau = {tau} must be nonnegative")));
    }
    let limit = m.rows() as f64 * q * (1.0 + tau);
    for d_bar in 0..=max_defectives.min(m.cols()) {
        let out = decode_nolipo(m, y, d_bar)?;
        if !out.integral {
            continue;
        }
        let support = out.eta.iter().filter(|&&e| e > TOL_INT).count();
        if support as f64 <= limit {
            return Ok(Some(out));
        }
    }
    Ok(None)
}

/// A unit of mass moved from one defective to one non-defective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerturbationSpec {
    phi: Vec<i8>,
    remove: usize,
    add: usize,
}

impl PerturbationSpec {
    /// `remove` must be in the support of `x` and `add` outside it.
    pub fn new(x: &BitVec, remove: usize, add: usize) -> Result<Self> {
        if remove >= x.len() || add >= x.len() || !x.get(remove) || x.get(add) {
            return Err(param(format!(
                "perturbation must take mass from a defective to a non-defective (remove {remove}, add {add})"
            )));
        }
        let mut phi = vec![0i8; x.len()];
        phi[remove] = -1;
        phi[add] = 1;
        Ok(PerturbationSpec { phi, remove, add })
    }

    /// All `d (n - d)` perturbations of `x`, ordered by (removed, added) index.
    pub fn all(x: &BitVec) -> Vec<Self> {
        let outside: Vec<usize> = x.not().iter_ones().collect();
        x.iter_ones()
            .flat_map(|r| {
                outside
                    .iter()
                    .map(move |&a| PerturbationSpec::new(x, r, a).expect("valid by construction"))
            })
            .collect()
    }

    pub fn phi(&self) -> &[i8] {
        &self.phi
    }

    pub fn removed(&self) -> usize {
        self.remove
    }

    pub fn added(&self) -> usize {
        self.add
    }

    /// `x + φ`.
    pub fn apply(&self, x: &BitVec) -> BitVec {
        let mut out = x.clone();
        out.set(self.remove, false);
        out.set(self.add, true);
        out
    }

    /// `η_i(x + φ) - η_i(x)` for one test row and its observed outcome.
    pub fn eta_change(&self, row: &BitVec, outcome: bool, x: &BitVec) -> i32 {
        let eta = |dot: usize| -> i32 {
            if outcome {
                (1 - dot as i32).max(0)
            } else {
                dot as i32
            }
        };
        let before = row.and_count(x);
        let after = before + row.get(self.add) as usize - row.get(self.remove) as usize;
        eta(after) - eta(before)
    }
}

#[cfg(test)]
mod tests;
