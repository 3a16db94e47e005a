//! Two-phase revised simplex over box-bounded variables.
//!
//! Variables are shifted so every lower bound is zero; nonbasic variables sit
//! at either bound. The basis inverse is held densely and updated by pivoting,
//! with periodic refactorization. Pricing is Dantzig's rule until a long run
//! of degenerate pivots, after which Bland's rule takes over until progress
//! resumes, so the method always terminates.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{LinearProgram, Relation};
use crate::error::{Error, Result};

const TOL_DJ: f64 = 1e-9;
const TOL_PIVOT: f64 = 1e-9;
const TOL_PHASE1: f64 = 1e-9;
const DEGENERATE_STEP: f64 = 1e-12;
const BLAND_AFTER: usize = 50;
const REFACTOR_EVERY: usize = 100;
const NONE: usize = usize::MAX;

pub(super) enum Outcome {
    Optimal { x: Vec<f64>, duals: Vec<f64> },
    Infeasible,
}

/// `A x = b`, `0 <= x <= ub`, `b >= 0`.
struct Standard {
    m: usize,
    cols: Vec<Vec<(usize, f64)>>,
    cost: Vec<f64>,
    ub: Vec<f64>,
    b: Vec<f64>,
    n_orig: usize,
    shift: Vec<f64>,
    row_sign: Vec<f64>,
    first_artificial: usize,
    start_basis: Vec<usize>,
    /// Row-wise copy of `cols`.
    rows: Vec<Vec<(usize, f64)>>,
}

impl Standard {
    fn build(lp: &LinearProgram) -> Standard {
        let n = lp.num_vars();
        let m = lp.constraints().len();
        let shift: Vec<f64> = lp.bounds().iter().map(|b| b.0).collect();
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut cost = lp.objective().to_vec();
        let mut ub: Vec<f64> = lp.bounds().iter().map(|&(lo, hi)| hi - lo).collect();
        let mut b = vec![0.0; m];
        let mut row_sign = vec![1.0; m];
        let mut start_basis = vec![NONE; m];
        let mut needs_artificial = Vec::new();

        for (k, con) in lp.constraints().iter().enumerate() {
            let rhs = con.rhs - con.terms.iter().map(|&(j, a)| a * shift[j]).sum::<f64>();
            let sign = if rhs < 0.0 { -1.0 } else { 1.0 };
            row_sign[k] = sign;
            b[k] = sign * rhs;
            for &(j, a) in &con.terms {
                cols[j].push((k, sign * a));
            }
            let slack = match con.relation {
                Relation::Eq => None,
                Relation::Le => Some(sign),
                Relation::Ge => Some(-sign),
            };
            if let Some(s) = slack {
                cols.push(vec![(k, s)]);
                cost.push(0.0);
                ub.push(f64::INFINITY);
                if s > 0.0 {
                    start_basis[k] = cols.len() - 1;
                    continue;
                }
            }
            needs_artificial.push(k);
        }
        let first_artificial = cols.len();
        for k in needs_artificial {
            cols.push(vec![(k, 1.0)]);
            cost.push(0.0);
            ub.push(f64::INFINITY);
            start_basis[k] = cols.len() - 1;
        }
        let mut rows = vec![Vec::new(); m];
        for (j, col) in cols.iter().enumerate() {
            for &(k, a) in col {
                rows[k].push((j, a));
            }
        }
        Standard {
            m,
            cols,
            cost,
            ub,
            b,
            n_orig: n,
            shift,
            row_sign,
            first_artificial,
            start_basis,
            rows,
        }
    }
}

struct Simplex<'a> {
    sf: &'a Standard,
    cost: Vec<f64>,
    ub: Vec<f64>,
    basis: Vec<usize>,
    pos: Vec<usize>,
    at_upper: Vec<bool>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    pi: Vec<f64>,
    /// Reduced costs, kept current across pivots.
    dj: Vec<f64>,
    alpha: Vec<f64>,
    since_refactor: usize,
    degenerate_run: usize,
    bland: bool,
    iterations: usize,
    max_iterations: usize,
}

enum Step {
    Optimal,
    Continue,
}

impl<'a> Simplex<'a> {
    fn new(sf: &'a Standard) -> Self {
        let m = sf.m;
        let ncols = sf.cols.len();
        let mut pos = vec![NONE; ncols];
        for (r, &c) in sf.start_basis.iter().enumerate() {
            pos[c] = r;
        }
        let mut binv = vec![0.0; m * m];
        for r in 0..m {
            binv[r * m + r] = 1.0;
        }
        Simplex {
            sf,
            cost: vec![0.0; ncols],
            ub: sf.ub.clone(),
            basis: sf.start_basis.clone(),
            pos,
            at_upper: vec![false; ncols],
            binv,
            xb: sf.b.clone(),
            pi: vec![0.0; m],
            dj: vec![0.0; ncols],
            alpha: vec![0.0; m],
            since_refactor: 0,
            degenerate_run: 0,
            bland: false,
            iterations: 0,
            max_iterations: 200 * (m + ncols) + 10_000,
        }
    }

    fn reprice(&mut self) {
        self.compute_pi();
        for j in 0..self.sf.cols.len() {
            self.dj[j] = if self.pos[j] == NONE {
                self.reduced_cost(j)
            } else {
                0.0
            };
        }
    }

    fn compute_pi(&mut self) {
        let m = self.sf.m;
        self.pi.iter_mut().for_each(|p| *p = 0.0);
        for i in 0..m {
            let cb = self.cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.binv[i * m..(i + 1) * m];
                for (p, &v) in self.pi.iter_mut().zip(row) {
                    *p += cb * v;
                }
            }
        }
    }

    fn reduced_cost(&self, j: usize) -> f64 {
        self.cost[j]
            - self.sf.cols[j]
                .iter()
                .map(|&(r, a)| self.pi[r] * a)
                .sum::<f64>()
    }

    fn ftran(&mut self, j: usize) {
        let m = self.sf.m;
        self.alpha.iter_mut().for_each(|a| *a = 0.0);
        for &(r, a) in &self.sf.cols[j] {
            for i in 0..m {
                self.alpha[i] += self.binv[i * m + r] * a;
            }
        }
    }

    /// Rebuilds the basis inverse, basic values and multipliers from scratch.
    fn refactor(&mut self) -> Result<()> {
        let m = self.sf.m;
        let mut a = vec![0.0; m * m];
        for (r, &c) in self.basis.iter().enumerate() {
            for &(i, v) in &self.sf.cols[c] {
                a[i * m + r] = v;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let mut best = col;
            for r in col + 1..m {
                if a[r * m + col].abs() > a[best * m + col].abs() {
                    best = r;
                }
            }
            let piv = a[best * m + col];
            if piv.abs() < 1e-12 {
                return Err(Error::Solver("basis matrix became singular".into()));
            }
            if best != col {
                for k in 0..m {
                    a.swap(best * m + k, col * m + k);
                    inv.swap(best * m + k, col * m + k);
                }
            }
            let scale = 1.0 / piv;
            for k in 0..m {
                a[col * m + k] *= scale;
                inv[col * m + k] *= scale;
            }
            for r in 0..m {
                if r == col {
                    continue;
                }
                let f = a[r * m + col];
                if f != 0.0 {
                    for k in 0..m {
                        a[r * m + k] -= f * a[col * m + k];
                        inv[r * m + k] -= f * inv[col * m + k];
                    }
                }
            }
        }
        self.binv = inv;

        let mut rhs = self.sf.b.clone();
        for (j, col) in self.sf.cols.iter().enumerate() {
            if self.pos[j] == NONE && self.at_upper[j] {
                for &(r, v) in col {
                    rhs[r] -= v * self.ub[j];
                }
            }
        }
        for i in 0..m {
            let row = &self.binv[i * m..(i + 1) * m];
            self.xb[i] = row.iter().zip(&rhs).map(|(a, b)| a * b).sum();
        }
        self.reprice();
        self.since_refactor = 0;
        Ok(())
    }

    fn choose_entering(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        let mut best_score = 0.0;
        for j in 0..self.sf.cols.len() {
            if self.pos[j] != NONE || self.ub[j] <= 0.0 {
                continue;
            }
            let d = self.dj[j];
            let score = if self.at_upper[j] { d } else { -d };
            if score > TOL_DJ {
                if self.bland {
                    return Some((j, d));
                }
                if score > best_score {
                    best_score = score;
                    best = Some((j, d));
                }
            }
        }
        best
    }

    fn step(&mut self) -> Result<Step> {
        let Some((q, dq)) = self.choose_entering() else {
            return Ok(Step::Optimal);
        };
        self.iterations += 1;
        if self.iterations > self.max_iterations {
            return Err(Error::Solver(format!(
                "simplex exceeded {} iterations",
                self.max_iterations
            )));
        }
        self.ftran(q);
        let s = if self.at_upper[q] { -1.0 } else { 1.0 };

        let mut theta = self.ub[q];
        let mut leave: Option<(usize, bool)> = None;
        let mut leave_mag = 0.0;
        for i in 0..self.sf.m {
            let a = s * self.alpha[i];
            let (limit, to_upper) = if a > TOL_PIVOT {
                (self.xb[i].max(0.0) / a, false)
            } else if a < -TOL_PIVOT && self.ub[self.basis[i]].is_finite() {
                ((self.ub[self.basis[i]] - self.xb[i]).max(0.0) / -a, true)
            } else {
                continue;
            };
            let better = match leave {
                _ if limit < theta - DEGENERATE_STEP => true,
                _ if limit > theta + DEGENERATE_STEP => false,
                None => limit < theta,
                Some((r, _)) => {
                    if self.bland {
                        self.basis[i] < self.basis[r]
                    } else {
                        a.abs() > leave_mag
                    }
                }
            };
            if better {
                theta = limit;
                leave = Some((i, to_upper));
                leave_mag = a.abs();
            }
        }
        if theta.is_infinite() {
            return Err(Error::Solver(
                "objective unbounded below; the program has an unbounded variable".into(),
            ));
        }

        for i in 0..self.sf.m {
            self.xb[i] -= s * theta * self.alpha[i];
        }
        match leave {
            None => {
                self.at_upper[q] = !self.at_upper[q];
            }
            Some((r, to_upper)) => {
                let entering_value = if self.at_upper[q] { self.ub[q] } else { 0.0 } + s * theta;
                let out = self.basis[r];
                self.pos[out] = NONE;
                self.at_upper[out] = to_upper;
                self.basis[r] = q;
                self.pos[q] = r;
                self.at_upper[q] = false;
                self.xb[r] = entering_value;
                self.pivot(r, dq);
                self.since_refactor += 1;
                if self.since_refactor >= REFACTOR_EVERY {
                    self.refactor()?;
                }
            }
        }

        if theta <= DEGENERATE_STEP {
            self.degenerate_run += 1;
            if self.degenerate_run >= BLAND_AFTER {
                self.bland = true;
            }
        } else {
            self.degenerate_run = 0;
            self.bland = false;
        }
        Ok(Step::Continue)
    }

    fn pivot(&mut self, r: usize, dq: f64) {
        let m = self.sf.m;
        let ar = self.alpha[r];
        let (before, rest) = self.binv.split_at_mut(r * m);
        let (row_r, after) = rest.split_at_mut(m);
        row_r.iter_mut().for_each(|v| *v /= ar);
        for (i, row) in before
            .chunks_exact_mut(m)
            .enumerate()
            .chain(after.chunks_exact_mut(m).enumerate().map(|(k, c)| (k + r + 1, c)))
        {
            let f = self.alpha[i];
            if f != 0.0 {
                for (v, &p) in row.iter_mut().zip(row_r.iter()) {
                    *v -= f * p;
                }
            }
        }
        // The multipliers move by dq times the new row r of the inverse;
        // reduced costs follow through the row-wise matrix.
        for (k, &v) in row_r.iter().enumerate() {
            if v != 0.0 {
                let f = dq * v;
                self.pi[k] += f;
                for &(j, a) in &self.sf.rows[k] {
                    self.dj[j] -= f * a;
                }
            }
        }
        self.dj[self.basis[r]] = 0.0;
    }

    fn run(&mut self) -> Result<()> {
        loop {
            if let Step::Optimal = self.step()? {
                // Confirm optimality against freshly computed multipliers.
                if self.since_refactor == 0 {
                    return Ok(());
                }
                self.refactor()?;
                if self.choose_entering().is_none() {
                    return Ok(());
                }
            }
        }
    }

    fn value(&self, j: usize) -> f64 {
        if self.pos[j] != NONE {
            self.xb[self.pos[j]].clamp(0.0, self.ub[j])
        } else if self.at_upper[j] {
            self.ub[j]
        } else {
            0.0
        }
    }
}

pub(super) fn solve(lp: &LinearProgram, feasibility_only: bool) -> Result<Outcome> {
    let sf = Standard::build(lp);
    let mut sx = Simplex::new(&sf);
    let ncols = sf.cols.len();

    if sf.first_artificial < ncols {
        for j in sf.first_artificial..ncols {
            sx.cost[j] = 1.0;
        }
        sx.reprice();
        sx.run()?;
        let infeasibility: f64 = (sf.first_artificial..ncols).map(|j| sx.value(j)).sum();
        let scale = 1.0 + sf.b.iter().fold(0.0f64, |a, &b| a.max(b));
        if infeasibility > TOL_PHASE1 * scale {
            return Ok(Outcome::Infeasible);
        }
        for j in sf.first_artificial..ncols {
            sx.ub[j] = 0.0;
            sx.cost[j] = 0.0;
        }
    }

    if !feasibility_only {
        sx.cost[..sf.first_artificial].copy_from_slice(&sf.cost[..sf.first_artificial]);
        sx.refactor()?;
        sx.run()?;
    }
    if sx.since_refactor != 0 {
        sx.refactor()?;
    }

    let x = (0..sf.n_orig).map(|j| sf.shift[j] + sx.value(j)).collect();
    let duals = sx
        .pi
        .iter()
        .zip(&sf.row_sign)
        .map(|(p, s)| p * s)
        .collect();
    Ok(Outcome::Optimal { x, duals })
}
