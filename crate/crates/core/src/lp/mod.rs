//! Linear programs in minimization form and a bounded-variable simplex solver.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

mod simplex;

/// Constraint satisfaction tolerance for returned points.
pub const TOL_FEAS: f64 = 1e-9;
/// Objective optimality tolerance.
pub const TOL_OBJ: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Ge,
    Le,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Ge => ">=",
            Relation::Le => "<=",
        }
    }
}

/// A sparse row `Σ coeff·x_var  relation  rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub terms: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Amount by which `x` violates this row (zero when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let lhs = self.activity(x);
        match self.relation {
            Relation::Eq => (lhs - self.rhs).abs(),
            Relation::Ge => (self.rhs - lhs).max(0.0),
            Relation::Le => (lhs - self.rhs).max(0.0),
        }
    }
}

/// `min c·x` subject to linear rows and per-variable boxes.
///
/// New variables default to the box `[0, 1]`. Upper bounds may be raised to
/// `f64::INFINITY`; lower bounds must stay finite.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    num_vars: usize,
    objective: Vec<f64>,
    constraints: Vec<Constraint>,
    bounds: Vec<(f64, f64)>,
}

fn malformed(msg: impl Into<alloc::string::String>) -> Error {
    Error::MalformedProgram(msg.into())
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            objective: vec![0.0; num_vars],
            constraints: Vec::new(),
            bounds: vec![(0.0, 1.0); num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn set_objective(&mut self, c: Vec<f64>) -> Result<()> {
        if c.len() != self.num_vars {
            return Err(malformed(format!(
                "objective has {} coefficients for {} variables",
                c.len(),
                self.num_vars
            )));
        }
        self.objective = c;
        Ok(())
    }

    pub fn set_cost(&mut self, var: usize, c: f64) {
        self.objective[var] = c;
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.bounds[var] = (lower, upper);
    }

    /// Adds a dense row; its length must equal the variable count.
    pub fn add_constraint(&mut self, row: &[f64], relation: Relation, rhs: f64) -> Result<()> {
        if row.len() != self.num_vars {
            return Err(malformed(format!(
                "constraint row has {} coefficients for {} variables",
                row.len(),
                self.num_vars
            )));
        }
        let terms = row
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != 0.0)
            .map(|(j, a)| (j, *a))
            .collect();
        self.constraints.push(Constraint {
            terms,
            relation,
            rhs,
        });
        Ok(())
    }

    /// Adds a sparse row. Repeated variables are summed.
    pub fn add_sparse_constraint(
        &mut self,
        terms: impl IntoIterator<Item = (usize, f64)>,
        relation: Relation,
        rhs: f64,
    ) -> Result<()> {
        let mut terms: Vec<(usize, f64)> = terms.into_iter().collect();
        if let Some(&(j, _)) = terms.iter().find(|(j, _)| *j >= self.num_vars) {
            return Err(malformed(format!(
                "constraint references variable {j} of {}",
                self.num_vars
            )));
        }
        terms.sort_by_key(|t| t.0);
        terms.dedup_by(|later, kept| {
            if later.0 == kept.0 {
                kept.1 += later.1;
                true
            } else {
                false
            }
        });
        terms.retain(|t| t.1 != 0.0);
        self.constraints.push(Constraint {
            terms,
            relation,
            rhs,
        });
        Ok(())
    }

    /// Row `k` as a dense coefficient vector.
    pub fn dense_row(&self, k: usize) -> Vec<f64> {
        let mut row = vec![0.0; self.num_vars];
        for &(j, a) in &self.constraints[k].terms {
            row[j] += a;
        }
        row
    }

    pub fn validate(&self) -> Result<()> {
        if self.objective.len() != self.num_vars || self.bounds.len() != self.num_vars {
            return Err(malformed("objective or bounds length differs from variable count"));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(malformed("objective coefficients must be finite"));
        }
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            if !lo.is_finite() || hi.is_nan() || lo > hi {
                return Err(malformed(format!("variable {j} has bounds [{lo}, {hi}]")));
            }
        }
        for (k, c) in self.constraints.iter().enumerate() {
            if !c.rhs.is_finite() || c.terms.iter().any(|t| !t.1.is_finite()) {
                return Err(malformed(format!("constraint {k} has non-finite data")));
            }
            if c.terms.iter().any(|t| t.0 >= self.num_vars) {
                return Err(malformed(format!("constraint {k} references a missing variable")));
            }
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest row or bound violation at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self
            .constraints
            .iter()
            .map(|c| c.violation(x))
            .fold(0.0, f64::max);
        let boxes = self
            .bounds
            .iter()
            .zip(x)
            .map(|(&(lo, hi), &v)| (lo - v).max(v - hi).max(0.0))
            .fold(0.0, f64::max);
        rows.max(boxes)
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, a: f64, j: usize) -> fmt::Result {
    if a < 0.0 {
        write!(f, " - {} x{j}", -a)
    } else {
        write!(f, " + {a} x{j}")
    }
}

/// Plain-text dump in an LP-file-like layout.
impl fmt::Display for LinearProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "minimize")?;
        write!(f, "  obj:")?;
        for (j, &c) in self.objective.iter().enumerate() {
            if c != 0.0 {
                write_term(f, c, j)?;
            }
        }
        writeln!(f)?;
        writeln!(f, "subject to")?;
        for (k, c) in self.constraints.iter().enumerate() {
            write!(f, "  c{k}:")?;
            for &(j, a) in &c.terms {
                write_term(f, a, j)?;
            }
            writeln!(f, " {} {}", c.relation.symbol(), c.rhs)?;
        }
        writeln!(f, "bounds")?;
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            writeln!(f, "  {lo} <= x{j} <= {hi}")?;
        }
        writeln!(f, "end")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Optimal point; empty when infeasible.
    pub values: Vec<f64>,
    /// `+inf` when infeasible.
    pub objective_value: f64,
    /// Row multipliers `y` with `c - Aᵀy` the reduced costs; empty when
    /// infeasible.
    pub duals: Vec<f64>,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    Feasible(Vec<f64>),
    Infeasible,
}

/// Minimizes the program. The result is a vertex and is a deterministic
/// function of the input.
pub fn solve(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    simplex::solve(lp, false).map(|outcome| match outcome {
        simplex::Outcome::Optimal { x, duals } => LpSolution {
            status: LpStatus::Optimal,
            objective_value: lp.evaluate(&x),
            values: x,
            duals,
        },
        simplex::Outcome::Infeasible => LpSolution {
            status: LpStatus::Infeasible,
            values: Vec::new(),
            objective_value: f64::INFINITY,
            duals: Vec::new(),
        },
    })
}

/// Finds any point satisfying the rows and boxes, ignoring the objective.
pub fn check_feasibility(lp: &LinearProgram) -> Result<Feasibility> {
    lp.validate()?;
    simplex::solve(lp, true).map(|outcome| match outcome {
        simplex::Outcome::Optimal { x, .. } => Feasibility::Feasible(x),
        simplex::Outcome::Infeasible => Feasibility::Infeasible,
    })
}
