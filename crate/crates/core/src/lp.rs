//! Dense two-phase primal simplex with Bland's anti-cycling rule.
//!
//! Phase I minimizes the sum of one artificial variable per row. The system
//! is declared feasible iff that optimum is at most [`FEASIBILITY_TOLERANCE`].
//! Phase II then minimizes the user objective from the Phase I basis.

use alloc::vec;
use alloc::vec::Vec;

/// Phase I optimum below which the system counts as feasible.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-9;
/// Hard cap on pivots across both phases.
pub const ITERATION_LIMIT: usize = 1_000_000;

const PIVOT_EPS: f64 = 1e-9;
const COST_EPS: f64 = 1e-11;
const ROUNDING_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LpError {
    #[error("constraint {row} has {found} coefficients, expected {expected}")]
    DimensionMismatch { row: usize, expected: usize, found: usize },
    #[error("objective has {found} coefficients, expected {expected}")]
    ObjectiveLength { expected: usize, found: usize },
    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),
    #[error("objective is unbounded below on the feasible set")]
    Unbounded,
    #[error("simplex stalled after {0} iterations")]
    Stall(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `a·x ≥ b`
    AtLeast,
    /// `a·x = b`
    Equal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarSign {
    NonNegative,
    Free,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coefficients: Vec<f64>,
    pub direction: Direction,
    pub rhs: f64,
}

/// Minimize `objective · x` subject to the constraints and sign restrictions.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub signs: Vec<VarSign>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Feasible { x: Vec<f64>, objective: f64 },
    /// `phase_one` is the Phase I optimum (sum of artificial values).
    Infeasible { phase_one: f64 },
}

impl LpProblem {
    /// Feasibility problem with a zero objective.
    pub fn feasibility(signs: Vec<VarSign>) -> Self {
        Self { objective: vec![0.0; signs.len()], signs, constraints: Vec::new() }
    }

    pub fn push(&mut self, coefficients: Vec<f64>, direction: Direction, rhs: f64) {
        self.constraints.push(Constraint { coefficients, direction, rhs });
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.signs.len();
        if self.objective.len() != n {
            return Err(LpError::ObjectiveLength { expected: n, found: self.objective.len() });
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::NonFinite("objective"));
        }
        for (row, c) in self.constraints.iter().enumerate() {
            if c.coefficients.len() != n {
                return Err(LpError::DimensionMismatch { row, expected: n, found: c.coefficients.len() });
            }
            if !c.rhs.is_finite() || c.coefficients.iter().any(|a| !a.is_finite()) {
                return Err(LpError::NonFinite("constraints"));
            }
        }
        Ok(())
    }
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    cost: Vec<f64>,
    cost_rhs: f64,
    iterations: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in &mut self.rows[r] {
            *v /= p;
        }
        self.rhs[r] /= p;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r];
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c];
            if f != 0.0 {
                for (v, pv) in self.rows[i].iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                self.rows[i][c] = 0.0;
                self.rhs[i] -= f * pivot_rhs;
                // rounding must not push a basic value below zero
                if self.rhs[i] < 0.0 && self.rhs[i] > -ROUNDING_EPS {
                    self.rhs[i] = 0.0;
                }
            }
        }
        let f = self.cost[c];
        if f != 0.0 {
            for (v, pv) in self.cost.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            self.cost[c] = 0.0;
            self.cost_rhs -= f * pivot_rhs;
        }
        self.basis[r] = c;
    }

    /// Runs Bland's rule over columns `< allowed` until optimal.
    fn optimize(&mut self, allowed: usize) -> Result<(), LpError> {
        loop {
            if self.iterations >= ITERATION_LIMIT {
                return Err(LpError::Stall(self.iterations));
            }
            let Some(enter) = (0..allowed).find(|&j| self.cost[j] < -COST_EPS) else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][enter];
                if a > PIVOT_EPS {
                    let ratio = self.rhs[i] / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((k, best)) => {
                            if ratio < best || (ratio == best && self.basis[i] < self.basis[k]) {
                                Some((i, ratio))
                            } else {
                                Some((k, best))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Err(LpError::Unbounded);
            };
            self.pivot(r, enter);
            self.iterations += 1;
        }
    }
}

/// Solves `p`. Deterministic: identical inputs give bitwise-identical outcomes.
pub fn solve(p: &LpProblem) -> Result<LpOutcome, LpError> {
    p.validate()?;
    let m = p.constraints.len();

    // Structural columns: one per nonnegative variable, two (x⁺, x⁻) per free one.
    let mut column_of = Vec::with_capacity(p.signs.len());
    let mut structural = 0;
    for s in &p.signs {
        column_of.push(structural);
        structural += match s {
            VarSign::NonNegative => 1,
            VarSign::Free => 2,
        };
    }
    let surplus_count = p.constraints.iter().filter(|c| c.direction == Direction::AtLeast).count();
    let artificial_start = structural + surplus_count;
    let width = artificial_start + m;

    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut surplus = structural;
    for (i, c) in p.constraints.iter().enumerate() {
        let mut row = vec![0.0; width];
        for (j, &a) in c.coefficients.iter().enumerate() {
            row[column_of[j]] = a;
            if p.signs[j] == VarSign::Free {
                row[column_of[j] + 1] = -a;
            }
        }
        if c.direction == Direction::AtLeast {
            row[surplus] = -1.0;
            surplus += 1;
        }
        let mut b = c.rhs;
        if b < 0.0 {
            for v in &mut row {
                *v = -*v;
            }
            b = -b;
        }
        row[artificial_start + i] = 1.0;
        rows.push(row);
        rhs.push(b);
    }

    // Phase I reduced costs: artificial cost 1 priced out of the initial basis.
    let mut cost = vec![0.0; width];
    let mut cost_rhs = 0.0;
    for (row, &b) in rows.iter().zip(&rhs) {
        for j in 0..artificial_start {
            cost[j] -= row[j];
        }
        cost_rhs -= b;
    }
    let mut t = Tableau {
        rows,
        rhs,
        basis: (artificial_start..width).collect(),
        cost,
        cost_rhs,
        iterations: 0,
    };
    t.optimize(artificial_start)?;
    let phase_one = -t.cost_rhs;
    if phase_one > FEASIBILITY_TOLERANCE {
        return Ok(LpOutcome::Infeasible { phase_one });
    }

    // Drive artificials out of the basis; rows where that is impossible are redundant.
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= artificial_start {
            match (0..artificial_start).find(|&j| t.rows[i][j].abs() > PIVOT_EPS) {
                Some(j) => {
                    t.pivot(i, j);
                    i += 1;
                }
                None => {
                    t.rows.remove(i);
                    t.rhs.remove(i);
                    t.basis.remove(i);
                }
            }
        } else {
            i += 1;
        }
    }

    // Phase II costs for the structural columns.
    let mut base_cost = vec![0.0; width];
    for (j, &c) in p.objective.iter().enumerate() {
        base_cost[column_of[j]] = c;
        if p.signs[j] == VarSign::Free {
            base_cost[column_of[j] + 1] = -c;
        }
    }
    t.cost = base_cost.clone();
    t.cost_rhs = 0.0;
    for r in 0..t.rows.len() {
        let cb = base_cost[t.basis[r]];
        if cb != 0.0 {
            for j in 0..width {
                t.cost[j] -= cb * t.rows[r][j];
            }
            t.cost_rhs -= cb * t.rhs[r];
        }
    }
    t.optimize(artificial_start)?;

    let mut values = vec![0.0; width];
    for (r, &b) in t.basis.iter().enumerate() {
        values[b] = t.rhs[r];
    }
    let x: Vec<f64> = p
        .signs
        .iter()
        .enumerate()
        .map(|(j, s)| match s {
            VarSign::NonNegative => values[column_of[j]],
            VarSign::Free => values[column_of[j]] - values[column_of[j] + 1],
        })
        .collect();
    let objective = p.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpOutcome::Feasible { x, objective })
}
