//! Utility elicitation as LP feasibility.
//!
//! Observed comparisons `Φ ≻ Ψ` and `Φ ∼ Ψ` are representable iff some
//! linear functional is at least 1 on every strict difference and 0 on every
//! indifference. A positive margin can always be rescaled to 1, so the unit
//! margin loses no generality.
//!
//! For expected utility the unknowns are the utility values on the union of
//! all supports. For dual utility they are the increments of the distortion
//! on the merged level grid, restricted to be nonnegative.

use alloc::format;
use alloc::vec::Vec;

use crate::du::{rdu_evaluate, DistortionFunction};
use crate::eu::{self, UtilityFunction};
use crate::lp::{self, Direction, LpOutcome, LpProblem, VarSign};
use crate::measure::{DiscreteMeasure, MeasureKind, OutcomePoint};
use crate::num::{to_f64, Rational};
use crate::quantile::StepQuantile;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// Strict preference `≻`.
    Succ,
    /// Indifference `∼`.
    Sim,
}

/// `left relation right`, by prospect index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Comparison {
    pub left: usize,
    pub relation: Relation,
    pub right: usize,
}

impl Comparison {
    pub fn succ(left: usize, right: usize) -> Self {
        Self { left, relation: Relation::Succ, right }
    }

    pub fn sim(left: usize, right: usize) -> Self {
        Self { left, relation: Relation::Sim, right }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Prospects {
    Eu(Vec<DiscreteMeasure>),
    Dual(Vec<StepQuantile>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Eu,
    Dual,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceDataset {
    prospects: Prospects,
    comparisons: Vec<Comparison>,
}

impl PreferenceDataset {
    pub fn new(prospects: Prospects, comparisons: Vec<Comparison>) -> Result<Self> {
        let n = match &prospects {
            Prospects::Eu(ms) => {
                if let Some(i) = ms.iter().position(|m| m.kind() != MeasureKind::Probability) {
                    return Err(Error::MalformedDataset(format!("prospect {i} is not a probability measure")));
                }
                if let Some(first) = ms.first() {
                    if let Some(i) = ms.iter().position(|m| m.dim() != first.dim()) {
                        return Err(Error::MalformedDataset(format!(
                            "prospect {i} has dimension {}, expected {}",
                            ms[i].dim(),
                            first.dim()
                        )));
                    }
                }
                ms.len()
            }
            Prospects::Dual(qs) => qs.len(),
        };
        for (k, c) in comparisons.iter().enumerate() {
            if c.left >= n || c.right >= n {
                return Err(Error::MalformedDataset(format!(
                    "comparison {k} references prospect {} but only {n} exist",
                    c.left.max(c.right)
                )));
            }
        }
        Ok(Self { prospects, comparisons })
    }

    pub fn eu(prospects: Vec<DiscreteMeasure>, comparisons: Vec<Comparison>) -> Result<Self> {
        Self::new(Prospects::Eu(prospects), comparisons)
    }

    pub fn dual(prospects: Vec<StepQuantile>, comparisons: Vec<Comparison>) -> Result<Self> {
        Self::new(Prospects::Dual(prospects), comparisons)
    }

    pub fn mode(&self) -> Mode {
        match self.prospects {
            Prospects::Eu(_) => Mode::Eu,
            Prospects::Dual(_) => Mode::Dual,
        }
    }

    pub fn prospects(&self) -> &Prospects {
        &self.prospects
    }

    pub fn comparisons(&self) -> &[Comparison] {
        &self.comparisons
    }

    /// Union of all supports, sorted.
    pub fn outcome_grid(&self) -> Vec<OutcomePoint> {
        let Prospects::Eu(ms) = &self.prospects else {
            return Vec::new();
        };
        let mut grid: Vec<OutcomePoint> = ms.iter().flat_map(|m| m.atoms().iter().map(|a| a.point.clone())).collect();
        grid.sort();
        grid.dedup();
        grid
    }

    /// Union of all quantile levels, sorted.
    pub fn level_grid(&self) -> Vec<Rational> {
        let Prospects::Dual(qs) = &self.prospects else {
            return Vec::new();
        };
        let mut grid: Vec<Rational> = qs.iter().flat_map(|q| q.levels().iter().cloned()).collect();
        grid.sort();
        grid.dedup();
        grid
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EuElicitation {
    /// Table utility on the outcome grid.
    Feasible(UtilityFunction),
    Infeasible { phase_one: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum DualElicitation {
    /// Unnormalized distortion with knots at the level grid.
    Feasible(DistortionFunction),
    /// `signed_representable` reports whether dropping the monotonicity
    /// restriction would admit a representation.
    Infeasible { phase_one: f64, signed_representable: bool },
}

fn push_comparisons(lp: &mut LpProblem, comparisons: &[Comparison], rows: &[Vec<f64>]) {
    for c in comparisons {
        let coefficients = rows[c.left].iter().zip(&rows[c.right]).map(|(a, b)| a - b).collect();
        match c.relation {
            Relation::Succ => lp.push(coefficients, Direction::AtLeast, 1.0),
            Relation::Sim => lp.push(coefficients, Direction::Equal, 0.0),
        }
    }
}

/// Finds `u` on the outcome grid with `U(μ) − U(ν) ≥ 1` for every `μ ≻ ν` and
/// `U(μ) = U(ν)` for every `μ ∼ ν`.
pub fn elicit_eu(data: &PreferenceDataset) -> Result<EuElicitation> {
    let Prospects::Eu(measures) = &data.prospects else {
        return Err(Error::MalformedDataset("expected an eu dataset".into()));
    };
    let grid = data.outcome_grid();
    if grid.is_empty() {
        return Err(Error::MalformedDataset("no prospects".into()));
    }
    let rows: Vec<Vec<f64>> = measures.iter().map(|m| grid.iter().map(|z| to_f64(&m.mass_at(z))).collect()).collect();
    let mut problem = LpProblem::feasibility(alloc::vec![VarSign::Free; grid.len()]);
    push_comparisons(&mut problem, &data.comparisons, &rows);
    match lp::solve(&problem)? {
        LpOutcome::Feasible { x, .. } => Ok(EuElicitation::Feasible(UtilityFunction::table(grid, x)?)),
        LpOutcome::Infeasible { phase_one } => Ok(EuElicitation::Infeasible { phase_one }),
    }
}

/// Finds nonnegative distortion increments on the level grid with
/// `U(Φ) − U(Ψ) ≥ 1` for every `Φ ≻ Ψ` and equality for every `Φ ∼ Ψ`.
pub fn elicit_dual(data: &PreferenceDataset) -> Result<DualElicitation> {
    let Prospects::Dual(quantiles) = &data.prospects else {
        return Err(Error::MalformedDataset("expected a dual dataset".into()));
    };
    let grid = data.level_grid();
    if grid.is_empty() {
        return Err(Error::MalformedDataset("no prospects".into()));
    }
    let knots: Vec<f64> = grid.iter().map(to_f64).collect();
    if let Some(i) = knots.windows(2).position(|w| w[0] >= w[1]) {
        return Err(Error::MalformedDataset(format!("levels {i} and {} round to the same float", i + 1)));
    }
    let rows: Vec<Vec<f64>> =
        quantiles.iter().map(|q| grid.iter().map(|p| q.evaluate_exact(p)).collect()).collect();

    let mut problem = LpProblem::feasibility(alloc::vec![VarSign::NonNegative; grid.len()]);
    problem.objective = alloc::vec![1.0; grid.len()];
    push_comparisons(&mut problem, &data.comparisons, &rows);
    match lp::solve(&problem)? {
        LpOutcome::Feasible { x, .. } => {
            let increments: Vec<f64> = x.into_iter().map(|v| v.max(0.0)).collect();
            Ok(DualElicitation::Feasible(DistortionFunction::from_increments(&knots, &increments)?))
        }
        LpOutcome::Infeasible { phase_one } => {
            let mut relaxed = LpProblem::feasibility(alloc::vec![VarSign::Free; grid.len()]);
            push_comparisons(&mut relaxed, &data.comparisons, &rows);
            let signed_representable = matches!(lp::solve(&relaxed)?, LpOutcome::Feasible { .. });
            Ok(DualElicitation::Infeasible { phase_one, signed_representable })
        }
    }
}

/// How well a witness reproduces the comparisons of a dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessAudit {
    /// Smallest `U(left) − U(right)` over strict comparisons (`+∞` if none).
    pub min_strict_gap: f64,
    /// Largest `|U(left) − U(right)|` over indifferences (0 if none).
    pub max_indifference_gap: f64,
}

impl WitnessAudit {
    fn from_values(comparisons: &[Comparison], values: &[f64]) -> Self {
        let mut audit = Self { min_strict_gap: f64::INFINITY, max_indifference_gap: 0.0 };
        for c in comparisons {
            let gap = values[c.left] - values[c.right];
            match c.relation {
                Relation::Succ => audit.min_strict_gap = audit.min_strict_gap.min(gap),
                Relation::Sim => audit.max_indifference_gap = audit.max_indifference_gap.max(gap.abs()),
            }
        }
        audit
    }

    /// Strict gaps at least `margin`, indifference gaps at most `tolerance`.
    pub fn reproduces(&self, margin: f64, tolerance: f64) -> bool {
        self.min_strict_gap >= margin && self.max_indifference_gap <= tolerance
    }
}

/// Re-evaluates every comparison with `eu::evaluate`.
pub fn audit_eu_witness(u: &UtilityFunction, data: &PreferenceDataset) -> Result<WitnessAudit> {
    let Prospects::Eu(measures) = &data.prospects else {
        return Err(Error::MalformedDataset("expected an eu dataset".into()));
    };
    let values = measures.iter().map(|m| eu::evaluate(u, m)).collect::<Result<Vec<_>>>()?;
    Ok(WitnessAudit::from_values(&data.comparisons, &values))
}

/// Re-evaluates every comparison with `rdu_evaluate`.
pub fn audit_dual_witness(w: &DistortionFunction, data: &PreferenceDataset) -> Result<WitnessAudit> {
    let Prospects::Dual(quantiles) = &data.prospects else {
        return Err(Error::MalformedDataset("expected a dual dataset".into()));
    };
    let values: Vec<f64> = quantiles.iter().map(|q| rdu_evaluate(w, q)).collect();
    Ok(WitnessAudit::from_values(&data.comparisons, &values))
}
