//! Expected utility `U(μ) = ∫ u dμ` and its risk-attitude checks.

use alloc::vec::Vec;

use crate::measure::{DiscreteMeasure, IntervalPartition, MeasureKind, OutcomePoint};
use crate::num::{compensated_sum, to_f64};
use crate::pwl::PiecewiseLinear;
use crate::{Error, Result};

/// Tolerance for structural identities.
pub const STRUCTURAL_TOLERANCE: f64 = 1e-12;

/// A utility over a declared finite outcome set.
#[derive(Debug, Clone, PartialEq)]
pub struct TableUtility {
    points: Vec<OutcomePoint>,
    values: Vec<f64>,
}

impl TableUtility {
    pub fn new(points: Vec<OutcomePoint>, values: Vec<f64>) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::LengthMismatch { expected: points.len(), found: values.len() });
        }
        let dim = points.first().ok_or(Error::Empty)?.dim();
        if let Some(p) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: p.dim() });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "value", index });
        }
        let mut rows: Vec<(OutcomePoint, f64)> = points.into_iter().zip(values).collect();
        rows.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(i) = rows.windows(2).position(|w| w[0].0 == w[1].0) {
            return Err(Error::NotIncreasing { what: "points", index: i + 1 });
        }
        let (points, values) = rows.into_iter().unzip();
        Ok(Self { points, values })
    }

    pub fn points(&self) -> &[OutcomePoint] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn get(&self, z: &OutcomePoint) -> Option<f64> {
        self.points.binary_search(z).ok().map(|i| self.values[i])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum UtilityFunction {
    PiecewiseLinear(PiecewiseLinear),
    Table(TableUtility),
}

impl UtilityFunction {
    pub fn piecewise_linear(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Ok(Self::PiecewiseLinear(PiecewiseLinear::new(knots, values)?))
    }

    pub fn table(points: Vec<OutcomePoint>, values: Vec<f64>) -> Result<Self> {
        Ok(Self::Table(TableUtility::new(points, values)?))
    }

    pub fn identity() -> Self {
        Self::PiecewiseLinear(PiecewiseLinear::new(alloc::vec![0.0, 1.0], alloc::vec![0.0, 1.0]).expect("valid"))
    }

    pub fn constant(c: f64) -> Self {
        Self::PiecewiseLinear(PiecewiseLinear::new(alloc::vec![0.0], alloc::vec![c]).expect("valid"))
    }

    pub fn evaluate(&self, z: &OutcomePoint) -> Result<f64> {
        match self {
            Self::PiecewiseLinear(f) if z.dim() == 1 => Ok(f.evaluate(z.value())),
            Self::PiecewiseLinear(_) => Err(Error::RequiresScalar(z.dim())),
            Self::Table(t) => t.get(z).ok_or(Error::OutsideDomain),
        }
    }

    pub fn evaluate_scalar(&self, z: f64) -> Result<f64> {
        self.evaluate(&OutcomePoint::scalar(z))
    }

    /// For a piecewise-linear `u`, all slopes are nonnegative. For a table,
    /// `u(z) ≥ u(v)` whenever `z ≥ v` componentwise.
    pub fn is_nondecreasing(&self) -> bool {
        match self {
            Self::PiecewiseLinear(f) => f.is_nondecreasing(),
            Self::Table(t) => t.points.iter().zip(&t.values).all(|(z, uz)| {
                t.points.iter().zip(&t.values).all(|(v, uv)| !z.dominates(v) || uz >= uv)
            }),
        }
    }

    /// Exact slope criterion. A one-dimensional table is judged by its linear
    /// interpolant; concavity of a table on ℝᵈ with `d > 1` is undetermined.
    pub fn is_concave(&self) -> Option<bool> {
        match self {
            Self::PiecewiseLinear(f) => Some(f.is_concave()),
            Self::Table(t) if t.dim() == 1 => Some(t.interpolant().is_concave()),
            Self::Table(_) => None,
        }
    }

    /// Linear interpolation of a one-dimensional table through its points.
    pub fn interpolated(&self) -> Result<Self> {
        match self {
            Self::PiecewiseLinear(_) => Ok(self.clone()),
            Self::Table(t) if t.dim() == 1 => Ok(Self::PiecewiseLinear(t.interpolant())),
            Self::Table(t) => Err(Error::RequiresScalar(t.dim())),
        }
    }

    /// `a·u + b`.
    pub fn affine(&self, a: f64, b: f64) -> Self {
        match self {
            Self::PiecewiseLinear(f) => Self::PiecewiseLinear(
                PiecewiseLinear::new(f.knots().to_vec(), f.values().iter().map(|v| a * v + b).collect())
                    .expect("same knots"),
            ),
            Self::Table(t) => Self::Table(TableUtility {
                points: t.points.clone(),
                values: t.values.iter().map(|v| a * v + b).collect(),
            }),
        }
    }
}

impl TableUtility {
    fn interpolant(&self) -> PiecewiseLinear {
        PiecewiseLinear::new(self.points.iter().map(|p| p.value()).collect(), self.values.clone())
            .expect("sorted distinct points")
    }
}

/// `Σᵢ u(zᵢ)·mᵢ`.
pub fn evaluate(u: &UtilityFunction, mu: &DiscreteMeasure) -> Result<f64> {
    if mu.kind() != MeasureKind::Probability {
        return Err(Error::UnsupportedKind);
    }
    let terms = mu
        .atoms()
        .iter()
        .map(|a| Ok(u.evaluate(&a.point)? * to_f64(&a.mass)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(compensated_sum(terms))
}

/// `|U(αμ + (1−α)ν) − αU(μ) − (1−α)U(ν)|`.
pub fn mixture_affinity_residual(
    u: &UtilityFunction,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    alpha: f64,
) -> Result<f64> {
    let mixed = DiscreteMeasure::mix(alpha, mu, nu)?;
    let lhs = evaluate(u, &mixed)?;
    let rhs = alpha * evaluate(u, mu)? + (1.0 - alpha) * evaluate(u, nu)?;
    Ok((lhs - rhs).abs())
}

/// `u(E μ) − U(μ)`; nonnegative for concave `u`.
pub fn jensen_gap(u: &UtilityFunction, mu: &DiscreteMeasure) -> Result<f64> {
    let mean = mu.expectation()?;
    Ok(u.evaluate(&mean)? - evaluate(u, mu)?)
}

/// Utility of one coarsening against the original prospect.
#[derive(Debug, Clone, PartialEq)]
pub struct CoarseningRow {
    /// `None` for the trivial partition `{ℝ}`.
    pub partition: Option<IntervalPartition>,
    pub coarse: f64,
    pub fine: f64,
    pub ok: bool,
}

/// Checks `U(μ_G) ≥ U(μ)` for the trivial partition and each supplied one.
pub fn risk_aversion_audit(
    u: &UtilityFunction,
    mu: &DiscreteMeasure,
    partitions: &[IntervalPartition],
) -> Result<Vec<CoarseningRow>> {
    let fine = evaluate(u, mu)?;
    let trivial = IntervalPartition::trivial();
    core::iter::once((None, &trivial))
        .chain(partitions.iter().map(|p| (Some(p.clone()), p)))
        .map(|(label, p)| {
            let coarse = evaluate(u, &mu.coarsen(p)?)?;
            Ok(CoarseningRow { partition: label, coarse, fine, ok: coarse >= fine - STRUCTURAL_TOLERANCE })
        })
        .collect()
}

/// `u(z) ≥ u(v)` for every supplied pair `z ≥ v`; a piecewise-linear `u`
/// must additionally have nonnegative slopes.
pub fn monotonicity_check(u: &UtilityFunction, pairs: &[(OutcomePoint, OutcomePoint)]) -> Result<bool> {
    if let Some(i) = pairs.iter().position(|(z, v)| !z.dominates(v)) {
        return Err(Error::UnorderedPair(i));
    }
    for (z, v) in pairs {
        if u.evaluate(z)? < u.evaluate(v)? {
            return Ok(false);
        }
    }
    Ok(match u {
        UtilityFunction::PiecewiseLinear(f) => f.is_nondecreasing(),
        UtilityFunction::Table(_) => true,
    })
}
