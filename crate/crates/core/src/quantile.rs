//! Step quantile functions on (0,1].
//!
//! `Φ(p) = zᵢ` for `p ∈ (pᵢ₋₁, pᵢ]` with `0 = p₀ < p₁ < … < pₙ = 1`. Levels
//! are exact rationals; values are floats. Canonical form has strictly
//! increasing values (equal neighbouring segments are merged).

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use crate::measure::{DiscreteMeasure, OutcomePoint};
use crate::num::{block_mean, compensated_sum, rational, to_f64, Rational};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct StepQuantile {
    // 0 followed by the levels
    bounds: Vec<Rational>,
    values: Vec<f64>,
}

/// One constant piece of a step quantile.
#[derive(Debug, Clone, Copy)]
pub struct Segment<'a> {
    pub lower: &'a Rational,
    pub upper: &'a Rational,
    pub value: f64,
}

impl Segment<'_> {
    pub fn length(&self) -> Rational {
        self.upper - self.lower
    }
}

impl StepQuantile {
    /// `levels` excludes the leading 0 and must end at exactly 1.
    pub fn new(levels: Vec<Rational>, values: Vec<f64>) -> Result<Self> {
        if levels.len() != values.len() {
            return Err(Error::LengthMismatch { expected: levels.len(), found: values.len() });
        }
        let Some(last) = levels.last() else {
            return Err(Error::Empty);
        };
        if !levels[0].is_positive() {
            return Err(Error::NotIncreasing { what: "levels", index: 0 });
        }
        if let Some(i) = levels.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::NotIncreasing { what: "levels", index: i + 1 });
        }
        if !last.is_one() {
            return Err(Error::Invalid { what: "levels", reason: "last level must equal 1" });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "value", index });
        }
        if let Some(i) = values.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::NotMonotone { what: "values", index: i + 1 });
        }
        Ok(Self::canonical(levels, values))
    }

    /// Builds from float levels, each converted exactly.
    pub fn from_f64(levels: &[f64], values: Vec<f64>) -> Result<Self> {
        let levels = levels
            .iter()
            .enumerate()
            .map(|(index, &p)| rational(p).ok_or(Error::NonFinite { what: "level", index }))
            .collect::<Result<Vec<_>>>()?;
        Self::new(levels, values)
    }

    pub fn constant(c: f64) -> Self {
        assert!(c.is_finite(), "constant quantile must be finite");
        Self { bounds: alloc::vec![Rational::zero(), Rational::one()], values: alloc::vec![c + 0.0] }
    }

    // Drops the upper level of any segment whose value equals its successor's.
    fn canonical(levels: Vec<Rational>, values: Vec<f64>) -> Self {
        let mut out_levels: Vec<Rational> = Vec::with_capacity(levels.len() + 1);
        out_levels.push(Rational::zero());
        let mut out_values: Vec<f64> = Vec::with_capacity(values.len());
        for (p, z) in levels.into_iter().zip(values) {
            let z = z + 0.0;
            if out_values.last() == Some(&z) {
                *out_levels.last_mut().expect("paired") = p;
            } else {
                out_levels.push(p);
                out_values.push(z);
            }
        }
        Self { bounds: out_levels, values: out_values }
    }

    /// Upper segment levels `p₁, …, pₙ` (excluding the leading 0).
    pub fn levels(&self) -> &[Rational] {
        &self.bounds[1..]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment<'_>> + '_ {
        self.bounds.windows(2).zip(&self.values).map(|(w, &value)| Segment { lower: &w[0], upper: &w[1], value })
    }

    /// Left-continuous evaluation at `p ∈ (0,1]`.
    pub fn evaluate(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::LevelOutOfRange(p));
        }
        Ok(self.evaluate_exact(&rational(p).expect("finite level")))
    }

    pub(crate) fn evaluate_exact(&self, p: &Rational) -> f64 {
        let i = self.levels().partition_point(|l| l < p);
        self.values[i.min(self.values.len() - 1)]
    }

    /// `∫₀¹ Φ(p) dp`.
    pub fn mean(&self) -> f64 {
        let masses: Vec<Rational> = self.segments().map(|s| s.length()).collect();
        block_mean(self.values.iter().copied().zip(&masses)).0
    }

    /// The distribution whose quantile function is `self`.
    pub fn to_measure(&self) -> DiscreteMeasure {
        DiscreteMeasure::probability(self.segments().map(|s| (OutcomePoint::scalar(s.value), s.length())))
            .expect("segments have positive length")
    }

    /// The right-continuous distribution function `z ↦ sup{p : Φ(p) ≤ z}`.
    pub fn inverse(&self) -> StepCdf {
        StepCdf { quantile: self.clone() }
    }

    /// Pointwise `α·Φ + β·Ψ` on the merged level grid, for `α, β ≥ 0`.
    pub fn comonotonic_combine(alpha: f64, phi: &Self, beta: f64, psi: &Self) -> Result<Self> {
        for c in [alpha, beta] {
            if !(c >= 0.0) || !c.is_finite() {
                return Err(Error::NegativeCoefficient(c));
            }
        }
        let (levels, values) = merged_grid(phi, psi)
            .into_iter()
            .map(|(p, a, b)| (p.clone(), alpha * a + beta * b))
            .unzip();
        Self::new(levels, values)
    }

    /// `∫₀¹ |Φ − Ψ| dp`, exact piecewise on the merged grid.
    pub fn l1_distance(phi: &Self, psi: &Self) -> f64 {
        let mut lower = Rational::zero();
        compensated_sum(merged_grid(phi, psi).into_iter().map(|(p, a, b)| {
            let len = to_f64(&(p - &lower));
            lower = p.clone();
            (a - b).abs() * len
        }))
    }

    /// `sup_p |Φ(p) − Ψ(p)|`.
    pub fn sup_distance(phi: &Self, psi: &Self) -> f64 {
        merged_grid(phi, psi).into_iter().map(|(_, a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Replaces `Φ` on every block `(βⱼ₋₁, βⱼ]` by its average there.
    ///
    /// Every beta must be a level of `self`; betas are sorted and must end at 1.
    pub fn coarsen(&self, betas: &[Rational]) -> Result<Self> {
        if betas.last().map_or(true, |b| !b.is_one()) {
            return Err(Error::Invalid { what: "betas", reason: "must end at 1" });
        }
        if let Some(i) = betas.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::NotIncreasing { what: "betas", index: i + 1 });
        }
        let mut cut_index = Vec::with_capacity(betas.len());
        for (i, b) in betas.iter().enumerate() {
            match self.levels().binary_search(b) {
                Ok(k) => cut_index.push(k),
                Err(_) => return Err(Error::UnreachableLevel(i)),
            }
        }
        let masses: Vec<Rational> = self.segments().map(|s| s.length()).collect();
        let mut levels = Vec::with_capacity(betas.len());
        let mut values = Vec::with_capacity(betas.len());
        let mut start = 0;
        for (b, &k) in betas.iter().zip(&cut_index) {
            let (mean, _) = block_mean(self.values[start..=k].iter().copied().zip(&masses[start..=k]));
            levels.push(b.clone());
            values.push(mean);
            start = k + 1;
        }
        Self::new(levels, values)
    }
}

/// `(upper level, Φ value, Ψ value)` for every segment of the merged grid.
pub(crate) fn merged_grid<'a>(phi: &'a StepQuantile, psi: &'a StepQuantile) -> Vec<(&'a Rational, f64, f64)> {
    let mut out = Vec::with_capacity(phi.len() + psi.len());
    let (mut i, mut j) = (0, 0);
    while i < phi.len() && j < psi.len() {
        let (a, b) = (&phi.levels()[i], &psi.levels()[j]);
        out.push((if a <= b { a } else { b }, phi.values[i], psi.values[j]));
        match a.cmp(b) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Distribution function of a step quantile, evaluated by the sup definition.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCdf {
    quantile: StepQuantile,
}

impl StepCdf {
    /// `F(z)`: the largest level whose segment value is `≤ z`, or 0.
    pub fn at(&self, z: f64) -> Rational {
        let k = self.quantile.values.partition_point(|&v| v <= z);
        if k == 0 {
            Rational::zero()
        } else {
            self.quantile.levels()[k - 1].clone()
        }
    }

    pub fn to_measure(&self) -> DiscreteMeasure {
        self.quantile.to_measure()
    }
}
