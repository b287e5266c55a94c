//! Dual (rank-dependent) utility.
//!
//! A [`DistortionFunction`] `w` is continuous, piecewise linear and
//! nondecreasing on `[0,1]` with `w(0) = 0`. A step quantile is valued as the
//! Stieltjes sum `U(Φ) = Σ zᵢ·[w(pᵢ) − w(pᵢ₋₁)]`. Only increments of `w` are
//! ever used; there is no density-based evaluator.

use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::eu::UtilityFunction;
use crate::measure::{DiscreteMeasure, MeasureKind};
use crate::num::{compensated_sum, rational, to_f64, CompensatedSum, Rational};
use crate::pwl::PiecewiseLinear;
use crate::quantile::StepQuantile;
use crate::{Error, Result};

/// Tolerance of the dual risk-aversion comparison.
pub const RISK_TOLERANCE: f64 = 1e-10;
/// Minimum secant violation reported by [`concavity_counterexample`].
pub const COUNTEREXAMPLE_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DistortionFunction {
    inner: PiecewiseLinear,
}

impl DistortionFunction {
    /// Knots must run from exactly 0 to exactly 1; `w(0) = 0` and values
    /// must be nondecreasing.
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let inner = PiecewiseLinear::new(knots, values)?;
        let (k, v) = (inner.knots(), inner.values());
        if k.len() < 2 || k[0] != 0.0 || k[k.len() - 1] != 1.0 {
            return Err(Error::Invalid { what: "distortion knots", reason: "must start at 0 and end at 1" });
        }
        if v[0] != 0.0 {
            return Err(Error::Invalid { what: "distortion", reason: "w(0) must equal 0" });
        }
        if let Some(i) = v.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::NotMonotone { what: "distortion values", index: i + 1 });
        }
        Ok(Self { inner })
    }

    pub fn identity() -> Self {
        Self::new(alloc::vec![0.0, 1.0], alloc::vec![0.0, 1.0]).expect("valid")
    }

    /// `w` with `w(levelⱼ) = Σ_{k≤j} incrementₖ`; levels end at 1.
    pub fn from_increments(levels: &[f64], increments: &[f64]) -> Result<Self> {
        if levels.len() != increments.len() {
            return Err(Error::LengthMismatch { expected: levels.len(), found: increments.len() });
        }
        let mut knots = Vec::with_capacity(levels.len() + 1);
        let mut values = Vec::with_capacity(levels.len() + 1);
        knots.push(0.0);
        values.push(0.0);
        let mut acc = 0.0;
        for (&p, &dw) in levels.iter().zip(increments) {
            acc += dw;
            knots.push(p);
            values.push(acc);
        }
        Self::new(knots, values)
    }

    pub fn knots(&self) -> &[f64] {
        self.inner.knots()
    }

    pub fn values(&self) -> &[f64] {
        self.inner.values()
    }

    pub fn evaluate(&self, p: f64) -> f64 {
        self.inner.evaluate(p)
    }

    fn at(&self, p: &Rational) -> f64 {
        self.inner.evaluate(to_f64(p))
    }

    pub fn total(&self) -> f64 {
        *self.values().last().expect("nonempty")
    }

    pub fn is_normalized(&self) -> bool {
        self.total() == 1.0
    }

    /// Nonincreasing slopes, compared exactly.
    pub fn is_concave(&self) -> bool {
        self.inner.is_concave()
    }

    /// `w(q) ≥ q` at every knot, hence everywhere.
    pub fn dominates_identity(&self) -> bool {
        self.knots().iter().zip(self.values()).all(|(q, w)| w >= q)
    }

    /// `λ·w₁ + (1−λ)·w₂` for `λ ∈ [0,1]`.
    pub fn mix(lambda: f64, w1: &Self, w2: &Self) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::WeightOutOfRange(lambda));
        }
        let inner = PiecewiseLinear::mix(lambda, &w1.inner, &w2.inner);
        Self::new(inner.knots().to_vec(), inner.values().to_vec())
    }

    fn require_normalized(&self) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::Unnormalized)
        }
    }
}

/// `U(Φ) = ∫₀¹ Φ(p) dw(p) = Σ zᵢ·[w(pᵢ) − w(pᵢ₋₁)]`.
pub fn rdu_evaluate(w: &DistortionFunction, phi: &StepQuantile) -> f64 {
    let mut prev = 0.0;
    compensated_sum(phi.segments().map(|s| {
        let next = w.at(s.upper);
        let term = s.value * (next - prev);
        prev = next;
        term
    }))
}

/// `−∫_{−∞}^0 w(F(z)) dz + ∫_0^∞ [1 − w(F(z))] dz`, integrated exactly over the
/// pieces where the step CDF is constant. Requires `w(1) = 1`.
pub fn choquet_evaluate(w: &DistortionFunction, mu: &DiscreteMeasure) -> Result<f64> {
    w.require_normalized()?;
    if mu.kind() != MeasureKind::Probability {
        return Err(Error::UnsupportedKind);
    }
    if mu.dim() != 1 {
        return Err(Error::RequiresScalar(mu.dim()));
    }
    // (z, F(z)) at every atom and at the origin; F is constant up to the next entry.
    let mut breaks: Vec<(f64, Rational)> = Vec::with_capacity(mu.len() + 1);
    let mut cumulative = Rational::zero();
    let mut origin = false;
    for a in mu.atoms() {
        let x = a.point.value();
        if !origin && x >= 0.0 {
            if x > 0.0 {
                breaks.push((0.0, cumulative.clone()));
            }
            origin = true;
        }
        cumulative += &a.mass;
        breaks.push((x, cumulative.clone()));
    }
    if !origin {
        breaks.push((0.0, cumulative));
    }
    // The tails contribute nothing: w(0) = 0 on the left and 1 − w(1) = 0 on the right.
    let mut sum = CompensatedSum::new();
    for pair in breaks.windows(2) {
        let ((lo, f), (hi, _)) = (&pair[0], &pair[1]);
        let width = hi - lo;
        let wf = w.at(f);
        if *hi <= 0.0 {
            sum.add(-wf * width);
        } else {
            sum.add((1.0 - wf) * width);
        }
    }
    Ok(sum.value())
}

/// `Σ u(zᵢ)·[w(pᵢ) − w(pᵢ₋₁)]`.
pub fn anticipated_utility(u: &UtilityFunction, w: &DistortionFunction, phi: &StepQuantile) -> Result<f64> {
    let mut prev = 0.0;
    let terms = phi
        .segments()
        .map(|s| {
            let next = w.at(s.upper);
            let term = u.evaluate_scalar(s.value)? * (next - prev);
            prev = next;
            Ok(term)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(compensated_sum(terms))
}

/// `|U(αΦ + βΨ) − α·U(Φ) − β·U(Ψ)|`.
pub fn comonotonic_additivity_residual(
    w: &DistortionFunction,
    phi: &StepQuantile,
    psi: &StepQuantile,
    alpha: f64,
    beta: f64,
) -> Result<f64> {
    let combined = StepQuantile::comonotonic_combine(alpha, phi, beta, psi)?;
    Ok((rdu_evaluate(w, &combined) - alpha * rdu_evaluate(w, phi) - beta * rdu_evaluate(w, psi)).abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskCheck {
    pub coarse: f64,
    pub fine: f64,
    pub ok: bool,
}

/// Compares `U(Φ_G)` with `U(Φ)` for the coarsening at `betas`.
pub fn dual_risk_aversion_check(w: &DistortionFunction, phi: &StepQuantile, betas: &[Rational]) -> Result<RiskCheck> {
    let coarse = rdu_evaluate(w, &phi.coarsen(betas)?);
    let fine = rdu_evaluate(w, phi);
    Ok(RiskCheck { coarse, fine, ok: coarse >= fine - RISK_TOLERANCE })
}

/// A four-point prospect whose coarsening is strictly worse under `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    /// Values −3, −2, −1, 0 at levels p₁, p₂, p₃, 1.
    pub quantile: StepQuantile,
    pub betas: Vec<Rational>,
    /// `U(Φ) − U(Φ_G) > 0`.
    pub violation: f64,
}

/// The four-point quantile with mass `p₁` at −3, `p₂−p₁` at −2, `p₃−p₂` at −1
/// and `1−p₃` at 0, together with its coarsening levels `{p₁, p₃, 1}`.
pub fn four_point_prospect(p1: f64, p2: f64, p3: f64) -> Result<(StepQuantile, Vec<Rational>)> {
    if !(0.0 < p1 && p1 < p2 && p2 < p3 && p3 <= 1.0) {
        return Err(Error::Invalid { what: "four-point levels", reason: "need 0 < p1 < p2 < p3 <= 1" });
    }
    let (mut levels, mut values) = (alloc::vec![p1, p2, p3], alloc::vec![-3.0, -2.0, -1.0]);
    if p3 < 1.0 {
        levels.push(1.0);
        values.push(0.0);
    }
    let quantile = StepQuantile::from_f64(&levels, values)?;
    let mut betas = alloc::vec![rational(p1).expect("finite"), rational(p3).expect("finite")];
    if p3 < 1.0 {
        betas.push(Rational::one());
    }
    Ok((quantile, betas))
}

/// Searches for a violation of the secant inequality
/// `w(p₁)(p₃−p₂)/(p₃−p₁) + w(p₃)(p₂−p₁)/(p₃−p₁) ≤ w(p₂)`.
///
/// `p₂` ranges over interior knots where the slope increases, `p₁` and `p₃`
/// over the neighbouring knots and the midpoints towards them. Returns the
/// candidate with the largest violation, or `None` when no candidate exceeds
/// [`COUNTEREXAMPLE_MARGIN`] (in particular for every concave `w`).
pub fn concavity_counterexample(w: &DistortionFunction) -> Option<Counterexample> {
    let knots = w.knots();
    let mut best: Option<(f64, f64, f64, f64)> = None;
    for k in w.inner.convex_kinks() {
        let p2 = knots[k];
        let lefts = [knots[k - 1], 0.5 * (knots[k - 1] + p2)];
        let rights = [knots[k + 1], 0.5 * (p2 + knots[k + 1])];
        for &p1 in &lefts {
            for &p3 in &rights {
                if !(0.0 < p1 && p1 < p2 && p2 < p3) {
                    continue;
                }
                let secant = w.evaluate(p1) * ((p3 - p2) / (p3 - p1)) + w.evaluate(p3) * ((p2 - p1) / (p3 - p1));
                let gap = secant - w.evaluate(p2);
                if gap > COUNTEREXAMPLE_MARGIN && best.map_or(true, |b| gap > b.3) {
                    best = Some((p1, p2, p3, gap));
                }
            }
        }
    }
    let (p1, p2, p3, _) = best?;
    let (quantile, betas) = four_point_prospect(p1, p2, p3).ok()?;
    let coarse = quantile.coarsen(&betas).ok()?;
    let violation = rdu_evaluate(w, &quantile) - rdu_evaluate(w, &coarse);
    Some(Counterexample { p1, p2, p3, quantile, betas, violation })
}

/// Whether every prospect is weakly worse than its mean, i.e. `w(p) ≥ p`.
pub fn mean_preference_check(w: &DistortionFunction) -> Result<bool> {
    w.require_normalized()?;
    Ok(w.dominates_identity())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::ratio;
    use alloc::vec;

    fn concave() -> DistortionFunction {
        DistortionFunction::new(vec![0.0, 0.5, 1.0], vec![0.0, 0.7, 1.0]).unwrap()
    }

    fn squared() -> DistortionFunction {
        DistortionFunction::new(vec![0.0, 0.25, 0.5, 0.75, 1.0], vec![0.0, 0.0625, 0.25, 0.5625, 1.0]).unwrap()
    }

    fn two_point(p: f64) -> DiscreteMeasure {
        DiscreteMeasure::from_pairs(&[(0.0, p), (1.0, 1.0 - p)]).unwrap()
    }

    #[test]
    fn construction_rejects_invalid_distortions() {
        assert!(DistortionFunction::new(vec![0.0, 1.0], vec![0.1, 1.0]).is_err());
        assert_eq!(
            DistortionFunction::new(vec![0.0, 0.5, 1.0], vec![0.0, 0.8, 0.6]),
            Err(Error::NotMonotone { what: "distortion values", index: 2 })
        );
        assert!(DistortionFunction::new(vec![0.0, 0.9], vec![0.0, 1.0]).is_err());
        assert!(DistortionFunction::new(vec![0.1, 1.0], vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn rdu_examples() {
        let mu = DiscreteMeasure::from_pairs(&[(-1.0, 0.25), (2.0, 0.25), (3.0, 0.5)]).unwrap();
        let phi = mu.quantile().unwrap();
        let id = DistortionFunction::identity();
        assert!((rdu_evaluate(&id, &phi) - mu.expectation().unwrap().value()).abs() < 1e-15);

        let w = concave();
        let p = 0.3;
        let q = two_point(p).quantile().unwrap();
        assert_eq!(rdu_evaluate(&w, &q), 1.0 - w.evaluate(p));

        let (p1, p2, p3) = (0.1, 0.4, 0.8);
        let (four, _) = four_point_prospect(p1, p2, p3).unwrap();
        let expected = -(w.evaluate(p1) + w.evaluate(p2) + w.evaluate(p3));
        assert!((rdu_evaluate(&w, &four) - expected).abs() < 1e-15);
    }

    #[test]
    fn certainty() {
        let w = DistortionFunction::new(vec![0.0, 0.5, 1.0], vec![0.0, 0.7, 1.3]).unwrap();
        assert_eq!(rdu_evaluate(&w, &StepQuantile::constant(2.0)), 2.0 * 1.3);
        assert_eq!(choquet_evaluate(&concave(), &DiscreteMeasure::from_pairs(&[(-7.5, 1.0)]).unwrap()).unwrap(), -7.5);
        assert_eq!(choquet_evaluate(&concave(), &DiscreteMeasure::from_pairs(&[(7.5, 1.0)]).unwrap()).unwrap(), 7.5);
    }

    #[test]
    fn choquet_examples() {
        let w = concave();
        let p = 0.3;
        assert_eq!(choquet_evaluate(&w, &two_point(p)).unwrap(), 1.0 - w.evaluate(p));
        let unnormalized = DistortionFunction::new(vec![0.0, 1.0], vec![0.0, 2.0]).unwrap();
        assert_eq!(choquet_evaluate(&unnormalized, &two_point(p)), Err(Error::Unnormalized));

        let mu = DiscreteMeasure::from_pairs(&[(-2.0, 0.2), (-0.5, 0.3), (0.0, 0.1), (1.5, 0.4)]).unwrap();
        let a = choquet_evaluate(&w, &mu).unwrap();
        let b = rdu_evaluate(&w, &mu.quantile().unwrap());
        assert!((a - b).abs() < 1e-14, "{a} vs {b}");
    }

    #[test]
    fn anticipated_utility_examples() {
        let w = concave();
        let phi = StepQuantile::from_f64(&[0.4, 1.0], vec![1.0, 3.0]).unwrap();
        let id = UtilityFunction::identity();
        assert_eq!(anticipated_utility(&id, &w, &phi).unwrap(), rdu_evaluate(&w, &phi));

        // u(z) = z² on the support {1, 3}
        let sq = UtilityFunction::piecewise_linear(vec![1.0, 3.0], vec![1.0, 9.0]).unwrap();
        let hand = 1.0 * w.evaluate(0.4) + 9.0 * (1.0 - w.evaluate(0.4));
        assert!((anticipated_utility(&sq, &w, &phi).unwrap() - hand).abs() < 1e-15);

        let undistorted = anticipated_utility(&sq, &DistortionFunction::identity(), &phi).unwrap();
        let eu = crate::eu::evaluate(&sq, &phi.to_measure()).unwrap();
        assert!((undistorted - eu).abs() < 1e-12);
    }

    #[test]
    fn additivity_examples() {
        let w = squared();
        let phi = StepQuantile::from_f64(&[0.3, 1.0], vec![-1.0, 2.0]).unwrap();
        assert!(comonotonic_additivity_residual(&w, &phi, &phi, 2.5, 0.0).unwrap() < 1e-12);
        assert!(comonotonic_additivity_residual(&w, &phi, &phi, 1.0, 1.0).unwrap() < 1e-12);
    }

    #[test]
    fn risk_check_examples() {
        let phi = StepQuantile::from_f64(&[0.2, 0.5, 1.0], vec![-1.0, 0.5, 4.0]).unwrap();
        let betas = [ratio(1, 2), ratio(1, 1)];
        let r = dual_risk_aversion_check(&DistortionFunction::identity(), &phi, &betas).unwrap();
        assert!((r.coarse - r.fine).abs() < 1e-12);
        assert!(dual_risk_aversion_check(&concave(), &phi, &betas).unwrap().ok);
        assert!(dual_risk_aversion_check(&concave(), &phi, &[ratio(1, 3), ratio(1, 1)]).is_err());
    }

    #[test]
    fn counterexample_examples() {
        assert!(concavity_counterexample(&concave()).is_none());
        assert!(concavity_counterexample(&DistortionFunction::identity()).is_none());

        let convex = DistortionFunction::new(vec![0.0, 0.6, 1.0], vec![0.0, 0.2, 1.0]).unwrap();
        let cx = concavity_counterexample(&convex).unwrap();
        assert_eq!(cx.p2, 0.6);
        assert!(cx.violation > 0.0);
        let check = dual_risk_aversion_check(&convex, &cx.quantile, &cx.betas).unwrap();
        assert!(!check.ok);
        assert!((check.fine - check.coarse - cx.violation).abs() < 1e-15);
    }

    #[test]
    fn mean_preference_examples() {
        assert!(mean_preference_check(&DistortionFunction::identity()).unwrap());
        assert!(mean_preference_check(&concave()).unwrap());
        assert!(!mean_preference_check(&squared()).unwrap());
        let unnormalized = DistortionFunction::new(vec![0.0, 1.0], vec![0.0, 0.5]).unwrap();
        assert_eq!(mean_preference_check(&unnormalized), Err(Error::Unnormalized));
    }
}
