//! Continuous piecewise-linear functions on ℝ, extended linearly past the
//! end knots. Shape predicates compare slopes exactly in rational arithmetic.

use alloc::vec::Vec;

use crate::num::{rational, Rational};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() != values.len() {
            return Err(Error::LengthMismatch { expected: knots.len(), found: values.len() });
        }
        if knots.is_empty() {
            return Err(Error::Empty);
        }
        if let Some(index) = knots.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { what: "knot", index });
        }
        if let Some(index) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { what: "value", index });
        }
        if let Some(i) = knots.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::NotIncreasing { what: "knots", index: i + 1 });
        }
        Ok(Self { knots, values })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        let n = self.knots.len();
        if n == 1 {
            return self.values[0];
        }
        let i = match self.knots.binary_search_by(|k| k.total_cmp(&x)) {
            Ok(i) => return self.values[i],
            Err(i) => i.clamp(1, n - 1),
        };
        let (x0, x1) = (self.knots[i - 1], self.knots[i]);
        let (y0, y1) = (self.values[i - 1], self.values[i]);
        y0 + (y1 - y0) * ((x - x0) / (x1 - x0))
    }

    /// Exact segment slopes; empty for a single knot.
    pub(crate) fn exact_slopes(&self) -> Vec<Rational> {
        let k: Vec<Rational> = self.knots.iter().map(|&x| rational(x).expect("finite")).collect();
        let v: Vec<Rational> = self.values.iter().map(|&y| rational(y).expect("finite")).collect();
        (1..k.len()).map(|i| (&v[i] - &v[i - 1]) / (&k[i] - &k[i - 1])).collect()
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }

    /// Concave iff the slopes are nonincreasing.
    pub fn is_concave(&self) -> bool {
        self.exact_slopes().windows(2).all(|w| w[0] >= w[1])
    }

    /// Interior knots where the slope strictly increases.
    pub(crate) fn convex_kinks(&self) -> Vec<usize> {
        let slopes = self.exact_slopes();
        (1..slopes.len()).filter(|&i| slopes[i] > slopes[i - 1]).collect()
    }

    /// `λ·f + (1−λ)·g` on the union of the knots.
    pub fn mix(lambda: f64, f: &Self, g: &Self) -> Self {
        let mut knots: Vec<f64> = f.knots.iter().chain(&g.knots).copied().collect();
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        let values = knots.iter().map(|&x| lambda * f.evaluate(x) + (1.0 - lambda) * g.evaluate(x)).collect();
        Self { knots, values }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn evaluates_and_extrapolates() {
        let f = PiecewiseLinear::new(vec![0.0, 1.0, 3.0], vec![0.0, 2.0, 3.0]).unwrap();
        assert_eq!(f.evaluate(0.5), 1.0);
        assert_eq!(f.evaluate(1.0), 2.0);
        assert_eq!(f.evaluate(2.0), 2.5);
        assert_eq!(f.evaluate(-1.0), -2.0);
        assert_eq!(f.evaluate(5.0), 4.0);
        let c = PiecewiseLinear::new(vec![1.0], vec![7.0]).unwrap();
        assert_eq!(c.evaluate(-100.0), 7.0);
    }

    #[test]
    fn shape_flags() {
        let concave = PiecewiseLinear::new(vec![0.0, 1.0, 3.0], vec![0.0, 2.0, 3.0]).unwrap();
        assert!(concave.is_concave());
        assert!(concave.is_nondecreasing());
        let convex = PiecewiseLinear::new(vec![0.0, 1.0, 2.0], vec![0.0, 0.0, 1.0]).unwrap();
        assert!(!convex.is_concave());
        assert_eq!(convex.convex_kinks(), vec![1]);
        let linear = PiecewiseLinear::new(vec![0.0, 0.1, 0.3], vec![0.0, 0.1, 0.3]).unwrap();
        assert!(linear.is_concave());
    }

    #[test]
    fn rejects_bad_knots() {
        assert!(PiecewiseLinear::new(vec![0.0, 0.0], vec![0.0, 1.0]).is_err());
        assert!(PiecewiseLinear::new(vec![0.0, f64::NAN], vec![0.0, 1.0]).is_err());
        assert!(PiecewiseLinear::new(vec![], vec![]).is_err());
    }
}
