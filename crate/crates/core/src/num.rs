//! Exact probability arithmetic and compensated floating-point sums.

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// Exact rational used for every mass and probability level.
pub type Rational = BigRational;

/// Converts a finite `f64` to the rational it denotes exactly.
pub fn rational(x: f64) -> Option<Rational> {
    if x.is_finite() {
        Rational::from_float(x)
    } else {
        None
    }
}

/// Nearest `f64` to an exact rational.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
pub(crate) fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// Mass-weighted mean of `(value, mass)` pairs, clamped to the value range.
///
/// Shared by measure coarsening and quantile coarsening so both produce
/// bit-identical block averages.
pub(crate) fn block_mean<'a, I>(items: I) -> (f64, Rational)
where
    I: IntoIterator<Item = (f64, &'a Rational)>,
{
    let mut total = Rational::zero();
    let mut acc = CompensatedSum::new();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (z, m) in items {
        total += m;
        acc.add(z * to_f64(m));
        lo = lo.min(z);
        hi = hi.max(z);
    }
    let mean = acc.value() / to_f64(&total);
    (mean.clamp(lo, hi), total)
}
