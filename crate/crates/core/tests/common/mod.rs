#![allow(dead_code)]

use dualutil_core::{DiscreteMeasure, DistortionFunction, OutcomePoint, Rational, StepQuantile, UtilityFunction};
use proptest::prelude::*;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Up to `max` atoms at points on a 0.01 grid in [−5, 5] with integer weights.
pub fn measure(max: usize) -> impl Strategy<Value = DiscreteMeasure> {
    prop::collection::vec((-500i64..=500, 1i64..=50), 1..=max).prop_map(|atoms| {
        DiscreteMeasure::probability(
            atoms.into_iter().map(|(x, w)| (OutcomePoint::scalar(x as f64 / 100.0), rat(w, 1))),
        )
        .unwrap()
    })
}

pub fn quantile(max: usize) -> impl Strategy<Value = StepQuantile> {
    measure(max).prop_map(|m| m.quantile().unwrap())
}

/// Levels on the 1/1000 grid, so midpoint Riemann sums on 10⁴ cells are exact.
pub fn grid_quantile(max: usize) -> impl Strategy<Value = StepQuantile> {
    (prop::collection::btree_set(1i64..1000, 0..max), prop::collection::vec(-1000i64..=1000, max + 1)).prop_map(
        |(cuts, mut raw)| {
            let mut levels: Vec<Rational> = cuts.into_iter().map(|k| rat(k, 1000)).collect();
            levels.push(rat(1, 1));
            raw.truncate(levels.len());
            raw.sort();
            StepQuantile::new(levels, raw.into_iter().map(|v| v as f64 / 100.0).collect()).unwrap()
        },
    )
}

fn interior_knots(max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::btree_set(1u32..100, 0..max).prop_map(|s| {
        let mut k = vec![0.0];
        k.extend(s.into_iter().map(|x| x as f64 / 100.0));
        k.push(1.0);
        k
    })
}

/// Normalized distortion with random nondecreasing values.
pub fn distortion() -> impl Strategy<Value = DistortionFunction> {
    interior_knots(6).prop_flat_map(|knots| {
        let n = knots.len();
        prop::collection::vec(0u32..=1000, n - 2).prop_map(move |mut raw| {
            raw.sort();
            let mut values = vec![0.0];
            values.extend(raw.into_iter().map(|v| v as f64 / 1000.0));
            values.push(1.0);
            DistortionFunction::new(knots.clone(), values).unwrap()
        })
    })
}

/// Normalized concave distortion built from decreasing slopes.
pub fn concave_distortion() -> impl Strategy<Value = DistortionFunction> {
    interior_knots(6)
        .prop_flat_map(|knots| {
            let n = knots.len();
            prop::collection::vec(1u32..=1000, n - 1).prop_map(move |mut slopes| {
                slopes.sort_by(|a, b| b.cmp(a));
                let mut values = vec![0.0];
                let mut acc = 0.0;
                for (i, s) in slopes.iter().enumerate() {
                    acc += *s as f64 * (knots[i + 1] - knots[i]);
                    values.push(acc);
                }
                let total = acc;
                for v in &mut values {
                    *v /= total;
                }
                *values.last_mut().unwrap() = 1.0;
                DistortionFunction::new(knots.clone(), values).unwrap()
            })
        })
        .prop_filter("rounding broke concavity", |w| w.is_concave())
}

/// Piecewise-linear utility with arbitrary values at up to `max` knots.
pub fn utility(max: usize) -> impl Strategy<Value = UtilityFunction> {
    prop::collection::btree_map(-600i64..=600, -500i64..=500, 1..=max).prop_map(|m| {
        let (k, v): (Vec<f64>, Vec<f64>) = m.into_iter().map(|(k, v)| (k as f64 / 100.0, v as f64 / 100.0)).unzip();
        UtilityFunction::piecewise_linear(k, v).unwrap()
    })
}

/// Concave piecewise-linear utility: decreasing slopes (possibly negative).
pub fn concave_utility() -> impl Strategy<Value = UtilityFunction> {
    (prop::collection::btree_set(-600i64..=600, 1..=6), prop::collection::vec(-20i64..=20, 6), -50i64..=50)
        .prop_map(|(knots, mut slopes, start)| {
            let knots: Vec<f64> = knots.into_iter().map(|k| k as f64 / 100.0).collect();
            slopes.sort_by(|a, b| b.cmp(a));
            let mut values = vec![start as f64];
            for i in 1..knots.len() {
                let v = values[i - 1] + slopes[i - 1] as f64 / 4.0 * (knots[i] - knots[i - 1]);
                values.push(v);
            }
            UtilityFunction::piecewise_linear(knots, values).unwrap()
        })
        .prop_filter("rounding broke concavity", |u| u.is_concave() == Some(true))
}

/// A random subset of the levels of `q`, always ending at 1.
pub fn betas_of(q: &StepQuantile, mask: u64) -> Vec<Rational> {
    let n = q.levels().len();
    q.levels()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i == n - 1 || (mask >> (i % 64)) & 1 == 1)
        .map(|(_, l)| l.clone())
        .collect()
}
