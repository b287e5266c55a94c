//! Seeded random instances for the audit suites and the acceptance tests.
//!
//! Every trial draws from its own ChaCha8 stream, so trial `k` of a run is
//! reproducible in isolation and independent of the trial count.

use dualutil_core::{DiscreteMeasure, DistortionFunction, IntervalPartition, OutcomePoint, Rational, StepQuantile};
use dualutil_core::UtilityFunction;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

/// The generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Outcome on a 1/100 grid in `[−10, 10]`.
fn outcome(rng: &mut TrialRng) -> f64 {
    rng.random_range(-1000i64..=1000) as f64 / 100.0
}

/// `n` distinct sorted integers from `1..total`, as fractions of `total`.
fn interior_levels(rng: &mut TrialRng, n: usize, total: u32) -> Vec<i64> {
    let n = n.min(total as usize - 1);
    let mut picked: Vec<i64> = sample(rng, total as usize - 1, n).into_iter().map(|i| i as i64 + 1).collect();
    picked.sort_unstable();
    picked
}

/// Probability measure on ℝ with 1 to `max_atoms` atoms and integer weights.
pub fn measure(rng: &mut TrialRng, max_atoms: usize) -> DiscreteMeasure {
    let n = rng.random_range(1..=max_atoms);
    let atoms: Vec<(OutcomePoint, Rational)> =
        (0..n).map(|_| (OutcomePoint::scalar(outcome(rng)), rat(rng.random_range(1..=100), 1))).collect();
    DiscreteMeasure::probability(atoms).expect("positive weights")
}

pub fn quantile(rng: &mut TrialRng, max_steps: usize) -> StepQuantile {
    measure(rng, max_steps).quantile().expect("scalar probability measure")
}

/// A subset of the levels of `q`, always containing 1.
pub fn betas(rng: &mut TrialRng, q: &StepQuantile) -> Vec<Rational> {
    let n = q.levels().len();
    q.levels().iter().enumerate().filter(|(i, _)| *i == n - 1 || rng.random_bool(0.5)).map(|(_, l)| l.clone()).collect()
}

pub fn partition(rng: &mut TrialRng, max_cuts: usize) -> IntervalPartition {
    let mut cuts: Vec<f64> = (0..rng.random_range(0..=max_cuts)).map(|_| outcome(rng)).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    IntervalPartition::new(cuts).expect("sorted distinct cuts")
}

fn knots(rng: &mut TrialRng, max_interior: usize) -> Vec<f64> {
    let mut k = vec![0.0];
    let n = rng.random_range(0..=max_interior);
    k.extend(interior_levels(rng, n, 100).into_iter().map(|i| i as f64 / 100.0));
    k.push(1.0);
    k
}

/// Normalized distortion with random nondecreasing values.
pub fn distortion(rng: &mut TrialRng) -> DistortionFunction {
    let k = knots(rng, 6);
    let mut inner: Vec<f64> = (0..k.len() - 2).map(|_| rng.random_range(0..=1000) as f64 / 1000.0).collect();
    inner.sort_by(f64::total_cmp);
    let mut values = vec![0.0];
    values.extend(inner);
    values.push(1.0);
    DistortionFunction::new(k, values).expect("valid distortion")
}

/// Normalized concave distortion: slopes drawn and sorted decreasingly.
pub fn concave_distortion(rng: &mut TrialRng) -> DistortionFunction {
    loop {
        let k = knots(rng, 6);
        let mut slopes: Vec<f64> = (0..k.len() - 1).map(|_| rng.random_range(1..=1000) as f64).collect();
        slopes.sort_by(|a, b| b.total_cmp(a));
        let mut values = vec![0.0];
        for (i, s) in slopes.iter().enumerate() {
            values.push(values[i] + s * (k[i + 1] - k[i]));
        }
        let total = values[values.len() - 1];
        let mut values: Vec<f64> = values.into_iter().map(|v| v / total).collect();
        *values.last_mut().expect("nonempty") = 1.0;
        let w = DistortionFunction::new(k, values).expect("valid distortion");
        if w.is_concave() {
            return w;
        }
    }
}

/// Normalized distortion with `w ≥ id`.
pub fn dominating_distortion(rng: &mut TrialRng) -> DistortionFunction {
    let w = distortion(rng);
    let values = w.knots().iter().zip(w.values()).map(|(&p, &v)| v.max(p)).collect();
    DistortionFunction::new(w.knots().to_vec(), values).expect("max of nondecreasing functions")
}

/// Normalized distortion with `w(p) ≤ p − 0.1` at some interior knot.
pub fn violating_distortion(rng: &mut TrialRng) -> DistortionFunction {
    loop {
        let w = distortion(rng);
        let k = w.knots().to_vec();
        if k.len() < 3 {
            continue;
        }
        let dip = rng.random_range(1..k.len() - 1);
        let mut values: Vec<f64> = k.iter().zip(w.values()).map(|(&p, &v)| v.min(p)).collect();
        let target = (k[dip] - 0.1 - rng.random_range(0..=100) as f64 / 1000.0).max(0.0);
        for v in &mut values[1..=dip] {
            *v = v.min(target);
        }
        if k[dip] - values[dip] >= 0.1 - 1e-12 {
            return DistortionFunction::new(k, values).expect("min of nondecreasing functions");
        }
    }
}

/// Piecewise-linear utility with 1 to `max_knots` knots and arbitrary values.
pub fn utility(rng: &mut TrialRng, max_knots: usize) -> UtilityFunction {
    let n = rng.random_range(1..=max_knots);
    let mut knots: Vec<f64> = interior_levels(rng, n, 2000).into_iter().map(|i| (i - 1000) as f64 / 100.0).collect();
    knots.dedup();
    let values = knots.iter().map(|_| rng.random_range(-500..=500) as f64 / 100.0).collect();
    UtilityFunction::piecewise_linear(knots, values).expect("sorted knots")
}

/// Concave piecewise-linear utility: decreasing slopes, possibly negative.
pub fn concave_utility(rng: &mut TrialRng, max_knots: usize) -> UtilityFunction {
    loop {
        let n = rng.random_range(1..=max_knots);
        let knots: Vec<f64> = interior_levels(rng, n, 2000).into_iter().map(|i| (i - 1000) as f64 / 100.0).collect();
        let mut slopes: Vec<f64> = (1..knots.len()).map(|_| rng.random_range(-20..=20) as f64 / 4.0).collect();
        slopes.sort_by(|a, b| b.total_cmp(a));
        let mut values = vec![rng.random_range(-50..=50) as f64];
        for i in 1..knots.len() {
            values.push(values[i - 1] + slopes[i - 1] * (knots[i] - knots[i - 1]));
        }
        let u = UtilityFunction::piecewise_linear(knots, values).expect("sorted knots");
        if u.is_concave() == Some(true) {
            return u;
        }
    }
}

/// Utility with a strictly convex kink at `k`, and a two-point spread around
/// it whose mean is strictly preferred by any concave utility.
pub fn convex_kink(rng: &mut TrialRng) -> (UtilityFunction, DiscreteMeasure) {
    let k = outcome(rng);
    let left = rng.random_range(-5i64..5) as f64;
    let right = left + rng.random_range(1i64..=5) as f64;
    let d = rng.random_range(1..=100) as f64 / 100.0;
    let u = UtilityFunction::piecewise_linear(vec![k - 1.0, k, k + 1.0], vec![-left, 0.0, right])
        .expect("sorted knots");
    let mu = DiscreteMeasure::from_pairs(&[(k - d, 0.5), (k + d, 0.5)]).expect("valid spread");
    (u, mu)
}
