mod common;

use common::*;
use dualutil_core::du::{
    anticipated_utility, choquet_evaluate, comonotonic_additivity_residual, concavity_counterexample,
    dual_risk_aversion_check, four_point_prospect, mean_preference_check, rdu_evaluate,
};
use dualutil_core::eu;
use dualutil_core::{DiscreteMeasure, DistortionFunction, StepQuantile, UtilityFunction};
use proptest::prelude::*;

fn levels3() -> impl Strategy<Value = (f64, f64, f64)> {
    prop::collection::btree_set(1u32..=1000, 3).prop_map(|s| {
        let v: Vec<f64> = s.into_iter().map(|x| x as f64 / 1000.0).collect();
        (v[0], v[1], v[2])
    })
}

fn secant_gap(w: &DistortionFunction, p1: f64, p2: f64, p3: f64) -> f64 {
    w.evaluate(p1) * (p3 - p2) / (p3 - p1) + w.evaluate(p3) * (p2 - p1) / (p3 - p1) - w.evaluate(p2)
}

proptest! {
    #[test]
    fn rdu_equals_choquet(w in distortion(), m in measure(15)) {
        let rdu = rdu_evaluate(&w, &m.quantile().unwrap());
        let choquet = choquet_evaluate(&w, &m).unwrap();
        prop_assert!((rdu - choquet).abs() <= 1e-10, "{} vs {}", rdu, choquet);
    }

    #[test]
    fn two_point_prospect_value(w in distortion(), p in 1u32..1000) {
        let p = p as f64 / 1000.0;
        let m = DiscreteMeasure::from_pairs(&[(0.0, p), (1.0, 1.0 - p)]).unwrap();
        let expected = 1.0 - w.evaluate(p);
        prop_assert!((rdu_evaluate(&w, &m.quantile().unwrap()) - expected).abs() <= 1e-12);
        prop_assert!((choquet_evaluate(&w, &m).unwrap() - expected).abs() <= 1e-12);
    }

    #[test]
    fn four_point_values((p1, p2, p3) in levels3(), w in distortion()) {
        let (q, betas) = four_point_prospect(p1, p2, p3).unwrap();
        let (w1, w2, w3) = (w.evaluate(p1), w.evaluate(p2), w.evaluate(p3));
        prop_assert!((rdu_evaluate(&w, &q) + (w1 + w2 + w3)).abs() <= 1e-12);
        let coarse = -(w1 * (-p1 - p2 + 2.0 * p3) / (p3 - p1) + w3 * (-2.0 * p1 + p2 + p3) / (p3 - p1));
        prop_assert!((rdu_evaluate(&w, &q.coarsen(&betas).unwrap()) - coarse).abs() <= 1e-10);
        let drop = rdu_evaluate(&w, &q) - rdu_evaluate(&w, &q.coarsen(&betas).unwrap());
        prop_assert!((drop - secant_gap(&w, p1, p2, p3)).abs() <= 1e-10);
    }

    #[test]
    fn certainty_equivalence(w in distortion(), c in -1000i64..=1000, s in 1u32..=100) {
        let c = c as f64 / 10.0;
        let scaled = DistortionFunction::new(w.knots().to_vec(), w.values().iter().map(|v| v * s as f64 / 10.0).collect()).unwrap();
        prop_assert_eq!(rdu_evaluate(&scaled, &StepQuantile::constant(c)), c * scaled.total());
        prop_assert_eq!(rdu_evaluate(&w, &StepQuantile::constant(c)), c);
    }

    #[test]
    fn comonotonic_additivity(w in distortion(), phi in quantile(10), psi in quantile(10), a in 0u32..=50, b in 0u32..=50) {
        let r = comonotonic_additivity_residual(&w, &phi, &psi, a as f64 / 10.0, b as f64 / 10.0).unwrap();
        prop_assert!(r <= 1e-10, "residual {}", r);
    }

    #[test]
    fn monotone_in_quantile(w in distortion(), phi in quantile(10), bump in quantile(10)) {
        // adding a nonnegative quantile makes phi pointwise larger
        let lowest = bump.values()[0].min(0.0);
        let nonneg = StepQuantile::new(bump.levels().to_vec(), bump.values().iter().map(|v| v - lowest).collect()).unwrap();
        let psi = StepQuantile::comonotonic_combine(1.0, &phi, 1.0, &nonneg).unwrap();
        prop_assert!(rdu_evaluate(&w, &psi) >= rdu_evaluate(&w, &phi) - 1e-12);
    }

    #[test]
    fn linear_in_distortion(w1 in distortion(), w2 in distortion(), l in 0u32..=100, phi in quantile(10)) {
        let l = l as f64 / 100.0;
        let mixed = DistortionFunction::mix(l, &w1, &w2).unwrap();
        let direct = l * rdu_evaluate(&w1, &phi) + (1.0 - l) * rdu_evaluate(&w2, &phi);
        prop_assert!((rdu_evaluate(&mixed, &phi) - direct).abs() <= 1e-12);
    }

    #[test]
    fn concave_distortion_is_risk_averse(w in concave_distortion(), phi in quantile(12), mask in any::<u64>()) {
        let check = dual_risk_aversion_check(&w, &phi, &betas_of(&phi, mask)).unwrap();
        prop_assert!(check.ok, "{:?}", check);
        prop_assert!(concavity_counterexample(&w).is_none());
    }

    #[test]
    fn non_concave_distortion_has_counterexample(w in distortion()) {
        // independent re-evaluation through the Choquet integral of the four-point law
        match concavity_counterexample(&w) {
            None => prop_assert!(w.is_concave()),
            Some(c) => {
                prop_assert!(!w.is_concave());
                let coarse = c.quantile.coarsen(&c.betas).unwrap();
                let fine = choquet_evaluate(&w, &c.quantile.to_measure()).unwrap();
                let averaged = choquet_evaluate(&w, &coarse.to_measure()).unwrap();
                prop_assert!((fine - averaged - c.violation).abs() <= 1e-10);
                prop_assert!((c.violation - secant_gap(&w, c.p1, c.p2, c.p3)).abs() <= 1e-10);
                prop_assert!(c.violation > 0.0);
            }
        }
    }

    #[test]
    fn mean_preference_matches_identity_test(w in distortion(), phis in prop::collection::vec(quantile(8), 20)) {
        let prefers_mean = mean_preference_check(&w).unwrap();
        if prefers_mean {
            for phi in &phis {
                prop_assert!(rdu_evaluate(&w, phi) <= phi.mean() + 1e-10);
            }
        } else {
            // a knot below the diagonal gives a two-point prospect better than its mean
            let p = w.knots().iter().copied().find(|&p| w.evaluate(p) < p).unwrap();
            let m = DiscreteMeasure::from_pairs(&[(0.0, p), (1.0, 1.0 - p)]).unwrap();
            let q = m.quantile().unwrap();
            prop_assert!(rdu_evaluate(&w, &q) > q.mean() + 1e-10);
        }
    }

    #[test]
    fn anticipated_utility_reductions(u in utility(6), w in distortion(), phi in quantile(10)) {
        let au = anticipated_utility(&UtilityFunction::identity(), &w, &phi).unwrap();
        prop_assert!((au - rdu_evaluate(&w, &phi)).abs() <= 1e-12);
        let au = anticipated_utility(&u, &DistortionFunction::identity(), &phi).unwrap();
        prop_assert!((au - eu::evaluate(&u, &phi.to_measure()).unwrap()).abs() <= 1e-12);
    }
}
