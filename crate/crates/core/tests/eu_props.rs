mod common;

use common::*;
use dualutil_core::eu::{self, jensen_gap, mixture_affinity_residual, monotonicity_check, risk_aversion_audit};
use dualutil_core::{DiscreteMeasure, IntervalPartition, OutcomePoint, UtilityFunction};
use proptest::prelude::*;

fn increasing_utility() -> impl Strategy<Value = UtilityFunction> {
    prop::collection::btree_map(-600i64..=600, -500i64..=500, 1..=6).prop_map(|m| {
        let knots: Vec<f64> = m.keys().map(|&k| k as f64 / 100.0).collect();
        let mut values: Vec<i64> = m.into_values().collect();
        values.sort();
        UtilityFunction::piecewise_linear(knots, values.into_iter().map(|v| v as f64 / 100.0).collect()).unwrap()
    })
}

fn partition() -> impl Strategy<Value = IntervalPartition> {
    prop::collection::btree_set(-500i64..=500, 0..5)
        .prop_map(|c| IntervalPartition::new(c.into_iter().map(|x| x as f64 / 100.0).collect()).unwrap())
}

fn knots_of(u: &UtilityFunction) -> Vec<(f64, f64)> {
    let x = u.interpolated().unwrap();
    match x {
        UtilityFunction::PiecewiseLinear(f) => f.knots().iter().copied().zip(f.values().iter().copied()).collect(),
        UtilityFunction::Table(_) => unreachable!(),
    }
}

proptest! {
    #[test]
    fn mixture_is_affine(u in utility(6), mu in measure(8), nu in measure(8), a in 0u32..=1000) {
        let r = mixture_affinity_residual(&u, &mu, &nu, a as f64 / 1000.0).unwrap();
        prop_assert!(r <= 1e-12, "residual {}", r);
    }

    #[test]
    fn concave_utility_is_risk_averse(u in concave_utility(), mu in measure(10), parts in prop::collection::vec(partition(), 1..4)) {
        prop_assert!(jensen_gap(&u, &mu).unwrap() >= -1e-12);
        for row in risk_aversion_audit(&u, &mu, &parts).unwrap() {
            prop_assert!(row.ok, "{:?}", row);
        }
    }

    #[test]
    fn convex_kink_violates_risk_aversion(k in -400i64..=400, s1 in -5i64..5, bump in 1i64..5, d in 1i64..100) {
        // slope rises from s1 to s1 + bump at k; a symmetric spread around k loses utility when averaged
        let k = k as f64 / 100.0;
        let d = d as f64 / 100.0;
        let u = UtilityFunction::piecewise_linear(
            vec![k - 1.0, k, k + 1.0],
            vec![-(s1 as f64), 0.0, (s1 + bump) as f64],
        ).unwrap();
        prop_assert_eq!(u.is_concave(), Some(false));
        let mu = DiscreteMeasure::from_pairs(&[(k - d, 0.5), (k + d, 0.5)]).unwrap();
        let rows = risk_aversion_audit(&u, &mu, &[]).unwrap();
        prop_assert!(!rows[0].ok);
    }

    #[test]
    fn concavity_matches_secant_test(u in utility(6), triples in prop::collection::vec((-700i64..=700, -700i64..=700, 0u32..=1000), 1000)) {
        let concave = u.is_concave().unwrap();
        let f = |x: f64| u.evaluate_scalar(x).unwrap();
        if concave {
            for (x, y, l) in triples {
                let (x, y, l) = (x as f64 / 100.0, y as f64 / 100.0, l as f64 / 1000.0);
                let mid = l * x + (1.0 - l) * y;
                prop_assert!(f(mid) >= l * f(x) + (1.0 - l) * f(y) - 1e-9);
            }
        } else {
            // some knot lies strictly below the chord of its neighbours
            let k = knots_of(&u);
            let below = k.windows(3).any(|w| {
                let l = (w[2].0 - w[1].0) / (w[2].0 - w[0].0);
                w[1].1 < l * w[0].1 + (1.0 - l) * w[2].1 - 1e-12
            });
            prop_assert!(below);
        }
    }

    #[test]
    fn first_order_dominance_is_respected(u in increasing_utility(), mu in measure(10), shifts in prop::collection::vec(0i64..=200, 10)) {
        let nu = DiscreteMeasure::probability(
            mu.atoms().iter().zip(&shifts).map(|(a, s)| (OutcomePoint::scalar(a.point.value() - *s as f64 / 100.0), a.mass.clone())),
        ).unwrap();
        prop_assert!(eu::evaluate(&u, &mu).unwrap() >= eu::evaluate(&u, &nu).unwrap() - 1e-12);
        let pairs: Vec<_> = mu.atoms().iter().zip(&shifts)
            .map(|(a, s)| (a.point.clone(), OutcomePoint::scalar(a.point.value() - *s as f64 / 100.0)))
            .collect();
        prop_assert!(monotonicity_check(&u, &pairs).unwrap());
        let reversed: Vec<_> = pairs.iter().map(|(z, v)| (v.clone(), z.clone())).collect();
        if shifts[..mu.len()].iter().any(|&s| s > 0) {
            prop_assert!(monotonicity_check(&u, &reversed).is_err());
        }
    }

    #[test]
    fn affine_rescaling_is_equivariant(u in utility(5), mu in measure(8), a in 1i64..50, b in -50i64..50) {
        let (a, b) = (a as f64 / 10.0, b as f64 / 10.0);
        let lhs = eu::evaluate(&u.affine(a, b), &mu).unwrap();
        let rhs = a * eu::evaluate(&u, &mu).unwrap() + b;
        prop_assert!((lhs - rhs).abs() <= 1e-10);
    }
}
