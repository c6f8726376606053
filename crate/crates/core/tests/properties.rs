use proptest::prelude::*;

use countstable::stability::classify;
use countstable::{CompoundParams, StableParams};

/// Valid laws with `|1 - α| ≥ 0.1` off the log branch, so `δ, γ` stay moderate.
fn stable_params() -> impl Strategy<Value = StableParams> {
    let alpha = prop_oneof![0.05f64..0.9, Just(1.0), 1.1f64..=2.0,];
    (0.01f64..5.0, 0.0f64..1.0, alpha).prop_map(|(lambda, theta, alpha)| {
        CompoundParams::new(lambda, theta, alpha)
            .unwrap()
            .to_stable()
    })
}

fn log_branch() -> impl Strategy<Value = StableParams> {
    (0.01f64..5.0, 0.0f64..1.0)
        .prop_map(|(lambda, theta)| CompoundParams::new(lambda, theta, 1.0).unwrap().to_stable())
}

/// Valid laws whose parameters are small dyadic rationals.
fn dyadic_params() -> impl Strategy<Value = StableParams> {
    (
        prop::sample::select(vec![0.25, 0.5, 1.0, 1.5, 2.0]),
        0u32..256,
        0u32..256,
    )
        .prop_map(|(alpha, g, d)| {
            let gamma = f64::from(g) / 64.0 * if alpha < 1.0 { 1.0 } else { -1.0 };
            let bound = if alpha == 1.0 { -gamma } else { -alpha * gamma };
            StableParams::new(alpha, bound + f64::from(d) / 64.0, gamma)
        })
}

fn near(x: &StableParams, y: &StableParams, tol: f64) -> bool {
    (x.delta - y.delta).abs() <= tol && (x.gamma - y.gamma).abs() <= tol && x.alpha == y.alpha
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn thinning_is_a_semigroup(p in stable_params(), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let nested = p.thin(a).unwrap().thin(b).unwrap();
        let direct = p.thin(a * b).unwrap();
        prop_assert!(near(&nested, &direct, 1e-12), "{nested:?} vs {direct:?}");
    }

    #[test]
    fn shifts_add_exactly(p in dyadic_params(), b in 0u32..512, c in 0u32..512) {
        let (b, c) = (f64::from(b) / 64.0, f64::from(c) / 64.0);
        prop_assert_eq!(p.shift(b).unwrap().shift(c).unwrap(), p.shift(b + c).unwrap());
    }

    #[test]
    fn thinning_distributes_over_shift(p in stable_params(), a in 0.0f64..=1.0, b in 0.0f64..5.0) {
        let lhs = p.shift(b).unwrap().thin(a).unwrap();
        let rhs = p.thin(a).unwrap().shift(a * b).unwrap();
        prop_assert!(near(&lhs, &rhs, 1e-12), "{lhs:?} vs {rhs:?}");
    }

    #[test]
    fn thinning_distributes_over_shift_on_log_branch(p in log_branch(), a in 0.0f64..=1.0, b in 0.0f64..5.0) {
        let lhs = p.shift(b).unwrap().thin(a).unwrap();
        let rhs = p.thin(a).unwrap().shift(a * b).unwrap();
        prop_assert!(near(&lhs, &rhs, 1e-12), "{lhs:?} vs {rhs:?}");
    }

    #[test]
    fn operators_preserve_validity(p in stable_params(), a in 0.0f64..=1.0, b in 0.0f64..5.0, n in 1u32..50) {
        prop_assert!(p.is_valid());
        prop_assert!(p.thin(a).unwrap().is_valid());
        prop_assert!(p.shift(b).unwrap().is_valid());
        prop_assert!(p.iid_sum(n).is_valid());
    }

    #[test]
    fn apgf_lies_in_unit_interval(p in stable_params(), t in 0.0f64..=1.0) {
        let psi = p.apgf(t).unwrap();
        prop_assert!(psi > 0.0 && psi <= 1.0, "psi({t}) = {psi}");
    }

    #[test]
    fn apgf_is_continuous_on_zero_two(p in stable_params(), t in 0.0f64..2.0) {
        let h = 1e-9;
        let (x, y) = (p.apgf(t).unwrap(), p.apgf((t + h).min(2.0)).unwrap());
        prop_assert!(x.is_finite() && y.is_finite());
        prop_assert!((x - y).abs() <= 1e-6 * x.max(y).max(1.0), "jump at {t}: {x} vs {y}");
    }

    #[test]
    fn compound_round_trip(lambda in 1e-3f64..10.0, theta in 0.0f64..0.999, alpha in prop_oneof![0.01f64..2.0, Just(1.0)]) {
        let c = CompoundParams::new(lambda, theta, alpha).unwrap();
        let back = c.to_stable().to_compound().unwrap();
        prop_assert!((back.lambda - lambda).abs() <= 1e-12 * lambda.max(1.0), "{back:?}");
        prop_assert!((back.theta - theta).abs() <= 1e-12, "{back:?}");
        prop_assert_eq!(back.alpha, alpha);
    }

    #[test]
    fn classification_survives_thinning(p in stable_params(), a in 1e-6f64..1.0) {
        prop_assert_eq!(classify(&p.thin(a).unwrap()), classify(&p));
    }

    #[test]
    fn strict_laws_stay_strict(alpha in 0.05f64..=1.0, gamma in 0.01f64..5.0, a in 1e-6f64..1.0) {
        let p = StableParams::new(alpha, 0.0, gamma);
        prop_assert_eq!(classify(&p.thin(a).unwrap()), classify(&p));
    }
}
