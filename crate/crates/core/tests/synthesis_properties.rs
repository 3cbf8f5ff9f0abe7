use std::f64::consts::PI;

use proptest::prelude::*;

use selftest_core::bell::{local_bound, DeterministicStrategy};
use selftest_core::linalg::Matrix;
use selftest_core::synth::{r_matrix, synthesize, w_expectation, SynthesisFlag, SynthesisOptions, SynthesisStatus};
use selftest_core::PIBellExpression;

/// Value of a deterministic strategy computed straight from the outcomes.
fn strategy_value(b: &PIBellExpression, s: &DeterministicStrategy) -> f64 {
    b.expand()
        .float_terms()
        .iter()
        .map(|(settings, c)| {
            let prod: i32 = settings
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(p, &x)| i32::from(s.outcomes()[p][usize::from(x - 1)]))
                .product();
            c * f64::from(prod)
        })
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rotation_is_an_involution(phi in -2.0 * PI..2.0 * PI) {
        let r = r_matrix(phi);
        prop_assert!(r.mul(&r).max_abs_diff(&Matrix::identity(9)) < 1e-12);
    }

    #[test]
    fn local_bound_is_the_largest_strategy_value(c in prop::collection::vec(-3i64..=3, 9)) {
        let b = PIBellExpression::from_ints(3, &c).unwrap();
        let best = (0..64u64)
            .map(|i| strategy_value(&b, &DeterministicStrategy::from_index(3, i)))
            .fold(f64::NEG_INFINITY, f64::max);
        let lb = local_bound(&b.expand());
        prop_assert_eq!(lb.value.to_f64(), best);
        for s in &lb.maximizers {
            prop_assert_eq!(strategy_value(&b, s), best);
        }
    }

    #[test]
    fn feasible_syntheses_are_stationary(phi in 0.0..=(PI / 4.0)) {
        let r = synthesize(phi, SynthesisOptions::default()).unwrap();
        prop_assume!(r.status == SynthesisStatus::Feasible);
        let h = 1e-5;
        let (p1, p2) = (phi, phi - PI / 2.0);
        let f = |a: f64, b: f64| w_expectation(&r.b, a, b).unwrap();
        let d1 = (f(p1 + h, p2) - f(p1 - h, p2)) / (2.0 * h);
        let d2 = (f(p1, p2 + h) - f(p1, p2 - h)) / (2.0 * h);
        prop_assert!(d1.abs() <= 1e-6 && d2.abs() <= 1e-6, "phi {phi}: {d1:e} {d2:e}");
        prop_assert!((f(p1, p2) - r.q).abs() < 1e-9);
    }

    #[test]
    fn synthesized_inequalities_have_unit_local_bound(phi in 0.0..=(PI / 4.0)) {
        let r = synthesize(phi, SynthesisOptions::default()).unwrap();
        prop_assume!(r.status == SynthesisStatus::Feasible);
        prop_assert!((r.local_bound - 1.0).abs() < 1e-9);
        prop_assert!(r.q_over_l() >= 1.0 - 1e-9);
        if r.q_over_l() <= 1.0 + 1e-9 {
            prop_assert!(r.flags.contains(&SynthesisFlag::NoViolation));
        }
    }
}
