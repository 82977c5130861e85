use hdsparse::scalar_l1::l1_line;
use hdsparse::{atom_l1_score, scalar_l1_min};
use proptest::prelude::*;

fn breakpoint_oracle(v0: &[f64], v: &[f64]) -> f64 {
    let mut best = l1_line(v0, v, 0.0);
    for (a, w) in v0.iter().zip(v) {
        if *w != 0.0 {
            best = best.min(l1_line(v0, v, -a / w));
        }
    }
    best
}

fn terms() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    prop::collection::vec((-10.0..10.0f64, prop_oneof![1 => Just(0.0), 4 => -5.0..5.0f64]), 1..=50)
        .prop_map(|t| t.into_iter().unzip())
}

proptest! {
    #[test]
    fn matches_breakpoint_enumeration((v0, v) in terms()) {
        let (z, f) = scalar_l1_min(&v0, &v);
        prop_assert!((f - breakpoint_oracle(&v0, &v)).abs() <= 1e-9);
        prop_assert_eq!(f, l1_line(&v0, &v, z));
    }

    #[test]
    fn minimum_is_local((v0, v) in terms()) {
        let (z, f) = scalar_l1_min(&v0, &v);
        prop_assert!(f <= l1_line(&v0, &v, z + 1e-3) + 1e-12);
        prop_assert!(f <= l1_line(&v0, &v, z - 1e-3) + 1e-12);
    }

    #[test]
    fn joint_sign_flip_changes_nothing((v0, v) in terms(), signs in prop::collection::vec(any::<bool>(), 50)) {
        let d: Vec<f64> = signs.iter().take(v.len()).map(|&b| if b { -1.0 } else { 1.0 }).collect();
        let v0d: Vec<f64> = v0.iter().zip(&d).map(|(a, s)| a * s).collect();
        let vd: Vec<f64> = v.iter().zip(&d).map(|(a, s)| a * s).collect();
        prop_assert_eq!(scalar_l1_min(&v0, &v), scalar_l1_min(&v0d, &vd));
    }

    #[test]
    fn common_breakpoint_is_exact(
        z_true in -100i32..100,
        v in prop::collection::vec(prop_oneof![-32i32..-1, 1..32i32], 1..30),
    ) {
        // Dyadic data keeps -z·w and its quotient by w exact.
        let z_true = z_true as f64 / 8.0;
        let v: Vec<f64> = v.into_iter().map(|w| w as f64 / 8.0).collect();
        let v0: Vec<f64> = v.iter().map(|w| -z_true * w).collect();
        let (z, f) = scalar_l1_min(&v0, &v);
        prop_assert_eq!(z, z_true);
        prop_assert_eq!(f, 0.0);
    }

    #[test]
    fn common_breakpoint_within_rounding(
        z_true in -10.0..10.0f64,
        v in prop::collection::vec(prop_oneof![-4.0..-0.25f64, 0.25..4.0f64], 1..30),
    ) {
        let v0: Vec<f64> = v.iter().map(|w| -z_true * w).collect();
        let (z, _) = scalar_l1_min(&v0, &v);
        prop_assert!((z - z_true).abs() <= 4.0 * f64::EPSILON * z_true.abs().max(1.0));
    }

    #[test]
    fn atom_score_is_nonnegative_and_optimal((s, q) in terms()) {
        let score = atom_l1_score(&s, &q);
        prop_assert!(score >= 0.0);
        let neg: Vec<f64> = q.iter().map(|w| -w).collect();
        prop_assert!((score - breakpoint_oracle(&s, &neg)).abs() <= 1e-9);
    }

    #[test]
    fn atom_score_vanishes_only_on_multiples(
        q in prop::collection::vec(prop_oneof![-2.0..-0.1f64, 0.1..2.0f64], 2..30),
        beta in -5.0..5.0f64,
        bump in 0.01..1.0f64,
    ) {
        let s: Vec<f64> = q.iter().map(|w| beta * w).collect();
        prop_assert!(atom_l1_score(&s, &q) <= 1e-9);
        // Moving one entry off the line leaves at least the smaller of the
        // two one-sided gaps.
        let mut off = s.clone();
        off[0] += bump;
        prop_assert!(atom_l1_score(&off, &q) > 1e-9);
    }
}
