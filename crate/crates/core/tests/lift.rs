mod common;

use common::{dictionary, normal_vector, planted};
use hdsparse::experiment::SampleRng;
use hdsparse::nalgebra::DVector;
use hdsparse::numerics::coord_residual;
use hdsparse::{least_squares, lift, lift_instance, residual_hd};

#[test]
fn projector_is_idempotent() {
    for (n, l) in [(4, 9), (32, 64), (128, 256)] {
        let sys = lift(&dictionary(n, l, n as u64)).unwrap();
        let qbar = sys.qbar();
        assert!((&qbar * &qbar - &qbar).amax() <= 1e-9, "{n}x{l}");
        assert!((&qbar - qbar.transpose()).amax() <= 1e-12);
    }
}

#[test]
fn solution_set_is_consistent_and_s0_has_minimum_norm() {
    let mut rng = SampleRng::new(9);
    let case = planted(20, 50, 5, 4);
    let w = case.sys.w();
    assert_eq!(w.ncols(), 30);
    let s0_norm = case.inst.s0.norm();
    assert!((case.prob.q() * &case.inst.s0 - case.prob.x()).amax() <= 1e-8);
    for _ in 0..100 {
        let z = normal_vector(w.ncols(), &mut rng);
        let s = &case.inst.s0 + w * &z;
        assert!((case.prob.q() * &s - case.prob.x()).amax() <= 1e-8);
        assert!(s0_norm < s.norm());
    }
    // s0 is Q̄ applied to any solution, in particular the planted one.
    assert!((case.sys.qbar() * &case.truth - &case.inst.s0).amax() <= 1e-10);
}

#[test]
fn repeated_lifts_agree() {
    let q = dictionary(16, 40, 3);
    let x = normal_vector(16, &mut SampleRng::new(1));
    let (a, b) = (lift(&q).unwrap(), lift(&q).unwrap());
    assert!((a.qbar() - b.qbar()).amax() <= 1e-12);
    let (ia, ib) = (lift_instance(&a, &x).unwrap(), lift_instance(&b, &x).unwrap());
    assert!((ia.s0 - ib.s0).amax() <= 1e-12);
}

#[test]
fn factored_residual_matches_direct_form() {
    for seed in 0..100u64 {
        let case = planted(12, 30, 4, seed);
        let mut rng = SampleRng::new(seed + 1000);
        let support = rng.subset(30, 1 + (seed as usize % 8));
        let beta = normal_vector(support.len(), &mut rng);
        let factored = residual_hd(&case.sys, &case.inst, &support, &beta).unwrap();
        let direct = &case.inst.s0 - case.sys.qbar_columns(&support) * &beta;
        assert!((&factored - &direct).amax() <= 1e-10, "seed {seed}");
        let coords = coord_residual(&case.sys, &case.inst, &support, &beta).unwrap();
        assert!((coords.norm() - direct.norm()).abs() <= 1e-10);
    }
}

#[test]
fn least_squares_normal_equations() {
    let mut rng = SampleRng::new(77);
    for trial in 0..50 {
        let (n, m) = (5 + trial % 20, 1 + trial % 9);
        let a = hdsparse::nalgebra::DMatrix::from_fn(n, m, |_, _| rng.normal());
        let b: DVector<f64> = normal_vector(n, &mut rng);
        let sol = least_squares(&a, &b).unwrap();
        let grad = a.transpose() * (&b - &a * &sol.beta);
        assert!(grad.amax() <= 1e-8 * a.norm() * b.norm(), "trial {trial}");
    }
}
