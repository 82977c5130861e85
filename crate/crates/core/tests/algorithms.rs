mod common;

use common::{planted, support_of, Case};
use hdsparse::cosamp::{alg_l2l1_with, SelectionRule};
use hdsparse::greedy::{omp_c_observed, omp_hd_observed, omp_ihd_observed};
use hdsparse::nalgebra::DVector;
use hdsparse::{
    alg_gbp, alg_gbp_with, alg_l2l1, bp_classic, cosamp_c, omp_c, omp_hd, omp_ihd, GbpOptions, GreedyState,
    LpEncoding, Recovery, SparseEstimate,
};

/// Stopping certificate: an exact fit on at most `2κ < N` atoms reproduces
/// `x`, and recovers the planted signal whenever it covers its support.
fn check_certificate(case: &Case, est: &SparseEstimate, kappa: usize, label: &str) {
    let l = case.prob.l();
    if est.len() > 2 * kappa || 2 * kappa >= case.prob.n() {
        return;
    }
    let dense = est.densify(l).unwrap();
    assert!((case.prob.q() * &dense - case.prob.x()).amax() <= 1e-8, "{label}: Q s ≠ x");
    if support_of(&case.truth).iter().all(|i| est.support.contains(i)) {
        assert!((&dense - &case.truth).amax() <= 1e-8, "{label}: not the planted signal");
    }
}

type Observed = fn(&Case, usize, &mut dyn FnMut(&GreedyState)) -> Recovery;

const GREEDY: [(&str, Observed); 3] = [
    ("omp_c", |c, _, f| omp_c_observed(&c.prob, f).unwrap()),
    ("omp_hd", |c, k, f| omp_hd_observed(&c.sys, &c.inst, k, f).unwrap()),
    ("omp_ihd", |c, k, f| omp_ihd_observed(&c.sys, &c.inst, k, f).unwrap()),
];

#[test]
fn greedy_residuals_are_monotone_and_certified() {
    for seed in 0..40u64 {
        let kappa = 2 + seed as usize % 6;
        let case = planted(24, 60, kappa, seed);
        for (label, run) in GREEDY {
            let mut norms = vec![];
            let rec = run(&case, kappa, &mut |st| norms.push(st.residual.norm()));
            assert!(norms.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{label} seed {seed}: {norms:?}");
            assert!(rec.estimate.len() <= kappa);
            if rec.converged && label != "omp_c" {
                check_certificate(&case, &rec.estimate, kappa, label);
            }
        }
    }
}

#[test]
fn lifted_omp_matches_exhaustive_single_atom_search() {
    for seed in 0..100u64 {
        let case = planted(16, 40, 1, seed);
        let qbar = case.sys.qbar();
        let s0 = &case.inst.s0;
        let best = (0..40)
            .map(|i| {
                let col = qbar.column(i);
                let beta = col.dot(s0) / col.norm_squared();
                ((s0 - col * beta).norm(), i)
            })
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .unwrap()
            .1;
        assert_eq!(omp_hd(&case.sys, &case.inst, 1).unwrap().estimate.support, vec![best], "seed {seed}");
        assert_eq!(omp_ihd(&case.sys, &case.inst, 1).unwrap().estimate.support, vec![best], "seed {seed}");
    }
}

#[test]
fn every_algorithm_recovers_one_atom() {
    for seed in 0..30u64 {
        let case = planted(12, 30, 1, seed);
        let truth = support_of(&case.truth);
        let runs = [
            omp_c(&case.prob).unwrap().estimate,
            bp_classic(&case.prob).unwrap(),
            omp_hd(&case.sys, &case.inst, 1).unwrap().estimate,
            omp_ihd(&case.sys, &case.inst, 1).unwrap().estimate,
            alg_gbp(&case.sys, &case.inst, 1).unwrap().recovery.estimate,
            alg_l2l1(&case.sys, &case.inst, 1, 1, None).unwrap().estimate,
            alg_l2l1(&case.sys, &case.inst, 1, 2, None).unwrap().estimate,
            cosamp_c(&case.prob).unwrap().estimate,
        ];
        for (k, est) in runs.iter().enumerate() {
            let dense = est.densify(30).unwrap();
            assert!((&dense - &case.truth).amax() <= 1e-8, "algorithm {k} seed {seed}: {:?} vs {truth:?}", est.support);
        }
    }
}

#[test]
fn gbp_objective_is_monotone_and_stays_in_solution_set() {
    for seed in 0..15u64 {
        let kappa = 3 + seed as usize % 5;
        let case = planted(20, 48, kappa, seed);
        let full = alg_gbp(&case.sys, &case.inst, kappa).unwrap();
        let values: Vec<f64> = std::iter::once(case.inst.s0.lp_norm(1))
            .chain(full.trace.iterations.iter().map(|it| it.l1_value))
            .collect();
        assert!(values.windows(2).all(|w| w[1] <= w[0] + 1e-9), "seed {seed}: {values:?}");

        // Stopping after k atoms replays the first k iterations.
        for k in 1..=full.trace.iterations.len() {
            let run = alg_gbp(&case.sys, &case.inst, k).unwrap();
            let est = &run.recovery.estimate;
            assert_eq!(est.support[..], full.trace.support[..k]);
            let beta = DVector::from_column_slice(&est.coeffs);
            let back = &run.residual + case.sys.qbar_columns(&est.support) * beta;
            assert!((case.prob.q() * back - case.prob.x()).amax() <= 1e-8, "seed {seed} k {k}");
            assert!((run.residual.lp_norm(1) - values[k]).abs() <= 1e-9);
        }
        if full.recovery.converged {
            check_certificate(&case, &full.recovery.estimate, kappa, "alg_gbp");
        }
    }
}

#[test]
fn gbp_encodings_and_warm_start_recover_the_same_signal() {
    for seed in 0..10u64 {
        let case = planted(16, 40, 4, seed);
        let mut dense = vec![];
        for encoding in [LpEncoding::Reduced, LpEncoding::Literal] {
            for warm_start in [false, true] {
                let run = alg_gbp_with(&case.sys, &case.inst, 4, GbpOptions { warm_start, encoding }).unwrap();
                if run.recovery.converged {
                    check_certificate(&case, &run.recovery.estimate, 4, "alg_gbp");
                }
                dense.push(run.recovery.estimate.densify(40).unwrap());
            }
        }
        // Only compare when the default run succeeds; the others then must too.
        if (&dense[0] - &case.truth).amax() <= 1e-8 {
            for d in &dense {
                assert!((d - &case.truth).amax() <= 1e-8, "seed {seed}");
            }
        }
    }
}

#[test]
fn l2l1_prunes_and_refits_exactly() {
    for seed in 0..30u64 {
        let kappa = 3 + seed as usize % 6;
        let case = planted(24, 60, kappa, seed);
        for lambda in [1usize, 2, 3] {
            let mut states = 0;
            let rec = alg_l2l1_with(&case.sys, &case.inst, kappa, lambda, None, SelectionRule::L1Score, &mut |st| {
                states += 1;
                assert!(st.support.len() <= kappa);
                let mut dedup = st.support.clone();
                dedup.sort_unstable();
                dedup.dedup();
                assert_eq!(dedup.len(), st.support.len());
                let cols = case.sys.qbar_columns(&st.support);
                let grad = cols.tr_mul(&st.residual);
                assert!(grad.amax() <= 1e-8 * cols.norm().max(1.0) * case.inst.s0.norm().max(1.0));
            })
            .unwrap();
            assert_eq!(states, rec.iterations);
            assert!(rec.iterations <= kappa);
            if rec.converged {
                check_certificate(&case, &rec.estimate, kappa, "alg_l2l1");
            }
        }
    }
}

#[test]
fn l2_selection_rule_reproduces_omp_hd() {
    for seed in 0..100u64 {
        let kappa = 1 + seed as usize % 8;
        let case = planted(20, 50, kappa, seed);
        let mut hd = vec![];
        omp_hd_observed(&case.sys, &case.inst, kappa, &mut |st| hd.push(st.support.clone())).unwrap();
        let mut cs = vec![];
        alg_l2l1_with(&case.sys, &case.inst, kappa, 1, None, SelectionRule::L2Correlation, &mut |st| {
            cs.push(st.support.clone())
        })
        .unwrap();
        assert_eq!(hd, cs, "seed {seed}");
    }
}

#[test]
fn cosamp_keeps_at_most_kappa_atoms() {
    for seed in 0..20u64 {
        let case = planted(20, 50, 4, seed);
        let rec = cosamp_c(&case.prob).unwrap();
        assert!(rec.estimate.len() <= 4);
        assert!(rec.iterations <= 4);
    }
}
