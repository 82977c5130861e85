//! CoSaMP on the measurement system (`CoSaMP_C`) and the CoSaMP-type
//! lifted method `Alg^(λ)_{l2/l1}`.
//!
//! The lifted method grows the support by the `λ` atoms whose best
//! one-dimensional l1 fit to the high-dimensional residual is smallest,
//! then prunes back to `κ` by least squares.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::greedy::{normalized_correlation, Recovery, MIN_ATOM_NORM, RESIDUAL_TOL};
use crate::lift::{LiftedInstance, LiftedSystem};
use crate::model::{select_columns, support_mask, top_indices, Problem, Rank, SparseEstimate};
use crate::numerics::{fit_lifted, least_squares, residual_hd};
use crate::scalar_l1::atom_l1_score;

/// l1 residual below which `Alg^(λ)` stops.
pub const L1_BREAK_TOL: f64 = 1e-12;

/// How `Alg^(λ)` scores candidate atoms.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SelectionRule {
    /// Smallest `min_β ‖s - β Q̄(:,i)‖₁`.
    #[default]
    L1Score,
    /// Largest normalized correlation, as in `OMP_HD`.
    L2Correlation,
}

/// State after each `Alg^(λ)` iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct CosampState {
    pub support: Vec<usize>,
    /// Candidates that were merged into the support this iteration.
    pub candidates: Vec<usize>,
    pub beta: DVector<f64>,
    /// High-dimensional residual `V1 (xc - Qc(:,I) β)`.
    pub residual: DVector<f64>,
    pub iteration: usize,
}

pub fn cosamp_c(prob: &Problem) -> Result<Recovery> {
    let (q, x) = (prob.q(), prob.x());
    let kappa = prob.kappa();
    let mut support: Vec<usize> = Vec::new();
    let mut beta = DVector::zeros(0);
    let mut residual = x.clone();
    let mut iterations = 0;

    while iterations < kappa && residual.norm() > RESIDUAL_TOL {
        iterations += 1;
        let proxy = q.tr_mul(&residual);
        let mut merged = support.clone();
        let mask = support_mask(&support, prob.l());
        merged.extend(
            top_indices(proxy.as_slice(), 2 * kappa, Rank::Largest)
                .into_iter()
                .filter(|&i| !mask[i]),
        );
        let wide = least_squares(&select_columns(q, &merged), x)?.beta;
        support = prune(&merged, wide.as_slice(), kappa);
        let qs = select_columns(q, &support);
        beta = least_squares(&qs, x)?.beta;
        residual = x - &qs * &beta;
    }

    Ok(Recovery {
        estimate: SparseEstimate::new(support, beta.iter().copied().collect())?,
        iterations,
        converged: residual.norm() <= RESIDUAL_TOL,
    })
}

/// `Alg^(λ)_{l2/l1}` with at most `n_ite` iterations (default `κ`).
pub fn alg_l2l1(
    sys: &LiftedSystem,
    inst: &LiftedInstance,
    kappa: usize,
    lambda: usize,
    n_ite: Option<usize>,
) -> Result<Recovery> {
    alg_l2l1_with(sys, inst, kappa, lambda, n_ite, SelectionRule::L1Score, &mut |_| {})
}

#[doc(hidden)]
pub fn alg_l2l1_with(
    sys: &LiftedSystem,
    inst: &LiftedInstance,
    kappa: usize,
    lambda: usize,
    n_ite: Option<usize>,
    rule: SelectionRule,
    observe: &mut dyn FnMut(&CosampState),
) -> Result<Recovery> {
    if lambda == 0 {
        return Err(Error::InvalidProblem("lambda must be at least 1".into()));
    }
    let l = sys.l();
    let n_ite = n_ite.unwrap_or(kappa);
    if kappa == 0 || n_ite == 0 {
        return Ok(Recovery { estimate: SparseEstimate::empty(), iterations: 0, converged: false });
    }
    let qbar = match rule {
        SelectionRule::L1Score => Some(sys.qbar()),
        SelectionRule::L2Correlation => None,
    };
    let select = |s: &DVector<f64>, support: &[usize]| -> Vec<usize> {
        let mask = support_mask(support, l);
        match &qbar {
            Some(qbar) => {
                let mut scored: Vec<(f64, usize)> = (0..l)
                    .filter(|&i| !mask[i])
                    .map(|i| (atom_l1_score(s.as_slice(), qbar.column(i).as_slice()), i))
                    .collect();
                scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                scored.into_iter().take(lambda).map(|(_, i)| i).collect()
            }
            None => {
                let norms = sys.qbar_col_norms();
                let xi = normalized_correlation(sys, s);
                let mut scored: Vec<(f64, usize)> = (0..l)
                    .filter(|&i| !mask[i] && norms[i] > MIN_ATOM_NORM)
                    .map(|i| (xi[i].abs(), i))
                    .collect();
                scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
                scored.into_iter().take(lambda).map(|(_, i)| i).collect()
            }
        }
    };

    let mut support: Vec<usize> = Vec::new();
    let mut candidates = match rule {
        SelectionRule::L1Score => top_indices(inst.s0.as_slice(), lambda, Rank::Largest),
        SelectionRule::L2Correlation => select(&inst.s0, &[]),
    };
    let mut best: Option<(f64, Vec<usize>, DVector<f64>)> = None;
    let mut iterations = 0;

    while iterations < n_ite {
        iterations += 1;
        let mut merged = support.clone();
        let mask = support_mask(&support, l);
        merged.extend(candidates.iter().copied().filter(|&i| !mask[i]));
        let wide = fit_lifted(sys, inst, &merged)?.beta;
        support = prune(&merged, wide.as_slice(), kappa);
        let beta = fit_lifted(sys, inst, &support)?.beta;
        let s = residual_hd(sys, inst, &support, &beta)?;
        let l1 = s.lp_norm(1);
        observe(&CosampState {
            support: support.clone(),
            candidates: candidates.clone(),
            beta: beta.clone(),
            residual: s.clone(),
            iteration: iterations,
        });
        if l1 <= L1_BREAK_TOL {
            return Ok(Recovery {
                estimate: SparseEstimate::new(support, beta.iter().copied().collect())?,
                iterations,
                converged: true,
            });
        }
        if best.as_ref().is_none_or(|(b, _, _)| l1 < *b) {
            best = Some((l1, support.clone(), beta));
        }
        candidates = select(&s, &support);
        if candidates.is_empty() {
            break;
        }
    }

    let (_, support, beta) = best.expect("at least one iteration ran");
    Ok(Recovery {
        estimate: SparseEstimate::new(support, beta.iter().copied().collect())?,
        iterations,
        converged: false,
    })
}

/// Entries of `merged` at the `κ` largest `|coeffs|`, in their original order.
fn prune(merged: &[usize], coeffs: &[f64], kappa: usize) -> Vec<usize> {
    let mut keep = top_indices(coeffs, kappa, Rank::Largest);
    keep.sort_unstable();
    keep.into_iter().map(|p| merged[p]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greedy::omp_hd_observed;
    use crate::lift::{lift, lift_instance};
    use crate::experiment::{gaussian_dictionary, SampleRng};
    use nalgebra::DMatrix;

    fn dictionary(n: usize, l: usize, salt: usize) -> DMatrix<f64> {
        gaussian_dictionary(&mut SampleRng::new(salt as u64 + 500), n, l)
    }

    #[test]
    fn single_atom() {
        let q = dictionary(8, 16, 0);
        let x = q.column(7) * 2.0;
        let prob = Problem::new(q.clone(), x.clone(), 1).unwrap();
        let rec = cosamp_c(&prob).unwrap();
        assert_eq!(rec.estimate.support, vec![7]);

        let sys = lift(&q).unwrap();
        let inst = lift_instance(&sys, &x).unwrap();
        let rec = alg_l2l1(&sys, &inst, 1, 1, None).unwrap();
        assert_eq!(rec.estimate.support, vec![7]);
        assert_eq!(rec.iterations, 1);
        assert!(rec.converged);
    }

    #[test]
    fn prune_keeps_merge_order() {
        assert_eq!(prune(&[9, 2, 5, 1], &[0.1, -3.0, 2.0, 0.5], 2), vec![2, 5]);
        assert_eq!(prune(&[9, 2], &[0.1, -3.0], 5), vec![9, 2]);
    }

    #[test]
    fn lambda_zero_rejected() {
        let q = dictionary(4, 8, 1);
        let sys = lift(&q).unwrap();
        let inst = lift_instance(&sys, &DVector::zeros(4)).unwrap();
        assert!(alg_l2l1(&sys, &inst, 1, 0, None).is_err());
    }

    #[test]
    fn correlation_mode_matches_omp_hd() {
        for salt in 0..10 {
            let q = dictionary(12, 30, salt);
            let mut s = DVector::zeros(30);
            for (j, &i) in [1usize, 8, 17, 25].iter().enumerate() {
                s[(i + salt) % 30] = 1.0 + j as f64 * 0.3 * if j % 2 == 0 { 1.0 } else { -1.0 };
            }
            let x = &q * &s;
            let sys = lift(&q).unwrap();
            let inst = lift_instance(&sys, &x).unwrap();
            let mut hd = Vec::new();
            omp_hd_observed(&sys, &inst, 4, &mut |st| hd.push(st.support.clone())).unwrap();
            let mut cs = Vec::new();
            alg_l2l1_with(&sys, &inst, 4, 1, None, SelectionRule::L2Correlation, &mut |st| {
                cs.push(st.support.clone())
            })
            .unwrap();
            assert_eq!(hd, cs);
        }
    }
}
