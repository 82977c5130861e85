//! Orthogonal matching pursuit on the measurement system (`OMP_C`) and on
//! the lifted system `s0 = Q̄ s` (`OMP_HD`, `OMP_IHD`).
//!
//! The lifted variants differ only in how the next atom is picked from the
//! high-dimensional residual `s̃ = s0 - Q̄(:,I) β`:
//! `OMP_HD` maximizes the normalized correlation `|Q̄(:,i)ᵀ s̃| / ‖Q̄(:,i)‖`,
//! `OMP_IHD` takes the largest entry `|s̃(i)|`. Since `Q̄(:,i)ᵀ s̃ = s̃(i)`
//! for a projector, the first is `|s̃(i)| / ‖V1(i,:)‖`.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lift::{LiftedInstance, LiftedSystem};
use crate::model::{argmax_abs, select_columns, support_mask, Problem, SparseEstimate};
use crate::numerics::{coord_residual, fit_lifted, least_squares};

/// l2 residual below which every greedy method stops early.
pub const RESIDUAL_TOL: f64 = 1e-12;
/// Atoms whose lifted column is shorter than this cannot be normalized.
pub const MIN_ATOM_NORM: f64 = 1e-12;

/// Result of an iterative recovery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recovery {
    pub estimate: SparseEstimate,
    pub iterations: usize,
    /// Whether the residual break condition fired.
    pub converged: bool,
}

/// Snapshot after each iteration of a greedy method.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyState {
    pub support: Vec<usize>,
    pub beta: DVector<f64>,
    /// `x - Q(:,I) β` for `OMP_C`, `s0 - Q̄(:,I) β` for the lifted variants.
    pub residual: DVector<f64>,
    pub iteration: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LiftedRule {
    Correlation,
    Entry,
}

pub fn omp_c(prob: &Problem) -> Result<Recovery> {
    omp_c_observed(prob, &mut |_| {})
}

pub fn omp_c_observed(
    prob: &Problem,
    observe: &mut dyn FnMut(&GreedyState),
) -> Result<Recovery> {
    let (q, x) = (prob.q(), prob.x());
    let l = prob.l();
    let mut support = Vec::with_capacity(prob.kappa());
    let mut mask = vec![false; l];
    let mut beta = DVector::zeros(0);
    let mut residual = x.clone();

    for k in 0..prob.kappa() {
        if residual.norm() <= RESIDUAL_TOL {
            break;
        }
        let corr = q.tr_mul(&residual);
        let Some(i) = argmax_abs(corr.as_slice(), (0..l).filter(|&i| !mask[i])) else {
            break;
        };
        support.push(i);
        mask[i] = true;
        let qs = select_columns(q, &support);
        beta = least_squares(&qs, x)?.beta;
        residual = x - &qs * &beta;
        observe(&GreedyState {
            support: support.clone(),
            beta: beta.clone(),
            residual: residual.clone(),
            iteration: k + 1,
        });
    }

    let converged = residual.norm() <= RESIDUAL_TOL;
    Ok(Recovery {
        iterations: support.len(),
        estimate: SparseEstimate::new(support, beta.iter().copied().collect())?,
        converged,
    })
}

pub fn omp_hd(sys: &LiftedSystem, inst: &LiftedInstance, kappa: usize) -> Result<Recovery> {
    lifted_omp(sys, inst, kappa, LiftedRule::Correlation, &mut |_| {})
}

pub fn omp_hd_observed(
    sys: &LiftedSystem,
    inst: &LiftedInstance,
    kappa: usize,
    observe: &mut dyn FnMut(&GreedyState),
) -> Result<Recovery> {
    lifted_omp(sys, inst, kappa, LiftedRule::Correlation, observe)
}

pub fn omp_ihd(sys: &LiftedSystem, inst: &LiftedInstance, kappa: usize) -> Result<Recovery> {
    lifted_omp(sys, inst, kappa, LiftedRule::Entry, &mut |_| {})
}

pub fn omp_ihd_observed(
    sys: &LiftedSystem,
    inst: &LiftedInstance,
    kappa: usize,
    observe: &mut dyn FnMut(&GreedyState),
) -> Result<Recovery> {
    lifted_omp(sys, inst, kappa, LiftedRule::Entry, observe)
}

/// Normalized correlation `ξ(i) = s̃(i) / ‖Q̄(:,i)‖` of the lifted residual
/// with every atom; unnormalizable atoms score 0.
pub(crate) fn normalized_correlation(sys: &LiftedSystem, s_tilde: &DVector<f64>) -> Vec<f64> {
    s_tilde
        .iter()
        .zip(sys.qbar_col_norms().iter())
        .map(|(&s, &n)| if n > MIN_ATOM_NORM { s / n } else { 0.0 })
        .collect()
}

fn lifted_omp(
    sys: &LiftedSystem,
    inst: &LiftedInstance,
    kappa: usize,
    rule: LiftedRule,
    observe: &mut dyn FnMut(&GreedyState),
) -> Result<Recovery> {
    let l = sys.l();
    let norms = sys.qbar_col_norms();
    let mut support: Vec<usize> = Vec::with_capacity(kappa);
    let mut beta = DVector::zeros(0);
    let mut coord = inst.xc.clone();
    let mut s_tilde = inst.s0.clone();

    for k in 0..kappa {
        if coord.norm() <= RESIDUAL_TOL {
            break;
        }
        let mask = support_mask(&support, l);
        let candidates = (0..l).filter(|&i| !mask[i]);
        let pick = match rule {
            LiftedRule::Entry => argmax_abs(s_tilde.as_slice(), candidates),
            LiftedRule::Correlation => {
                let xi = normalized_correlation(sys, &s_tilde);
                argmax_abs(&xi, candidates.filter(|&i| norms[i] > MIN_ATOM_NORM))
            }
        };
        let Some(i) = pick else { break };
        support.push(i);
        beta = fit_lifted(sys, inst, &support)?.beta;
        coord = coord_residual(sys, inst, &support, &beta)?;
        s_tilde = sys.v1() * &coord;
        observe(&GreedyState {
            support: support.clone(),
            beta: beta.clone(),
            residual: s_tilde.clone(),
            iteration: k + 1,
        });
    }

    let converged = coord.norm() <= RESIDUAL_TOL;
    Ok(Recovery {
        iterations: support.len(),
        estimate: SparseEstimate::new(support, beta.iter().copied().collect())?,
        converged,
    })
}
