//! Greedy basis pursuit (`Alg_GBP`).
//!
//! Each iteration adds the largest-magnitude entry of the current residual
//! `s` to the support `I` and re-minimizes `‖s0 + W z - Q̄(:,I) β‖₁` over
//! the null-space coordinate `z` and the coefficients `β`. The residual is
//! the minimizer; the loop stops early once its l1 norm vanishes.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::greedy::Recovery;
use crate::lift::{LiftedInstance, LiftedSystem};
use crate::lp::{min_l1_affine, min_l1_lifted, min_l1_lifted_from, LpStatus};
use crate::model::{argmax_abs, support_mask, SparseEstimate};

/// l1 residual below which the loop stops.
pub const L1_BREAK_TOL: f64 = 1e-12;

/// Which linear program is solved per iteration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpEncoding {
    /// `N` equality rows over `s = p - q` and `β`; see [`min_l1_lifted`].
    #[default]
    Reduced,
    /// `2L` inequality rows over `[z; β; t]` with `W̄ = [W, -Q̄(:,I)]`;
    /// see [`min_l1_affine`].
    Literal,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GbpOptions {
    /// Start from the basis pursuit minimizer instead of `s0`.
    pub warm_start: bool,
    pub encoding: LpEncoding,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbpIteration {
    pub iteration: usize,
    pub index: usize,
    pub l1_value: f64,
    pub lp_status: LpStatus,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GbpTrace {
    pub iterations: Vec<GbpIteration>,
    pub support: Vec<usize>,
    pub beta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GbpRun {
    pub recovery: Recovery,
    pub trace: GbpTrace,
    /// Final residual `s = s0 + W z - Q̄(:,I) β`.
    pub residual: DVector<f64>,
}

pub fn alg_gbp(sys: &LiftedSystem, inst: &LiftedInstance, kappa: usize) -> Result<GbpRun> {
    alg_gbp_with(sys, inst, kappa, GbpOptions::default())
}

pub fn alg_gbp_with(
    sys: &LiftedSystem,
    inst: &LiftedInstance,
    kappa: usize,
    opts: GbpOptions,
) -> Result<GbpRun> {
    let l = sys.l();
    let mut basis: Option<Vec<usize>> = None;
    let mut s = if opts.warm_start {
        let sol = min_l1_lifted(sys, inst, &[])?;
        basis = Some(sol.basis);
        sol.s
    } else {
        inst.s0.clone()
    };
    let mut support: Vec<usize> = Vec::with_capacity(kappa);
    let mut beta = DVector::zeros(0);
    let mut trace = GbpTrace::default();
    let mut converged = false;

    for k in 0..kappa {
        let mask = support_mask(&support, l);
        let Some(i) = argmax_abs(s.as_slice(), (0..l).filter(|&i| !mask[i])) else {
            break;
        };
        support.push(i);
        (s, beta) = match opts.encoding {
            LpEncoding::Reduced => {
                // The previous optimum stays feasible when an atom is added.
                let sol = min_l1_lifted_from(sys, inst, &support, basis.as_deref())?;
                basis = Some(sol.basis);
                (sol.s, sol.beta)
            }
            LpEncoding::Literal => literal_step(sys, inst, &support)?,
        };
        let l1_value = s.lp_norm(1);
        trace.iterations.push(GbpIteration {
            iteration: k + 1,
            index: i,
            l1_value,
            lp_status: LpStatus::Optimal,
        });
        if l1_value <= L1_BREAK_TOL {
            converged = true;
            break;
        }
    }

    trace.support = support.clone();
    trace.beta = beta.iter().copied().collect();
    let iterations = trace.iterations.len();
    Ok(GbpRun {
        recovery: Recovery {
            estimate: SparseEstimate::new(support, trace.beta.clone())?,
            iterations,
            converged,
        },
        trace,
        residual: s,
    })
}

/// One iteration with `W̄ = [W, -Q̄(:,I)]`; the coefficients are the trailing
/// `|I|` entries of the minimizer.
fn literal_step(
    sys: &LiftedSystem,
    inst: &LiftedInstance,
    support: &[usize],
) -> Result<(DVector<f64>, DVector<f64>)> {
    let w = sys.w();
    let (l, null_dim) = w.shape();
    let k = support.len();
    let mut wbar = DMatrix::zeros(l, null_dim + k);
    wbar.view_mut((0, 0), (l, null_dim)).copy_from(w);
    wbar.view_mut((0, null_dim), (l, k))
        .copy_from(&(-sys.qbar_columns(support)));
    let sol = min_l1_affine(&inst.s0, &wbar)?;
    let s = &inst.s0 + &wbar * &sol.z;
    let beta = sol.z.rows(null_dim, k).into_owned();
    Ok((s, beta))
}
