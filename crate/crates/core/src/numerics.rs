//! Dense least squares and the factored high-dimensional residual.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_len, Result};
use crate::lift::{LiftedInstance, LiftedSystem};
use crate::model::select_columns;

/// Relative threshold below which a pivot (or singular value) counts as zero.
pub const LS_RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct LsSolution {
    pub beta: DVector<f64>,
    pub residual_norm_sq: f64,
    pub rank: usize,
}

/// Minimizes `‖b - A β‖₂`, returning the minimum-norm minimizer when `A` is
/// rank deficient.
///
/// Full-column-rank systems are solved by Householder QR with column
/// pivoting. When a pivot falls below [`LS_RANK_TOL`] relative to the first
/// one, the solve is redone through the SVD pseudo-inverse.
pub fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<LsSolution> {
    let (n, m) = a.shape();
    check_len("least squares right-hand side", n, b.len())?;
    if m == 0 {
        return Ok(LsSolution {
            beta: DVector::zeros(0),
            residual_norm_sq: b.norm_squared(),
            rank: 0,
        });
    }

    let fast = if m <= n {
        pivoted_qr_solve(a, b).map(|beta| (beta, m))
    } else {
        min_norm_solve(a, b).map(|beta| (beta, n))
    };
    let (beta, rank) = fast.unwrap_or_else(|| svd_solve(a, b));
    let residual_norm_sq = (b - a * &beta).norm_squared();
    Ok(LsSolution {
        beta,
        residual_norm_sq,
        rank,
    })
}

/// Returns `None` if `a` is numerically rank deficient.
fn pivoted_qr_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let (n, m) = a.shape();
    if m > n {
        return None;
    }
    let mut r = a.clone();
    let mut qtb = b.clone();
    let mut perm: Vec<usize> = (0..m).collect();
    let mut first_pivot = 0.0;

    for k in 0..m {
        let (p, norm) = (k..m)
            .map(|j| (j, r.view((k, j), (n - k, 1)).norm()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if k == 0 {
            first_pivot = norm;
        }
        if !(norm > LS_RANK_TOL * first_pivot) || norm == 0.0 {
            return None;
        }
        if p != k {
            r.swap_columns(k, p);
            perm.swap(k, p);
        }

        // Householder reflector mapping r[k.., k] onto -sign(x0)·‖x‖·e1.
        let x0 = r[(k, k)];
        let alpha = if x0 >= 0.0 { -norm } else { norm };
        let mut v: DVector<f64> = r.column(k).rows(k, n - k).into_owned();
        v[0] -= alpha;
        let v_norm_sq = v.norm_squared();
        if v_norm_sq > 0.0 {
            for j in k..m {
                let mut col = r.column_mut(j);
                let mut col = col.rows_mut(k, n - k);
                let t = 2.0 * v.dot(&col) / v_norm_sq;
                col.axpy(-t, &v, 1.0);
            }
            let mut tail = qtb.rows_mut(k, n - k);
            let t = 2.0 * v.dot(&tail) / v_norm_sq;
            tail.axpy(-t, &v, 1.0);
        }
        r[(k, k)] = alpha;
    }

    let mut y = DVector::zeros(m);
    for i in (0..m).rev() {
        let mut acc = qtb[i];
        for j in i + 1..m {
            acc -= r[(i, j)] * y[j];
        }
        y[i] = acc / r[(i, i)];
    }
    let mut beta = DVector::zeros(m);
    for (j, &orig) in perm.iter().enumerate() {
        beta[orig] = y[j];
    }
    Some(beta)
}

/// Minimum-norm solution of a wide full-row-rank system through the QR
/// factorization `Aᵀ = Q R`, so `β = Q R⁻ᵀ b`. Returns `None` when a
/// diagonal entry of `R` is negligible.
fn min_norm_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let qr = a.transpose().qr();
    let r = qr.r();
    let diag = r.diagonal().abs();
    if diag.min() <= LS_RANK_TOL * diag.max() {
        return None;
    }
    let y = r.tr_solve_upper_triangular(b)?;
    Some(qr.q() * y)
}

fn svd_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, usize) {
    let svd = a.clone().svd(true, true);
    let largest = svd.singular_values.max();
    let eps = LS_RANK_TOL * largest;
    let rank = svd.singular_values.iter().filter(|&&s| s > eps).count();
    let beta = svd
        .solve(b, eps)
        .unwrap_or_else(|_| DVector::zeros(a.ncols()));
    (beta, rank)
}

/// Residual of the reduced system, `xc - Qc(:,support) β`, length `N`.
///
/// Its l2 norm equals that of the high-dimensional residual because `V1`
/// has orthonormal columns.
pub fn coord_residual(
    sys: &LiftedSystem,
    inst: &LiftedInstance,
    support: &[usize],
    beta: &DVector<f64>,
) -> Result<DVector<f64>> {
    check_len("coefficients", support.len(), beta.len())?;
    let mut r = inst.xc.clone();
    for (&i, &b) in support.iter().zip(beta.iter()) {
        r.axpy(-b, &sys.qc().column(i), 1.0);
    }
    Ok(r)
}

/// High-dimensional residual `s0 - Q̄(:,support) β`, evaluated in factored
/// form as `V1 (xc - Qc(:,support) β)`.
pub fn residual_hd(
    sys: &LiftedSystem,
    inst: &LiftedInstance,
    support: &[usize],
    beta: &DVector<f64>,
) -> Result<DVector<f64>> {
    Ok(sys.v1() * coord_residual(sys, inst, support, beta)?)
}

/// Least-squares coefficients of `xc` on `Qc(:,support)`, which equals the
/// fit of `s0` on `Q̄(:,support)`.
pub(crate) fn fit_lifted(
    sys: &LiftedSystem,
    inst: &LiftedInstance,
    support: &[usize],
) -> Result<LsSolution> {
    least_squares(&select_columns(sys.qc(), support), &inst.xc)
}
