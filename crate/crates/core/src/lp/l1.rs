//! l1 minimization problems expressed as linear programs.

use nalgebra::{DMatrix, DVector};

use super::simplex::{lp_solve, lp_solve_from, LpProblem, LpStatus};
use crate::error::{Error, Result};
use crate::lift::{LiftedInstance, LiftedSystem};
use crate::model::{select_columns, top_indices, Problem, Rank, SparseEstimate};
use crate::numerics::least_squares;

/// Minimizer of an affine l1 objective and its value.
#[derive(Debug, Clone, PartialEq)]
pub struct L1Solution {
    pub z: DVector<f64>,
    pub value: f64,
}

/// `min_z ‖s0 + W̄ z‖₁`, encoded with an auxiliary bound vector `t`:
///
/// ```text
/// min [0; 1]ᵀ [z; t]   s.t.   [-W̄ -I; W̄ -I] [z; t] <= [s0; -s0]
/// ```
pub fn min_l1_affine(s0: &DVector<f64>, wbar: &DMatrix<f64>) -> Result<L1Solution> {
    let l = s0.len();
    let m = wbar.ncols();
    if wbar.nrows() != l {
        return Err(Error::DimensionMismatch {
            context: "affine l1 direction matrix rows",
            expected: l,
            actual: wbar.nrows(),
        });
    }
    if m == 0 {
        return Ok(L1Solution {
            z: DVector::zeros(0),
            value: s0.lp_norm(1),
        });
    }

    let mut c = DVector::zeros(m + l);
    c.rows_mut(m, l).fill(1.0);
    let mut a = DMatrix::zeros(2 * l, m + l);
    a.view_mut((0, 0), (l, m)).copy_from(&(-wbar));
    a.view_mut((l, 0), (l, m)).copy_from(wbar);
    for i in 0..l {
        a[(i, m + i)] = -1.0;
        a[(l + i, m + i)] = -1.0;
    }
    let mut b = DVector::zeros(2 * l);
    b.rows_mut(0, l).copy_from(s0);
    b.rows_mut(l, l).copy_from(&(-s0));

    let res = lp_solve(&LpProblem::new(c).with_ub(a, b));
    if res.status != LpStatus::Optimal {
        return Err(Error::Lp { status: res.status });
    }
    let z = res.y.rows(0, m).into_owned();
    let value = (s0 + wbar * &z).lp_norm(1);
    Ok(L1Solution { z, value })
}

/// Solution of the lifted l1 problem with unpenalized atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedL1 {
    /// The minimizing element of `{s0 + W z - Q̄(:,atoms) β}`.
    pub s: DVector<f64>,
    pub beta: DVector<f64>,
    pub value: f64,
    /// Simplex pivots used.
    pub iterations: usize,
    /// Optimal basis; a valid warm start after appending atoms.
    pub basis: Vec<usize>,
}

/// `min ‖s0 + W z - Q̄(:,atoms) β‖₁` over `(z, β)`, solved in reduced form.
///
/// An `s` belongs to `{s0 + W z - Q̄(:,atoms) β}` exactly when
/// `Qc s + Qc(:,atoms) β = xc`, so the problem is the `N`-row program
/// `min 1ᵀ(p + q)` subject to `Qc (p - q) + Qc(:,atoms) β = xc`,
/// `p, q >= 0`. The null-space coordinate is recovered as `z = Wᵀ s`.
pub fn min_l1_lifted(
    sys: &LiftedSystem,
    inst: &LiftedInstance,
    atoms: &[usize],
) -> Result<LiftedL1> {
    min_l1_lifted_from(sys, inst, atoms, None)
}

/// [`min_l1_lifted`] warm-started from the basis of an earlier solve whose
/// atoms are a prefix of `atoms`.
pub fn min_l1_lifted_from(
    sys: &LiftedSystem,
    inst: &LiftedInstance,
    atoms: &[usize],
    basis: Option<&[usize]>,
) -> Result<LiftedL1> {
    let (n, l) = (sys.n(), sys.l());
    let k = atoms.len();
    let vars = 2 * l + k;

    let mut c = DVector::zeros(vars);
    c.rows_mut(0, 2 * l).fill(1.0);
    let mut a = DMatrix::zeros(n, vars);
    a.view_mut((0, 0), (n, l)).copy_from(sys.qc());
    a.view_mut((0, l), (n, l)).copy_from(&(-sys.qc()));
    a.view_mut((0, 2 * l), (n, k)).copy_from(&select_columns(sys.qc(), atoms));

    let mut lower = vec![0.0; vars];
    lower[2 * l..].fill(f64::NEG_INFINITY);
    let upper = vec![f64::INFINITY; vars];

    let lp = LpProblem::new(c)
        .with_eq(a, inst.xc.clone())
        .with_bounds(lower, upper);
    let res = match basis {
        Some(b) => lp_solve_from(&lp, b),
        None => lp_solve(&lp),
    };
    if res.status != LpStatus::Optimal {
        return Err(Error::Lp { status: res.status });
    }
    let s = res.y.rows(0, l) - res.y.rows(l, l);
    let beta = res.y.rows(2 * l, k).into_owned();
    let value = s.lp_norm(1);
    Ok(LiftedL1 {
        s,
        beta,
        value,
        iterations: res.iterations,
        basis: res.basis,
    })
}

/// `argmin ‖s‖₁ s.t. Q s = x`, with `s = p - q` and the equality written as
/// a pair of inequalities.
pub fn bp_solution(q: &DMatrix<f64>, x: &DVector<f64>) -> Result<DVector<f64>> {
    let (n, l) = q.shape();
    let c = DVector::from_element(2 * l, 1.0);
    let mut a = DMatrix::zeros(2 * n, 2 * l);
    a.view_mut((0, 0), (n, l)).copy_from(q);
    a.view_mut((0, l), (n, l)).copy_from(&(-q));
    a.view_mut((n, 0), (n, l)).copy_from(&(-q));
    a.view_mut((n, l), (n, l)).copy_from(q);
    let mut b = DVector::zeros(2 * n);
    b.rows_mut(0, n).copy_from(x);
    b.rows_mut(n, n).copy_from(&(-x));

    let res = lp_solve(&LpProblem::new(c).with_ub(a, b).nonnegative());
    if res.status != LpStatus::Optimal {
        return Err(Error::Lp { status: res.status });
    }
    Ok(res.y.rows(0, l) - res.y.rows(l, l))
}

/// Classical basis pursuit: keep the `κ` largest entries of the l1
/// minimizer and refit them by least squares.
pub fn bp_classic(prob: &Problem) -> Result<SparseEstimate> {
    let kappa = prob.kappa();
    if kappa == 0 || prob.x().iter().all(|&v| v == 0.0) {
        return Ok(SparseEstimate::empty());
    }
    let s = bp_solution(prob.q(), prob.x())?;
    let support = top_indices(s.as_slice(), kappa, Rank::Largest);
    let fit = least_squares(&select_columns(prob.q(), &support), prob.x())?;
    SparseEstimate::new(support, fit.beta.iter().copied().collect())
}
