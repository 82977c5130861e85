//! SVD characterization of the solution set of `x = Q s`.
//!
//! With `Q = U [Σ 0] Vᵀ`, every solution is `s = s0 + W z` where
//! `s0 = V1 Σ⁻¹ Uᵀ x` is the minimum-norm solution and `W` spans the null
//! space. The greedy algorithms work with the lifted system `s0 = Q̄ s`,
//! `Q̄ = V1 V1ᵀ`, which is only ever touched through the factors
//! `V1`, `Wc = Σ⁻¹ Uᵀ` and `Qc = V1ᵀ`.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};

use crate::error::{check_len, Error, Result};

/// Relative threshold on the smallest singular value.
pub const RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct LiftedSystem {
    v1: DMatrix<f64>,
    wc: DMatrix<f64>,
    qc: DMatrix<f64>,
    sigma: DVector<f64>,
    /// `‖V1(i,:)‖₂`, which is also the norm of column `i` of `Q̄`.
    qbar_norms: DVector<f64>,
    w: OnceLock<DMatrix<f64>>,
}

impl LiftedSystem {
    /// Right singular vectors of the leading block, `L x N`.
    pub fn v1(&self) -> &DMatrix<f64> {
        &self.v1
    }

    /// `Σ⁻¹ Uᵀ`, `N x N`.
    pub fn wc(&self) -> &DMatrix<f64> {
        &self.wc
    }

    /// `V1ᵀ`, `N x L`.
    pub fn qc(&self) -> &DMatrix<f64> {
        &self.qc
    }

    /// Singular values, descending.
    pub fn sigma(&self) -> &DVector<f64> {
        &self.sigma
    }

    pub fn n(&self) -> usize {
        self.v1.ncols()
    }

    pub fn l(&self) -> usize {
        self.v1.nrows()
    }

    pub fn qbar_col_norms(&self) -> &DVector<f64> {
        &self.qbar_norms
    }

    /// Orthonormal null-space basis `W`, `L x (L-N)`. Built on first use,
    /// since only the literal LP encoding needs it.
    pub fn w(&self) -> &DMatrix<f64> {
        self.w.get_or_init(|| null_space_basis(&self.v1))
    }

    /// Column `i` of `Q̄`, computed as `V1 Qc(:,i)`.
    pub fn qbar_column(&self, i: usize) -> DVector<f64> {
        &self.v1 * self.qc.column(i)
    }

    /// Columns `cols` of `Q̄` as an `L x |cols|` matrix.
    pub fn qbar_columns(&self, cols: &[usize]) -> DMatrix<f64> {
        &self.v1 * crate::model::select_columns(&self.qc, cols)
    }

    /// The full `L x L` projector. Only for callers that need every column.
    pub fn qbar(&self) -> DMatrix<f64> {
        &self.v1 * &self.qc
    }
}

/// Minimum-norm solution `s0 = T0 x` and its coordinates `xc = Wc x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedInstance {
    pub s0: DVector<f64>,
    pub xc: DVector<f64>,
}

/// Factor a wide, full-row-rank dictionary.
pub fn lift(q: &DMatrix<f64>) -> Result<LiftedSystem> {
    let (n, l) = q.shape();
    if n == 0 || n >= l {
        return Err(Error::InvalidProblem(format!(
            "lift needs a wide matrix (N < L), got {n}x{l}"
        )));
    }
    let svd = q.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested Vᵀ");

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sigma = DVector::from_iterator(n, order.iter().map(|&k| svd.singular_values[k]));

    let largest = sigma[0];
    let smallest = sigma[n - 1];
    if !(smallest > RANK_TOL * largest) {
        return Err(Error::RankDeficient { smallest, largest });
    }

    let qc = DMatrix::from_fn(n, l, |r, c| v_t[(order[r], c)]);
    let v1 = qc.transpose();
    let wc = DMatrix::from_fn(n, n, |r, c| u[(c, order[r])] / sigma[r]);
    let qbar_norms = DVector::from_iterator(l, v1.row_iter().map(|row| row.norm()));

    Ok(LiftedSystem {
        v1,
        wc,
        qc,
        sigma,
        qbar_norms,
        w: OnceLock::new(),
    })
}

pub fn lift_instance(sys: &LiftedSystem, x: &DVector<f64>) -> Result<LiftedInstance> {
    check_len("measurement vector", sys.n(), x.len())?;
    let xc = &sys.wc * x;
    let s0 = &sys.v1 * &xc;
    Ok(LiftedInstance { s0, xc })
}

/// Completes the orthonormal columns of `v1` to a basis of `R^L` with a
/// Householder QR and returns the trailing `L - N` columns.
fn null_space_basis(v1: &DMatrix<f64>) -> DMatrix<f64> {
    let (l, n) = v1.shape();
    let qr = v1.clone().qr();
    let mut qt = DMatrix::<f64>::identity(l, l);
    qr.q_tr_mul(&mut qt);
    qt.rows(n, l - n).transpose()
}
