//! Problem and estimate types plus the index-selection helpers every
//! algorithm shares.
//!
//! Indices are 0-based throughout the code and in every file format.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

/// Columns of a dictionary must have unit l2 norm to within this tolerance.
pub const UNIT_NORM_TOL: f64 = 1e-10;

/// A noiseless sparse recovery instance `x = Q s` with target sparsity `kappa`.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    q: DMatrix<f64>,
    x: DVector<f64>,
    kappa: usize,
}

impl Problem {
    /// Validates dimensions (`N < L`, `kappa <= N`) and that every column of
    /// `q` has unit norm. Use [`normalize_columns`] first on raw dictionaries.
    pub fn new(q: DMatrix<f64>, x: DVector<f64>, kappa: usize) -> Result<Self> {
        let (n, l) = q.shape();
        if n == 0 || n >= l {
            return Err(Error::InvalidProblem(format!(
                "dictionary must be wide (N < L), got {n}x{l}"
            )));
        }
        if kappa > n {
            return Err(Error::InvalidProblem(format!(
                "sparsity {kappa} exceeds measurement count {n}"
            )));
        }
        check_len("measurement vector", n, x.len())?;
        if let Some((j, norm)) = q
            .column_iter()
            .map(|c| c.norm())
            .enumerate()
            .find(|(_, norm)| (norm - 1.0).abs() > UNIT_NORM_TOL)
        {
            return Err(Error::InvalidProblem(format!(
                "column {j} has norm {norm}, expected 1 (normalize the dictionary explicitly)"
            )));
        }
        Ok(Self { q, x, kappa })
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn x(&self) -> &DVector<f64> {
        &self.x
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    /// Number of measurements.
    pub fn n(&self) -> usize {
        self.q.nrows()
    }

    /// Number of atoms.
    pub fn l(&self) -> usize {
        self.q.ncols()
    }
}

/// Scales every column of `q` to unit l2 norm in place and returns the
/// original norms. Zero columns are left untouched.
pub fn normalize_columns(q: &mut DMatrix<f64>) -> Vec<f64> {
    q.column_iter_mut()
        .map(|mut col| {
            let norm = col.norm();
            if norm > 0.0 {
                col /= norm;
            }
            norm
        })
        .collect()
}

/// A sparse vector given by its support and the coefficients on it.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SparseEstimate {
    pub support: Vec<usize>,
    pub coeffs: Vec<f64>,
}

impl SparseEstimate {
    pub fn new(support: Vec<usize>, coeffs: Vec<f64>) -> Result<Self> {
        check_len("estimate coefficients", support.len(), coeffs.len())?;
        let mut seen = support.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidProblem("support contains duplicate indices".into()));
        }
        Ok(Self { support, coeffs })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Scatters the coefficients into a dense vector of length `l`.
    pub fn densify(&self, l: usize) -> Result<DVector<f64>> {
        let mut dense = DVector::zeros(l);
        for (&i, &c) in self.support.iter().zip(&self.coeffs) {
            if i >= l {
                return Err(Error::IndexOutOfRange { index: i, len: l });
            }
            dense[i] = c;
        }
        Ok(dense)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rank {
    Largest,
    Smallest,
}

/// Indices of the `m` largest (or smallest) magnitudes of `v`, best first.
/// Equal magnitudes are ordered by lower index.
pub fn top_indices(v: &[f64], m: usize, rank: Rank) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    let key = |i: &usize| v[*i].abs();
    match rank {
        Rank::Largest => idx.sort_by(|a, b| key(b).total_cmp(&key(a)).then(a.cmp(b))),
        Rank::Smallest => idx.sort_by(|a, b| key(a).total_cmp(&key(b)).then(a.cmp(b))),
    }
    idx.truncate(m.min(v.len()));
    idx
}

/// Index of the largest magnitude among `candidates`, lowest index on ties.
pub(crate) fn argmax_abs<I>(v: &[f64], candidates: I) -> Option<usize>
where
    I: IntoIterator<Item = usize>,
{
    let mut best: Option<(usize, f64)> = None;
    for i in candidates {
        let a = v[i].abs();
        match best {
            Some((bi, ba)) if a < ba || (a == ba && i > bi) => {}
            _ => best = Some((i, a)),
        }
    }
    best.map(|(i, _)| i)
}

/// Boolean membership mask of length `l` for `support`.
pub(crate) fn support_mask(support: &[usize], l: usize) -> Vec<bool> {
    let mut mask = vec![false; l];
    for &i in support {
        mask[i] = true;
    }
    mask
}

/// Submatrix formed by the given columns, in order.
pub(crate) fn select_columns(m: &DMatrix<f64>, cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), cols.len(), |r, c| m[(r, cols[c])])
}
