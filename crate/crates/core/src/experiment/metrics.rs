//! Success criteria for a recovered signal.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_len, Error, Result};
use crate::model::{top_indices, Rank, SparseEstimate};

/// Relative reconstruction error below which the SNR is reported as `+∞`.
pub const SNR_INFINITE_RATIO: f64 = 1e-15;
/// Default success threshold in dB.
pub const DEFAULT_SNR_THRESHOLD_DB: f64 = 40.0;

/// `10 log10(‖Q s*‖² / ‖Q (s* - ŝ)‖²)`, or `+∞` when the error is
/// negligible. Fails for a zero ground truth.
pub fn snr_db(q: &DMatrix<f64>, s_true: &DVector<f64>, s_hat: &DVector<f64>) -> Result<f64> {
    check_len("true signal", q.ncols(), s_true.len())?;
    check_len("estimate", q.ncols(), s_hat.len())?;
    if s_true.iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroSignal);
    }
    let signal = (q * s_true).norm();
    let error = (q * (s_true - s_hat)).norm();
    if error <= SNR_INFINITE_RATIO * signal {
        return Ok(f64::INFINITY);
    }
    Ok(20.0 * (signal / error).log10())
}

/// Whether the `κ` largest entries of the estimate sit exactly on the
/// support of `s_true`, with `κ = ‖s_true‖₀`.
pub fn support_detected(s_true: &DVector<f64>, est: &SparseEstimate) -> Result<bool> {
    let truth: Vec<usize> = (0..s_true.len()).filter(|&i| s_true[i] != 0.0).collect();
    let dense = est.densify(s_true.len())?;
    let mut top = top_indices(dense.as_slice(), truth.len(), Rank::Largest);
    top.sort_unstable();
    Ok(top == truth)
}

/// A recovery succeeds if it detects the support or exceeds the SNR
/// threshold.
pub fn judge(
    s_true: &DVector<f64>,
    est: &SparseEstimate,
    q: &DMatrix<f64>,
    threshold_db: f64,
) -> Result<bool> {
    if support_detected(s_true, est)? {
        return Ok(true);
    }
    let s_hat = est.densify(s_true.len())?;
    Ok(snr_db(q, s_true, &s_hat)? > threshold_db)
}
