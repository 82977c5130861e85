//! Closed-form minimizer of the convex piecewise-linear `z ↦ ‖v0 + z v‖₁`.
//!
//! After flipping signs so every weight `v(k)` is positive, the objective
//! kinks at the breakpoints `z_k = -v0(k)/v(k)`. With breakpoints sorted
//! ascending, the slope on the left of `z_k` is `-α_k` where
//! `α_k = Σv - 2 Σ_{i<k} v(i)`. The minimizer is the breakpoint where `α`
//! changes sign: a weighted median.

/// Sorted breakpoint data for one objective.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseL1Instance {
    /// Nondecreasing.
    pub breakpoints: Vec<f64>,
    /// Strictly positive, aligned with `breakpoints`.
    pub weights: Vec<f64>,
    /// `α_1 ..= α_{K+1}`; strictly decreasing from `Σv` to `-Σv`.
    pub alphas: Vec<f64>,
    /// `Σ |v0(k)|` over the terms with zero weight.
    pub constant: f64,
}

impl PiecewiseL1Instance {
    pub fn new(v0: &[f64], v: &[f64]) -> Self {
        assert_eq!(v0.len(), v.len(), "v0 and v must have equal length");
        let mut constant = 0.0;
        let mut points: Vec<(f64, f64)> = Vec::with_capacity(v.len());
        for (&a, &w) in v0.iter().zip(v) {
            if w == 0.0 {
                constant += a.abs();
            } else {
                // |a + z w| = |(-a) + z (-w)|, so flipping keeps the term.
                let (a, w) = if w < 0.0 { (-a, -w) } else { (a, w) };
                points.push((-a / w, w));
            }
        }
        points.sort_by(|x, y| x.0.total_cmp(&y.0));

        let total: f64 = points.iter().map(|p| p.1).sum();
        let mut alphas = Vec::with_capacity(points.len() + 1);
        let mut alpha = total;
        alphas.push(alpha);
        for &(_, w) in &points {
            alpha -= 2.0 * w;
            alphas.push(alpha);
        }
        let (breakpoints, weights) = points.into_iter().unzip();
        Self {
            breakpoints,
            weights,
            alphas,
            constant,
        }
    }

    /// Smallest optimal breakpoint, or 0 when every weight is zero.
    pub fn minimizer(&self) -> f64 {
        if self.breakpoints.is_empty() {
            return 0.0;
        }
        // First k with α_{k+1} <= 0. Using the running weight instead of the
        // stored α avoids cancellation when α_{k+1} should be exactly 0.
        let half = 0.5 * self.alphas[0];
        let mut acc = 0.0;
        for (k, &w) in self.weights.iter().enumerate() {
            acc += w;
            if acc >= half {
                return self.breakpoints[k];
            }
        }
        *self.breakpoints.last().unwrap()
    }
}

/// Minimizes `‖v0 + z v‖₁` over real `z`. Returns `(z*, f(z*))`.
///
/// Weights may have any sign. Terms with `v(k) = 0` only add a constant; if
/// all weights vanish the result is `(0, ‖v0‖₁)`. When the minimum is flat
/// the smallest optimal breakpoint is returned.
pub fn scalar_l1_min(v0: &[f64], v: &[f64]) -> (f64, f64) {
    let zstar = PiecewiseL1Instance::new(v0, v).minimizer();
    (zstar, l1_line(v0, v, zstar))
}

/// `min_β ‖s - β q‖₁`.
///
/// Only the value is needed, and it is the same at every weighted median,
/// so the median is found by selection instead of a full sort.
pub fn atom_l1_score(s: &[f64], q: &[f64]) -> f64 {
    assert_eq!(s.len(), q.len(), "s and q must have equal length");
    // min_β ‖s - β q‖₁ = min_z ‖s + z q‖₁ with z = -β.
    let mut points: Vec<(f64, f64)> = s
        .iter()
        .zip(q)
        .filter(|(_, &w)| w != 0.0)
        .map(|(&a, &w)| (-a / w, w.abs()))
        .collect();
    if points.is_empty() {
        return s.iter().map(|a| a.abs()).sum();
    }
    let half = 0.5 * points.iter().map(|p| p.1).sum::<f64>();
    l1_line(s, q, weighted_median(&mut points, half))
}

/// A breakpoint where the cumulative weight in ascending order first
/// reaches `need`. Reorders `points`.
fn weighted_median(points: &mut [(f64, f64)], mut need: f64) -> f64 {
    let (mut lo, mut hi) = (0, points.len());
    loop {
        let part = &mut points[lo..hi];
        if part.len() == 1 {
            return part[0].0;
        }
        let mid = part.len() / 2;
        part.select_nth_unstable_by(mid, |x, y| x.0.total_cmp(&y.0));
        let left: f64 = part[..mid].iter().map(|p| p.1).sum();
        if left >= need {
            hi = lo + mid;
        } else if left + part[mid].1 >= need {
            return part[mid].0;
        } else {
            need -= left + part[mid].1;
            lo += mid + 1;
        }
    }
}

/// `‖v0 + z v‖₁`.
pub fn l1_line(v0: &[f64], v: &[f64], z: f64) -> f64 {
    v0.iter().zip(v).map(|(a, w)| (a + z * w).abs()).sum()
}
