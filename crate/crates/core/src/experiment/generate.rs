//! Seeded test problems.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::rng::SampleRng;
use crate::error::{Error, Result};
use crate::model::{normalize_columns, Problem};

/// Distribution of the nonzero entries of the planted signal.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoeffDist {
    /// Standard normal.
    #[default]
    Normal,
    /// Uniform magnitude in `[0.5, 1.5]` with a random sign.
    Uniform,
}

/// An `n × l` matrix of independent standard normals with unit columns.
pub fn gaussian_dictionary(rng: &mut SampleRng, n: usize, l: usize) -> DMatrix<f64> {
    // Column-major fill, so each column is a contiguous run of the stream.
    let mut q = DMatrix::from_iterator(n, l, std::iter::repeat_with(|| rng.normal()).take(n * l));
    normalize_columns(&mut q);
    q
}

/// A problem `x = Q s` with a `kappa`-sparse planted `s`, deterministic in
/// `seed`. Draws `Q` first, then the signal from the same stream.
pub fn gen_problem(
    n: usize,
    l: usize,
    kappa: usize,
    seed: u64,
    dist: CoeffDist,
) -> Result<(Problem, DVector<f64>)> {
    check_dims(n, l, kappa)?;
    let mut rng = SampleRng::new(seed);
    let q = gaussian_dictionary(&mut rng, n, l);
    planted(q, kappa, &mut rng, dist)
}

/// A problem on a fixed dictionary with a signal drawn from `seed`.
pub fn gen_signal(
    q: &DMatrix<f64>,
    kappa: usize,
    seed: u64,
    dist: CoeffDist,
) -> Result<(Problem, DVector<f64>)> {
    check_dims(q.nrows(), q.ncols(), kappa)?;
    planted(q.clone(), kappa, &mut SampleRng::new(seed), dist)
}

fn check_dims(n: usize, l: usize, kappa: usize) -> Result<()> {
    if n == 0 || n >= l || kappa > n {
        return Err(Error::InvalidProblem(format!(
            "need kappa <= N < L with N >= 1, got kappa={kappa}, N={n}, L={l}"
        )));
    }
    Ok(())
}

fn planted(
    q: DMatrix<f64>,
    kappa: usize,
    rng: &mut SampleRng,
    dist: CoeffDist,
) -> Result<(Problem, DVector<f64>)> {
    let l = q.ncols();
    let mut s = DVector::zeros(l);
    for i in rng.subset(l, kappa) {
        s[i] = match dist {
            CoeffDist::Normal => loop {
                // An exact zero would shrink the support.
                let z = rng.normal();
                if z != 0.0 {
                    break z;
                }
            },
            CoeffDist::Uniform => {
                let mag = 0.5 + rng.uniform();
                if rng.uniform() < 0.5 {
                    -mag
                } else {
                    mag
                }
            }
        };
    }
    let x = &q * &s;
    Ok((Problem::new(q, x, kappa)?, s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn columns_are_unit_and_support_exact() {
        for seed in 0..20 {
            let (prob, s) = gen_problem(16, 40, 6, seed, CoeffDist::Normal).unwrap();
            for c in prob.q().column_iter() {
                assert!((c.norm() - 1.0).abs() <= 1e-10);
            }
            assert_eq!(s.iter().filter(|&&v| v != 0.0).count(), 6);
            assert!((prob.q() * &s - prob.x()).amax() < 1e-12);
        }
    }

    #[test]
    fn fixed_seed_is_bit_identical() {
        let (a, sa) = gen_problem(8, 20, 3, 99, CoeffDist::Uniform).unwrap();
        let (b, sb) = gen_problem(8, 20, 3, 99, CoeffDist::Uniform).unwrap();
        assert_eq!(a.q(), b.q());
        assert_eq!(a.x(), b.x());
        assert_eq!(sa, sb);
        for v in sa.iter().filter(|v| **v != 0.0) {
            assert!((0.5..1.5).contains(&v.abs()));
        }
    }

    #[test]
    fn invalid_dimensions() {
        assert!(gen_problem(10, 10, 2, 0, CoeffDist::Normal).is_err());
        assert!(gen_problem(4, 10, 5, 0, CoeffDist::Normal).is_err());
        assert!(gen_problem(0, 10, 0, 0, CoeffDist::Normal).is_err());
    }
}
