//! Sparse recovery on the lifted high-dimensional system.
//!
//! A measurement `x = Q s` with `N < L` is lifted to `s0 = Q̄ s`, where `s0`
//! is the minimum-norm solution and `Q̄` the projector onto the row space of
//! `Q`. Greedy and l1-based methods then work on `L`-dimensional residuals.
//!
//! ```
//! use hdsparse::experiment::{gen_problem, CoeffDist};
//! use hdsparse::{lift, lift_instance, omp_hd};
//!
//! let (prob, truth) = gen_problem(16, 32, 3, 7, CoeffDist::Normal).unwrap();
//! let sys = lift(prob.q()).unwrap();
//! let inst = lift_instance(&sys, prob.x()).unwrap();
//! let rec = omp_hd(&sys, &inst, 3).unwrap();
//! let err = rec.estimate.densify(32).unwrap() - truth;
//! assert!(err.amax() < 1e-8);
//! ```

pub mod cosamp;
pub mod error;
pub mod experiment;
pub mod gbp;
pub mod greedy;
pub mod lift;
pub mod lp;
pub mod model;
pub mod numerics;
pub mod scalar_l1;

pub use nalgebra;

pub use cosamp::{alg_l2l1, cosamp_c, CosampState};
pub use error::{Error, Result};
pub use gbp::{alg_gbp, alg_gbp_with, GbpIteration, GbpOptions, GbpRun, GbpTrace, LpEncoding};
pub use greedy::{omp_c, omp_hd, omp_ihd, GreedyState, Recovery};
pub use lift::{lift, lift_instance, LiftedInstance, LiftedSystem};
pub use lp::{bp_classic, min_l1_affine, min_l1_lifted, lp_solve, LpProblem, LpResult, LpStatus};
pub use model::{normalize_columns, top_indices, Problem, Rank, SparseEstimate};
pub use numerics::{least_squares, residual_hd, LsSolution};
pub use scalar_l1::{atom_l1_score, scalar_l1_min};
