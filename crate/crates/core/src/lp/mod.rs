//! Linear programming and the l1 problems built on it.

mod l1;
mod simplex;

pub use l1::{bp_classic, bp_solution, min_l1_affine, min_l1_lifted, min_l1_lifted_from, L1Solution, LiftedL1};
pub use simplex::{lp_solve, lp_solve_from, LpProblem, LpResult, LpStatus, OPT_TOL, PIVOT_TOL, PRIMAL_TOL};
