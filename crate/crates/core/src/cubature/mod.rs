//! Positive cubature weights on node sets.

mod nnls;
mod solver;

pub use nnls::{nnls, NnlsSolution};
pub use solver::{
    solve_weights, solve_with_backoff, verify_exactness, weight_sharpness, CubatureRule, SolveError, SolverMeta,
    DEFAULT_TOL, MIN_TOL, POSITIVITY_FLOOR,
};
