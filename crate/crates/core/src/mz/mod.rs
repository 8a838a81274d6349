//! Empirical verification of sampling inequalities for spherical
//! polynomials on caps and collars.

mod bernstein;
mod checks;
mod dilation;
mod integrals;
mod report;
mod sampling;
mod weight;

pub use bernstein::{bernstein_check_d1, bernstein_ratio, BernsteinEstimate, BERNSTEIN_TOL};
pub use checks::{
    large_sieve_constant, maxmin_equivalence, mz_bracket, mz_bracket_with, osc_constant, weighted_mz,
    weighted_rule_degree, MaxMinEstimate, OscEstimate, SieveEstimate, WeightedMzEstimate, DEFAULT_BALL_SAMPLES,
};
pub use dilation::{change_of_variables_check, dilation_projection_residual};
pub use integrals::{power_integrals, DEGENERATE_INTEGRAL, EVEN_POWER_TOL, KINK_POWER_TOL};
pub use report::{Bracket, CellParams, CellStats, VerificationReport};
pub use weight::{compute_wn, estimate_doubling, DoublingWeight, BALL_RESOLUTION, DEFAULT_N_REF};
