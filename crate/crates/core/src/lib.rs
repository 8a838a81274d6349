//! Positive cubature rules and Marcinkiewicz–Zygmund sampling sets on
//! spherical caps and collars of the circle (`d = 1`) and the 2-sphere
//! (`d = 2`).
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: points, caps, collars, the boundary-adapted metric and
//!   its equivalents, ball volumes, and the polar dilation map.
//! * [`point_sets`]: separable and maximal separable node sets.
//! * [`poly_space`]: orthonormal bases of spherical polynomials.
//! * [`quadrature`]: reference product rules and analytic cap moments.
//! * [`cubature`]: positive, exact cubature weights on a node set.
//! * [`mz`]: empirical measurement of the norm-equivalence constants.

pub mod cubature;
pub mod error;
pub mod geometry;
pub mod mz;
pub mod point_sets;
pub mod poly_space;
pub mod quadrature;
pub mod rng;

pub use error::{Error, Result};
pub use geometry::{Cap, Collar, Domain, RhoBall, SpherePoint};
