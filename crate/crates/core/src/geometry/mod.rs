//! Points on `S^d`, caps and collars, the boundary-adapted metric `ρ` and
//! its equivalents, metric balls and their volumes, and the polar dilation.

mod ball;
mod dilation;
mod domain;
mod interval;
mod point;

pub(crate) use ball::BallWindow;
pub use ball::{rho_ball_integral, rho_ball_volume, RhoBall, BALL_TOL};
pub use dilation::{map_t, map_t_global, poly_d, DILATION};
pub(crate) use domain::Site;
pub use domain::{geodesic_distance, Cap, Collar, Domain, DomainSpec, DOMAIN_TOL, MAX_RADIUS};
pub use interval::{rho1, rho2, rho3, rho3_parameter, rho4, rho5};
pub(crate) use point::check_dim;
pub use point::{Frame, SpherePoint};
