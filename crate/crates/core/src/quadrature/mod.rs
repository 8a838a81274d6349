//! Reference quadrature on caps, collars and the whole sphere.

mod gauss;
mod moments;
mod rule;

pub use gauss::{gauss_legendre, integrate_interval, GaussLegendre};
pub use moments::{cap_moments, domain_moments};
pub use rule::{
    build_rule, integrate, integrate_adaptive, AdaptiveIntegrator, ProductRule, RuleDomain, ADAPTIVE_LADDER, MAX_DEGREE,
};
