use serde::{Deserialize, Serialize};

use super::sampling::domain_samples;
use crate::error::{Error, Result};
use crate::geometry::{rho_ball_integral, Domain, RhoBall, SpherePoint};

/// Resolution used for the ball integrals behind `W_n` and doubling ratios.
pub const BALL_RESOLUTION: usize = 32;

/// Default smoothing scale `n_ref` of the boundary-power weight.
pub const DEFAULT_N_REF: f64 = 64.0;

/// Doubling weights: constants and smoothed powers of the boundary
/// distance, `W(x) = (b_x + 1/n_ref)^γ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DoublingWeight {
    Constant,
    BoundaryPower { gamma: f64, n_ref: f64 },
}

impl DoublingWeight {
    pub fn boundary_power(gamma: f64) -> Result<Self> {
        Self::boundary_power_with(gamma, DEFAULT_N_REF)
    }

    pub fn boundary_power_with(gamma: f64, n_ref: f64) -> Result<Self> {
        if !(0.0..=2.0).contains(&gamma) {
            return Err(Error::InvalidParameter(format!("weight exponent must lie in [0, 2], got {gamma}")));
        }
        if !(n_ref > 0.0 && n_ref.is_finite()) {
            return Err(Error::InvalidParameter(format!("smoothing scale must be positive, got {n_ref}")));
        }
        Ok(Self::BoundaryPower { gamma, n_ref })
    }

    /// Weight as a function of the boundary distance.
    pub fn of_boundary(&self, b: f64) -> f64 {
        match *self {
            Self::Constant => 1.0,
            Self::BoundaryPower { gamma, n_ref } => (b.max(0.0) + 1.0 / n_ref).powf(gamma),
        }
    }

    pub fn eval(&self, domain: &Domain, x: &SpherePoint) -> Result<f64> {
        match self {
            Self::Constant => Ok(1.0),
            _ => Ok(self.of_boundary(domain.boundary_distance(x)?)),
        }
    }

    /// Evaluation for points already known to lie in the domain.
    pub(crate) fn eval_inside(&self, domain: &Domain, x: &SpherePoint) -> f64 {
        match self {
            Self::Constant => 1.0,
            _ => {
                let (theta, _) = domain.frame().polar(x);
                self.of_boundary(domain.boundary_of_polar(theta))
            }
        }
    }
}

/// `W_n(x) = |B_ρ(x, 1/n)|⁻¹ ∫_{B_ρ(x, 1/n)} W dσ`.
pub fn compute_wn(domain: &Domain, weight: &DoublingWeight, n: usize, x: &SpherePoint) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("degree must be at least 1".into()));
    }
    let ball = RhoBall::new(*domain, *x, 1.0 / n as f64)?;
    let (num, den) = ball.integrals(|y| weight.eval_inside(domain, y), BALL_RESOLUTION)?;
    Ok(num / den)
}

/// `max W(B_ρ(x, 2r)) / W(B_ρ(x, r))` over `probes` quasi-random points and
/// radii `r = 2^{-k}`, `k = 1..=radii_levels`.
pub fn estimate_doubling(domain: &Domain, weight: &DoublingWeight, radii_levels: usize, probes: usize) -> Result<f64> {
    use rayon::prelude::*;
    if radii_levels < 3 {
        return Err(Error::InvalidParameter(format!("need at least 3 radius levels, got {radii_levels}")));
    }
    if probes == 0 {
        return Err(Error::InvalidParameter("need at least one probe".into()));
    }
    let points = domain_samples(domain, probes);
    let ratios: Vec<f64> = points
        .par_iter()
        .map(|x| -> Result<f64> {
            let mut worst: f64 = 0.0;
            for k in 1..=radii_levels {
                let r = 0.5f64.powi(k as i32);
                let g = |y: &SpherePoint| weight.eval_inside(domain, y);
                let big = rho_ball_integral(&RhoBall::new(*domain, *x, 2.0 * r)?, g, BALL_RESOLUTION)?;
                let small = rho_ball_integral(&RhoBall::new(*domain, *x, r)?, g, BALL_RESOLUTION)?;
                worst = worst.max(big / small);
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Cap;

    #[test]
    fn constant_weight_average_is_one() {
        let d: Domain = Cap::north(2, 0.5).unwrap().into();
        let x = SpherePoint::from_polar(2, 0.3, 1.0).unwrap();
        assert_eq!(compute_wn(&d, &DoublingWeight::Constant, 8, &x).unwrap(), 1.0);
    }

    #[test]
    fn boundary_power_average_near_centre() {
        let d: Domain = Cap::north(2, 0.5).unwrap().into();
        let w = DoublingWeight::boundary_power_with(1.0, 1e12).unwrap();
        let e = *d.center();
        let mut last = f64::INFINITY;
        for n in [8, 32, 128] {
            let v = compute_wn(&d, &w, n, &e).unwrap();
            let gap = (v - 0.5).abs();
            assert!(gap < last);
            last = gap;
        }
        assert!(last < 0.01);
    }

    #[test]
    fn average_lies_between_extremes() {
        let d: Domain = Cap::north(2, 0.5).unwrap().into();
        let w = DoublingWeight::boundary_power(1.0).unwrap();
        for (t, p) in [(0.1, 0.0), (0.45, 2.0), (0.5, 4.0)] {
            let x = SpherePoint::from_polar(2, t, p).unwrap();
            let v = compute_wn(&d, &w, 8, &x).unwrap();
            assert!(v >= w.of_boundary(0.0) && v <= w.of_boundary(0.5));
        }
    }

    #[test]
    fn doubling_constants_are_finite() {
        let d: Domain = Cap::north(2, 0.5).unwrap().into();
        let l0 = estimate_doubling(&d, &DoublingWeight::Constant, 3, 8).unwrap();
        let l1 = estimate_doubling(&d, &DoublingWeight::boundary_power(0.0).unwrap(), 3, 8).unwrap();
        assert!(l0.is_finite() && l0 >= 1.0);
        assert!((l0 - l1).abs() < 1e-12);
        let l = estimate_doubling(&d, &DoublingWeight::boundary_power(1.0).unwrap(), 3, 8).unwrap();
        assert!(l.is_finite() && l >= 1.0);
        assert!(estimate_doubling(&d, &DoublingWeight::Constant, 2, 8).is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(DoublingWeight::boundary_power(3.0).is_err());
        assert!(DoublingWeight::boundary_power_with(1.0, 0.0).is_err());
    }
}
