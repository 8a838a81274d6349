use std::f64::consts::PI;

use super::domain::{Domain, Site};
use super::point::SpherePoint;
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

/// Slack in ball-membership tests.
pub const BALL_TOL: f64 = 1e-12;

/// Largest per-axis order used when integrating over a metric ball.
const MAX_BALL_ORDER_2D: usize = 1024;
const MAX_BALL_ORDER_1D: usize = 1 << 16;

/// `B_ρ(x, r) = {y ∈ domain : ρ(y, x) ≤ r}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RhoBall {
    domain: Domain,
    center: SpherePoint,
    radius: f64,
}

impl RhoBall {
    pub fn new(domain: Domain, center: SpherePoint, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!("ball radius must be positive, got {radius}")));
        }
        domain.boundary_distance(&center)?;
        Ok(Self { domain, center, radius })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn center(&self) -> &SpherePoint {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn contains(&self, y: &SpherePoint) -> bool {
        if y.dim() != self.center.dim() || !self.domain.contains(y) {
            return false;
        }
        matches!(self.domain.metric(&self.center, y), Ok(r) if r <= self.radius + BALL_TOL)
    }

    /// Product-grid window in the domain's polar coordinates that contains
    /// the ball.
    pub(crate) fn window(&self) -> BallWindow {
        let dom = &self.domain;
        let alpha = dom.alpha();
        let r = self.radius;
        let frame = dom.frame();
        let (lo, hi) = dom.polar_range();
        let (tc, phic) = frame.polar(&self.center);
        let reach = match dom {
            Domain::Cap(_) => (alpha * r).min(PI),
            Domain::Collar(_) => 2.0 * (alpha * r / 2.0).min(1.0).asin(),
        };
        if dom.dim() == 1 {
            let sc = frame.signed_angle(&self.center);
            let a = (sc - reach).max(-hi);
            let b = (sc + reach).min(hi);
            return BallWindow::Arc { lo: a, hi: b };
        }
        let mut t_lo = (tc - reach).max(lo);
        let mut t_hi = (tc + reach).min(hi);
        if let Domain::Cap(_) = dom {
            let sb = dom.boundary_of_polar(tc).sqrt();
            let w = r * alpha.sqrt();
            let b_lo = (sb - w).max(0.0).powi(2);
            let b_hi = (sb + w).powi(2);
            t_lo = t_lo.max(alpha - b_hi);
            t_hi = t_hi.min(alpha - b_lo);
        }
        let full = BallWindow::Patch { t_lo, t_hi, phi_lo: 0.0, phi_width: 2.0 * PI };
        if tc - reach <= 0.0 || t_lo <= 0.0 {
            return full;
        }
        let hav_d = (reach / 2.0).sin().powi(2);
        let min_sin = t_lo.sin().min(t_hi.sin());
        let bound = hav_d / (tc.sin() * min_sin);
        if !(bound < 1.0) {
            return full;
        }
        let dphi = 2.0 * bound.sqrt().asin();
        BallWindow::Patch { t_lo, t_hi, phi_lo: phic - dphi, phi_width: 2.0 * dphi }
    }

    /// `(∫_B g dσ, |B|)` using a product rule of the given per-axis order on
    /// the ball's window.
    fn integrals_at<G: Fn(&SpherePoint) -> f64>(&self, window: &BallWindow, order: usize, g: &G) -> (f64, f64) {
        let dom = &self.domain;
        let frame = dom.frame();
        let cs = dom.site_unchecked(&self.center);
        let limit = self.radius + BALL_TOL;
        let inside = |theta: f64, p: &SpherePoint| -> bool {
            let s = Site { c: *p.array(), sqrt_b: dom.boundary_of_polar(theta).sqrt() };
            dom.site_metric(&cs, &s) <= limit
        };
        let (lo, hi) = dom.polar_range();
        let (mut num, mut den) = (0.0, 0.0);
        match *window {
            BallWindow::Arc { lo: a, hi: b } => {
                if b <= a {
                    return (0.0, 0.0);
                }
                let gl = gauss_legendre(order);
                let (x, w) = (&gl.nodes, &gl.weights);
                let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
                for (xi, wi) in x.iter().zip(w.iter()) {
                    let s = m + h * xi;
                    let theta = s.abs();
                    if theta < lo || theta > hi {
                        continue;
                    }
                    let p = frame.to_global(&SpherePoint::from_angle(s));
                    if inside(theta, &p) {
                        let wt = wi * h;
                        num += wt * g(&p);
                        den += wt;
                    }
                }
            }
            BallWindow::Patch { t_lo, t_hi, phi_lo, phi_width } => {
                if t_hi <= t_lo {
                    return (0.0, 0.0);
                }
                let gl = gauss_legendre(order);
                let (x, w) = (&gl.nodes, &gl.weights);
                let (c_lo, c_hi) = (t_hi.cos(), t_lo.cos());
                let (m, h) = (0.5 * (c_lo + c_hi), 0.5 * (c_hi - c_lo));
                let dphi = phi_width / order as f64;
                for (xi, wi) in x.iter().zip(w.iter()) {
                    let theta = (m + h * xi).clamp(-1.0, 1.0).acos();
                    let wt = wi * h * dphi;
                    for k in 0..order {
                        let phi = phi_lo + (k as f64 + 0.5) * dphi;
                        let p = frame.from_polar(theta, phi);
                        if inside(theta, &p) {
                            num += wt * g(&p);
                            den += wt;
                        }
                    }
                }
            }
        }
        (num, den)
    }

    /// `(∫_B g dσ, |B|)` by order doubling from `resolution` until two
    /// successive estimates of both agree to 1%.
    pub fn integrals<G: Fn(&SpherePoint) -> f64>(&self, g: G, resolution: usize) -> Result<(f64, f64)> {
        if resolution < 32 {
            return Err(Error::InvalidParameter(format!("ball resolution must be at least 32, got {resolution}")));
        }
        let window = self.window();
        let cap = if self.domain.dim() == 1 { MAX_BALL_ORDER_1D } else { MAX_BALL_ORDER_2D };
        let mut order = resolution;
        let mut prev = self.integrals_at(&window, order, &g);
        while order < cap {
            order *= 2;
            let cur = self.integrals_at(&window, order, &g);
            let close = |a: f64, b: f64| (a - b).abs() <= 0.01 * b.abs();
            if cur.1 > 0.0 && close(prev.1, cur.1) && close(prev.0, cur.0) {
                return Ok(cur);
            }
            prev = cur;
        }
        Ok(prev)
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) enum BallWindow {
    Arc { lo: f64, hi: f64 },
    Patch { t_lo: f64, t_hi: f64, phi_lo: f64, phi_width: f64 },
}

/// `|B_ρ(x, r)|`, by an indicator product rule refined until successive
/// estimates agree to 1%.
pub fn rho_ball_volume(ball: &RhoBall, resolution: usize) -> Result<f64> {
    Ok(ball.integrals(|_| 1.0, resolution)?.1)
}

/// `∫_{B_ρ(x, r)} g dσ`.
pub fn rho_ball_integral<G: Fn(&SpherePoint) -> f64>(ball: &RhoBall, g: G, resolution: usize) -> Result<f64> {
    Ok(ball.integrals(g, resolution)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Cap, Collar};

    #[test]
    fn center_in_outside_out() {
        let cap = Cap::north(2, 1.0).unwrap();
        let e = *cap.center();
        let ball = RhoBall::new(cap.into(), e, 0.1).unwrap();
        assert!(ball.contains(&e));
        let out = SpherePoint::from_polar(2, 1.2, 0.0).unwrap();
        assert!(!ball.contains(&out));
        assert!(RhoBall::new(cap.into(), out, 0.1).is_err());
        assert!(RhoBall::new(cap.into(), e, 0.0).is_err());
    }

    #[test]
    fn whole_cap_volume() {
        for &alpha in &[0.3, 1.0, 2.0] {
            let cap = Cap::north(2, alpha).unwrap();
            let ball = RhoBall::new(cap.into(), *cap.center(), 2.0).unwrap();
            let v = rho_ball_volume(&ball, 32).unwrap();
            let area = cap.measure();
            assert!((v - area).abs() < 1e-10 * area, "alpha {alpha}: {v} vs {area}");
        }
        let arc = Cap::north(1, 0.7).unwrap();
        let ball = RhoBall::new(arc.into(), *arc.center(), 2.0).unwrap();
        assert!((rho_ball_volume(&ball, 32).unwrap() - 1.4).abs() < 1e-10);
    }

    #[test]
    fn volume_shrinks_with_radius() {
        let cap = Cap::north(2, 1.0).unwrap();
        let x = SpherePoint::from_polar(2, 0.8, 0.4).unwrap();
        let mut last = f64::INFINITY;
        for k in 0..8 {
            let r = 0.5 / 2f64.powi(k);
            let v = rho_ball_volume(&RhoBall::new(cap.into(), x, r).unwrap(), 32).unwrap();
            assert!(v > 0.0 && v < last, "r {r}: {v} after {last}");
            last = v;
        }
        assert!(last < 1e-4);
    }

    #[test]
    fn window_covers_ball() {
        // Every probe inside the ball must fall inside the window.
        let cap = Cap::north(2, 0.5).unwrap();
        let c = SpherePoint::from_polar(2, 0.45, 1.0).unwrap();
        let ball = RhoBall::new(cap.into(), c, 0.2).unwrap();
        let BallWindow::Patch { t_lo, t_hi, phi_lo, phi_width } = ball.window() else { panic!() };
        for i in 0..=200 {
            for j in 0..400 {
                let th = 0.5 * i as f64 / 200.0;
                let ph = 2.0 * PI * j as f64 / 400.0;
                let y = SpherePoint::from_polar(2, th, ph).unwrap();
                if ball.contains(&y) {
                    assert!(th >= t_lo - 1e-12 && th <= t_hi + 1e-12);
                    let rel = (ph - phi_lo).rem_euclid(2.0 * PI);
                    assert!(rel <= phi_width + 1e-12 || phi_width >= 2.0 * PI);
                }
            }
        }
    }

    #[test]
    fn collar_ball_volume_is_bounded_by_collar() {
        let collar = Collar::north(2, 0.5, 1.0).unwrap();
        let x = SpherePoint::from_polar(2, 0.75, 0.0).unwrap();
        let v = rho_ball_volume(&RhoBall::new(collar.into(), x, 5.0).unwrap(), 32).unwrap();
        assert!((v - collar.measure()).abs() < 1e-9);
    }
}
