use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::point::{angle3, check_dim, chord2, Frame, SpherePoint};
use crate::error::{Error, Result};

/// Largest admissible cap radius; caps must stay away from the full sphere.
pub const MAX_RADIUS: f64 = PI - 0.1;

/// Slack allowed when testing membership of a point in a domain.
pub const DOMAIN_TOL: f64 = 1e-10;

pub fn geodesic_distance(x: &SpherePoint, y: &SpherePoint) -> Result<f64> {
    x.same_dim(y)?;
    Ok(angle3(x.array(), y.array()))
}

/// The spherical cap `B(e, α)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cap {
    center: SpherePoint,
    alpha: f64,
    frame: Frame,
}

impl Cap {
    pub fn new(center: SpherePoint, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= MAX_RADIUS) {
            return Err(Error::InvalidCapRadius(alpha));
        }
        Ok(Self { center, alpha, frame: Frame::new(&center) })
    }

    /// Cap of radius `alpha` about the north pole of `S^dim`.
    pub fn north(dim: usize, alpha: f64) -> Result<Self> {
        Self::new(SpherePoint::north_pole(dim)?, alpha)
    }

    pub fn center(&self) -> &SpherePoint {
        &self.center
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// `|B(e, α)|`: `2α` on the circle, `2π(1 − cos α)` on the 2-sphere.
    pub fn measure(&self) -> f64 {
        match self.dim() {
            1 => 2.0 * self.alpha,
            _ => 2.0 * PI * (1.0 - self.alpha.cos()),
        }
    }

    fn polar_angle(&self, x: &SpherePoint) -> Result<f64> {
        x.same_dim(&self.center)?;
        Ok(angle3(x.array(), self.center.array()))
    }

    pub fn contains(&self, x: &SpherePoint) -> bool {
        matches!(self.polar_angle(x), Ok(t) if t <= self.alpha + DOMAIN_TOL)
    }

    /// `b_x = α − d(x, e)`, clamped at zero.
    pub fn boundary_distance(&self, x: &SpherePoint) -> Result<f64> {
        let t = self.polar_angle(x)?;
        if t > self.alpha + DOMAIN_TOL {
            return Err(Error::OutsideDomain { polar_angle: t });
        }
        Ok((self.alpha - t).max(0.0))
    }

    /// The boundary-adapted metric
    /// `ρ(x, y) = α⁻¹ √(d(x, y)² + α (√b_x − √b_y)²)`.
    pub fn rho(&self, x: &SpherePoint, y: &SpherePoint) -> Result<f64> {
        let bx = self.boundary_distance(x)?;
        let by = self.boundary_distance(y)?;
        let d = angle3(x.array(), y.array());
        let s = bx.sqrt() - by.sqrt();
        Ok((d * d + self.alpha * s * s).sqrt() / self.alpha)
    }

    /// `Δ_r(x) = α^d (r^{d+1} + r^d √(1 − d(x, e)/α))`.
    pub fn delta_r(&self, x: &SpherePoint, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::InvalidParameter(format!("ball radius must be positive, got {r}")));
        }
        let b = self.boundary_distance(x)?;
        Ok(delta_formula(self.dim(), self.alpha, b, r))
    }
}

pub(crate) fn delta_formula(dim: usize, alpha: f64, b: f64, r: f64) -> f64 {
    let d = dim as i32;
    alpha.powi(d) * (r.powi(d + 1) + r.powi(d) * (b / alpha).max(0.0).sqrt())
}

/// The spherical collar `B(e; α, β) = {x : α ≤ d(x, e) ≤ β}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Collar {
    center: SpherePoint,
    alpha: f64,
    beta: f64,
    frame: Frame,
}

impl Collar {
    pub fn new(center: SpherePoint, alpha: f64, beta: f64) -> Result<Self> {
        let bad = |reason| Err(Error::InvalidCollar { alpha, beta, reason });
        if !(alpha > 0.0 && alpha < beta && beta < MAX_RADIUS) {
            return bad("need 0 < alpha < beta < pi - 0.1");
        }
        let h = beta - alpha;
        if alpha > 4.0 * h || h > 4.0 * alpha {
            return bad("alpha and beta - alpha must be within a factor 4 of each other");
        }
        Ok(Self { center, alpha, beta, frame: Frame::new(&center) })
    }

    pub fn north(dim: usize, alpha: f64, beta: f64) -> Result<Self> {
        Self::new(SpherePoint::north_pole(dim)?, alpha, beta)
    }

    pub fn center(&self) -> &SpherePoint {
        &self.center
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn measure(&self) -> f64 {
        match self.dim() {
            1 => 2.0 * (self.beta - self.alpha),
            _ => 2.0 * PI * (self.alpha.cos() - self.beta.cos()),
        }
    }

    fn polar_angle(&self, x: &SpherePoint) -> Result<f64> {
        x.same_dim(&self.center)?;
        Ok(angle3(x.array(), self.center.array()))
    }

    pub fn contains(&self, x: &SpherePoint) -> bool {
        matches!(self.polar_angle(x),
            Ok(t) if t >= self.alpha - DOMAIN_TOL && t <= self.beta + DOMAIN_TOL)
    }

    /// `b_x = min{|d(x, e) − α|, |d(x, e) − β|}`.
    pub fn boundary_distance(&self, x: &SpherePoint) -> Result<f64> {
        let t = self.polar_angle(x)?;
        if t < self.alpha - DOMAIN_TOL || t > self.beta + DOMAIN_TOL {
            return Err(Error::OutsideDomain { polar_angle: t });
        }
        Ok(((t - self.alpha).min(self.beta - t)).max(0.0))
    }

    /// `α⁻¹ √(|x − y|² + α (√b_x − √b_y)²)` with the chordal distance `|x − y|`.
    pub fn rho(&self, x: &SpherePoint, y: &SpherePoint) -> Result<f64> {
        let bx = self.boundary_distance(x)?;
        let by = self.boundary_distance(y)?;
        let s = bx.sqrt() - by.sqrt();
        Ok((chord2(x.array(), y.array()) + self.alpha * s * s).sqrt() / self.alpha)
    }

    /// `ρ₆(x, y) = max{|ξ − η|, ρ_[α,β](θ, t)}`.
    pub fn rho6(&self, x: &SpherePoint, y: &SpherePoint) -> Result<f64> {
        self.boundary_distance(x)?;
        self.boundary_distance(y)?;
        let (tx, _) = self.frame.polar(x);
        let (ty, _) = self.frame.polar(y);
        let xi = self.frame.perpendicular(x);
        let eta = self.frame.perpendicular(y);
        let bx = (tx - self.alpha).min(self.beta - tx).max(0.0);
        let by = (ty - self.alpha).min(self.beta - ty).max(0.0);
        let s = bx.sqrt() - by.sqrt();
        let radial = ((tx - ty).powi(2) + self.alpha * s * s).sqrt() / self.alpha;
        Ok(chord2(&xi, &eta).sqrt().max(radial))
    }

    /// Collar analogue of `Δ_r(x)`: `α^d (r^{d+1} + r^d √(b_x/α))`.
    pub fn delta_r(&self, x: &SpherePoint, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::InvalidParameter(format!("ball radius must be positive, got {r}")));
        }
        let b = self.boundary_distance(x)?;
        Ok(delta_formula(self.dim(), self.alpha, b, r))
    }
}

/// Either a cap or a collar: the geometric domain of every construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Domain {
    Cap(Cap),
    Collar(Collar),
}

/// Serializable description of a [`Domain`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub center: SpherePoint,
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

/// A point prepared for repeated metric evaluation.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Site {
    pub c: [f64; 3],
    pub sqrt_b: f64,
}

impl From<Cap> for Domain {
    fn from(c: Cap) -> Self {
        Domain::Cap(c)
    }
}

impl From<Collar> for Domain {
    fn from(c: Collar) -> Self {
        Domain::Collar(c)
    }
}

impl Domain {
    pub fn from_spec(spec: &DomainSpec) -> Result<Self> {
        check_dim(spec.center.dim())?;
        match spec.beta {
            None => Cap::new(spec.center, spec.alpha).map(Domain::Cap),
            Some(beta) => Collar::new(spec.center, spec.alpha, beta).map(Domain::Collar),
        }
    }

    pub fn spec(&self) -> DomainSpec {
        match self {
            Domain::Cap(c) => DomainSpec { center: c.center, alpha: c.alpha, beta: None },
            Domain::Collar(c) => DomainSpec { center: c.center, alpha: c.alpha, beta: Some(c.beta) },
        }
    }

    pub fn dim(&self) -> usize {
        self.center().dim()
    }

    pub fn center(&self) -> &SpherePoint {
        match self {
            Domain::Cap(c) => &c.center,
            Domain::Collar(c) => &c.center,
        }
    }

    pub fn frame(&self) -> &Frame {
        match self {
            Domain::Cap(c) => &c.frame,
            Domain::Collar(c) => &c.frame,
        }
    }

    /// The metric scale `α` (the `1/α` prefactor of the metric).
    pub fn alpha(&self) -> f64 {
        match self {
            Domain::Cap(c) => c.alpha,
            Domain::Collar(c) => c.alpha,
        }
    }

    /// Range of polar angles `[θ_lo, θ_hi]` about the centre.
    pub fn polar_range(&self) -> (f64, f64) {
        match self {
            Domain::Cap(c) => (0.0, c.alpha),
            Domain::Collar(c) => (c.alpha, c.beta),
        }
    }

    pub fn measure(&self) -> f64 {
        match self {
            Domain::Cap(c) => c.measure(),
            Domain::Collar(c) => c.measure(),
        }
    }

    pub fn contains(&self, x: &SpherePoint) -> bool {
        match self {
            Domain::Cap(c) => c.contains(x),
            Domain::Collar(c) => c.contains(x),
        }
    }

    pub fn boundary_distance(&self, x: &SpherePoint) -> Result<f64> {
        match self {
            Domain::Cap(c) => c.boundary_distance(x),
            Domain::Collar(c) => c.boundary_distance(x),
        }
    }

    /// Boundary distance of a polar angle, without range checks.
    pub(crate) fn boundary_of_polar(&self, theta: f64) -> f64 {
        match self {
            Domain::Cap(c) => (c.alpha - theta).max(0.0),
            Domain::Collar(c) => (theta - c.alpha).min(c.beta - theta).max(0.0),
        }
    }

    /// The domain metric: `ρ` on caps, the chordal collar metric on collars.
    pub fn metric(&self, x: &SpherePoint, y: &SpherePoint) -> Result<f64> {
        match self {
            Domain::Cap(c) => c.rho(x, y),
            Domain::Collar(c) => c.rho(x, y),
        }
    }

    pub fn delta_r(&self, x: &SpherePoint, r: f64) -> Result<f64> {
        match self {
            Domain::Cap(c) => c.delta_r(x, r),
            Domain::Collar(c) => c.delta_r(x, r),
        }
    }

    /// Upper bound on the chordal distance `|x − y|` over pairs at metric
    /// distance at most `r`. Both metrics dominate `|x − y|/α`.
    pub(crate) fn chord_bound(&self, r: f64) -> f64 {
        self.alpha() * r
    }

    pub(crate) fn site(&self, x: &SpherePoint) -> Result<Site> {
        Ok(Site { c: *x.array(), sqrt_b: self.boundary_distance(x)?.sqrt() })
    }

    /// Site for a point known to lie in the domain (boundary distance clamped).
    pub(crate) fn site_unchecked(&self, x: &SpherePoint) -> Site {
        let t = angle3(x.array(), self.center().array());
        Site { c: *x.array(), sqrt_b: self.boundary_of_polar(t).sqrt() }
    }

    #[inline]
    pub(crate) fn site_metric(&self, a: &Site, b: &Site) -> f64 {
        let s = a.sqrt_b - b.sqrt_b;
        match self {
            Domain::Cap(c) => {
                let d = angle3(&a.c, &b.c);
                (d * d + c.alpha * s * s).sqrt() / c.alpha
            }
            Domain::Collar(c) => (chord2(&a.c, &b.c) + c.alpha * s * s).sqrt() / c.alpha,
        }
    }
}
