use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::DVector;

use super::gauss::gauss_legendre;
use crate::error::{Error, Result};
use crate::geometry::{check_dim, Cap, Collar, Domain, Frame, SpherePoint};
use crate::poly_space::{PolyCoeffs, PolySpace, SampledBasis};

/// Highest polynomial degree a reference rule is built for.
pub const MAX_DEGREE: usize = 200;

/// Region integrated by a [`ProductRule`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RuleDomain {
    Domain(Domain),
    Sphere { dim: usize },
}

impl From<Domain> for RuleDomain {
    fn from(d: Domain) -> Self {
        RuleDomain::Domain(d)
    }
}

impl From<Cap> for RuleDomain {
    fn from(c: Cap) -> Self {
        RuleDomain::Domain(Domain::Cap(c))
    }
}

impl From<Collar> for RuleDomain {
    fn from(c: Collar) -> Self {
        RuleDomain::Domain(Domain::Collar(c))
    }
}

impl RuleDomain {
    pub fn dim(&self) -> usize {
        match self {
            RuleDomain::Domain(d) => d.dim(),
            RuleDomain::Sphere { dim } => *dim,
        }
    }

    pub fn measure(&self) -> f64 {
        match self {
            RuleDomain::Domain(d) => d.measure(),
            RuleDomain::Sphere { dim: 1 } => 2.0 * PI,
            RuleDomain::Sphere { .. } => 4.0 * PI,
        }
    }

    fn frame_and_range(&self) -> Result<(Frame, f64, f64)> {
        match self {
            RuleDomain::Domain(d) => {
                let (lo, hi) = d.polar_range();
                Ok((*d.frame(), lo, hi))
            }
            RuleDomain::Sphere { dim } => {
                check_dim(*dim)?;
                Ok((Frame::new(&SpherePoint::north_pole(*dim)?), 0.0, PI))
            }
        }
    }
}

/// Tensor-product reference rule: Gauss–Legendre in `t = cos θ` times a
/// uniform azimuthal rule on the 2-sphere; Gauss–Legendre in the angle (or
/// the trapezoid rule on the full circle) on `S¹`.
#[derive(Clone, Debug)]
pub struct ProductRule {
    domain: RuleDomain,
    degree: usize,
    polar_nodes: Vec<f64>,
    polar_weights: Vec<f64>,
    azimuth_count: usize,
    points: Vec<SpherePoint>,
    weights: Vec<f64>,
}

impl ProductRule {
    pub fn domain(&self) -> &RuleDomain {
        &self.domain
    }

    /// Polynomial degree the rule is exact for.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Polar nodes (`t = cos θ` for `d = 2`, signed angle for `d = 1`).
    pub fn polar_nodes(&self) -> &[f64] {
        &self.polar_nodes
    }

    pub fn polar_weights(&self) -> &[f64] {
        &self.polar_weights
    }

    pub fn azimuth_count(&self) -> usize {
        self.azimuth_count
    }

    pub fn points(&self) -> &[SpherePoint] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `Σ w_i f(x_i)`.
    pub fn integrate<F: Fn(&SpherePoint) -> f64>(&self, f: F) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(p)).sum()
    }
}

/// Gauss–Legendre order in the angle for circle arcs of half-length `half`.
fn arc_order(degree: usize, half: f64) -> usize {
    degree + 20 + (degree as f64 * half).ceil() as usize
}

pub fn build_rule(domain: &RuleDomain, target_degree: usize) -> Result<ProductRule> {
    if target_degree > MAX_DEGREE {
        return Err(Error::DegreeOverflow(target_degree));
    }
    let dim = domain.dim();
    let (frame, lo, hi) = domain.frame_and_range()?;
    let n = target_degree;
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut polar_nodes = Vec::new();
    let mut polar_weights = Vec::new();
    let azimuth_count;
    if dim == 1 {
        azimuth_count = 1;
        if matches!(domain, RuleDomain::Sphere { .. }) {
            let m = 2 * n + 1;
            for k in 0..m {
                let s = 2.0 * PI * k as f64 / m as f64;
                polar_nodes.push(s);
                polar_weights.push(2.0 * PI / m as f64);
            }
        } else {
            // One arc for a cap, two mirrored arcs for a collar.
            let arcs: Vec<(f64, f64)> = if lo == 0.0 { vec![(-hi, hi)] } else { vec![(-hi, -lo), (lo, hi)] };
            for (a, b) in arcs {
                let half = 0.5 * (b - a);
                let gl = gauss_legendre(arc_order(n, half));
                let mid = 0.5 * (a + b);
                for (x, w) in gl.nodes.iter().zip(&gl.weights) {
                    polar_nodes.push(mid + half * x);
                    polar_weights.push(half * w);
                }
            }
        }
        for (s, w) in polar_nodes.iter().zip(&polar_weights) {
            points.push(frame.to_global(&SpherePoint::from_angle(*s)));
            weights.push(*w);
        }
    } else {
        let m = 2 * n + 1;
        azimuth_count = m;
        let gl = gauss_legendre(n + 2);
        let (t_lo, t_hi) = (hi.cos(), lo.cos());
        let (mid, half) = (0.5 * (t_lo + t_hi), 0.5 * (t_hi - t_lo));
        for (x, w) in gl.nodes.iter().zip(&gl.weights) {
            polar_nodes.push(mid + half * x);
            polar_weights.push(half * w);
        }
        let dphi = 2.0 * PI / m as f64;
        for (t, w) in polar_nodes.iter().zip(&polar_weights) {
            let theta = t.clamp(-1.0, 1.0).acos();
            for k in 0..m {
                points.push(frame.from_polar(theta, dphi * k as f64));
                weights.push(w * dphi);
            }
        }
    }
    Ok(ProductRule { domain: *domain, degree: n, polar_nodes, polar_weights, azimuth_count, points, weights })
}

/// `Σ w_i f(x_i)` for a rule.
pub fn integrate<F: Fn(&SpherePoint) -> f64>(rule: &ProductRule, f: F) -> f64 {
    rule.integrate(f)
}

/// Degrees visited by adaptive integration: successive doublings ending at
/// the cap of 200.
pub const ADAPTIVE_LADDER: [usize; 4] = [25, 50, 100, 200];

struct Level {
    degree: usize,
    rule: OnceLock<ProductRule>,
    basis: OnceLock<SampledBasis>,
}

/// Order-doubling integrator over a fixed domain. Rules (and, for
/// polynomial integrands, sampled bases) are built once per level and
/// shared across calls, so one integrator serves many trials.
pub struct AdaptiveIntegrator {
    domain: RuleDomain,
    space: Option<PolySpace>,
    levels: Vec<Level>,
}

impl AdaptiveIntegrator {
    pub fn new(domain: RuleDomain) -> Self {
        let levels = ADAPTIVE_LADDER
            .iter()
            .map(|&degree| Level { degree, rule: OnceLock::new(), basis: OnceLock::new() })
            .collect();
        Self { domain, space: None, levels }
    }

    /// Integrator that also caches basis values of `space` on every level,
    /// for [`AdaptiveIntegrator::integrate_poly_power`].
    pub fn for_space(domain: RuleDomain, space: PolySpace) -> Self {
        Self { space: Some(space), ..Self::new(domain) }
    }

    pub fn domain(&self) -> &RuleDomain {
        &self.domain
    }

    fn rule(&self, level: usize) -> Result<&ProductRule> {
        let l = &self.levels[level];
        if let Some(r) = l.rule.get() {
            return Ok(r);
        }
        let r = build_rule(&self.domain, l.degree)?;
        Ok(l.rule.get_or_init(|| r))
    }

    fn run<E: FnMut(usize) -> Result<f64>>(&self, tol: f64, mut estimate: E) -> Result<f64> {
        if !(tol >= 1e-10) {
            return Err(Error::InvalidParameter(format!("adaptive tolerance must be at least 1e-10, got {tol}")));
        }
        let mut prev = estimate(0)?;
        for level in 1..self.levels.len() {
            let cur = estimate(level)?;
            if (cur - prev).abs() <= tol * cur.abs() {
                return Ok(cur);
            }
            prev = cur;
            if level + 1 == self.levels.len() {
                return Err(Error::NonConvergence { previous: estimate(level - 1)?, last: cur });
            }
        }
        Ok(prev)
    }

    pub fn integrate<F: Fn(&SpherePoint) -> f64>(&self, f: F, tol: f64) -> Result<f64> {
        self.run(tol, |level| Ok(self.rule(level)?.integrate(&f)))
    }

    /// `∫ |p|^power g` for a polynomial in the cached space, with an
    /// optional pointwise factor `g`.
    pub fn integrate_poly_power(&self, p: &PolyCoeffs, power: f64, tol: f64) -> Result<f64> {
        let space = self
            .space
            .filter(|s| *s == p.space)
            .ok_or_else(|| Error::InvalidParameter("integrator was not built for this polynomial space".into()))?;
        self.run(tol, |level| {
            let rule = self.rule(level)?;
            let basis = self.levels[level].basis.get_or_init(|| SampledBasis::new(space, rule.points()));
            let v: DVector<f64> = basis.values(&p.coeffs);
            Ok(v.iter().zip(rule.weights()).map(|(x, w)| w * x.abs().powf(power)).sum())
        })
    }
}

/// `∫_domain f dσ` by doubling the rule degree until successive estimates
/// differ by less than `tol · |estimate|`.
pub fn integrate_adaptive<F: Fn(&SpherePoint) -> f64>(domain: &RuleDomain, f: F, tol: f64) -> Result<f64> {
    AdaptiveIntegrator::new(*domain).integrate(f, tol)
}
