//! Closed-form integrals of the orthonormal basis over caps and collars,
//! in the domain's own frame (centre at the north pole).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{Cap, Domain};
use crate::poly_space::PolySpace;

/// `P_0(t), …, P_{n}(t)` by the three-term recurrence.
fn legendre_values(n: usize, t: f64) -> Vec<f64> {
    let mut p = vec![0.0; n + 1];
    p[0] = 1.0;
    if n >= 1 {
        p[1] = t;
    }
    for l in 1..n {
        let lf = l as f64;
        p[l + 1] = ((2.0 * lf + 1.0) * t * p[l] - lf * p[l - 1]) / (lf + 1.0);
    }
    p
}

/// `∫_a^b P_l(t) dt` for `l = 0..=n`.
fn legendre_integrals(n: usize, a: f64, b: f64) -> Vec<f64> {
    let pa = legendre_values(n + 1, a);
    let pb = legendre_values(n + 1, b);
    let anti = |p: &[f64], l: usize| -> f64 {
        if l == 0 {
            p[1]
        } else {
            (p[l + 1] - p[l - 1]) / (2.0 * l as f64 + 1.0)
        }
    };
    (0..=n).map(|l| anti(&pb, l) - anti(&pa, l)).collect()
}

/// Moments of the basis of `Π_n^d` over a domain whose polar angle ranges
/// over `[lo, hi]`.
fn polar_moments(dim: usize, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let space = PolySpace { dim_sphere: dim, degree: n };
    let mut m = vec![0.0; space.dim()];
    if dim == 1 {
        // Symmetric arcs `±[lo, hi]`: sine terms vanish.
        m[0] = 2.0 * (hi - lo) / (2.0 * PI).sqrt();
        for k in 1..=n {
            let kf = k as f64;
            m[2 * k - 1] = 2.0 * ((kf * hi).sin() - (kf * lo).sin()) / (kf * PI.sqrt());
        }
    } else {
        let ints = legendre_integrals(n, hi.cos(), lo.cos());
        for (l, int) in ints.iter().enumerate() {
            let lf = l as f64;
            m[l * l + l] = 2.0 * PI * ((2.0 * lf + 1.0) / (4.0 * PI)).sqrt() * int;
        }
    }
    m
}

/// `∫_{cap} Y_k dσ` for every basis element of `Π_n^d`, with the cap
/// moved to the north pole.
pub fn cap_moments(cap: &Cap, n: usize) -> Vec<f64> {
    polar_moments(cap.dim(), n, 0.0, cap.alpha())
}

/// Basis moments over a cap or collar, in the domain frame.
pub fn domain_moments(domain: &Domain, n: usize) -> Result<Vec<f64>> {
    if n > super::MAX_DEGREE {
        return Err(Error::DegreeOverflow(n));
    }
    let (lo, hi) = domain.polar_range();
    Ok(polar_moments(domain.dim(), n, lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Collar, Frame, SpherePoint};
    use crate::quadrature::{build_rule, RuleDomain};

    #[test]
    fn hemisphere_examples() {
        let cap = Cap::north(2, PI / 2.0).unwrap();
        let m = cap_moments(&cap, 3);
        assert!((m[0] - PI.sqrt()).abs() < 1e-14);
        assert!((m[0] - 1.7724539).abs() < 1e-7);
        let y10 = 2.0 * PI * (3.0 / (4.0 * PI)).sqrt() * 0.5;
        assert!((m[2] - y10).abs() < 1e-14);
        assert!((m[2] - 1.5349901).abs() < 1e-7);
        for (k, v) in m.iter().enumerate() {
            let l = (k as f64).sqrt().floor() as usize;
            if k != l * l + l {
                assert_eq!(*v, 0.0);
            }
        }
    }

    #[test]
    fn constant_moment_is_scaled_area() {
        for &a in &[0.2, 1.3, 3.0] {
            let m = cap_moments(&Cap::north(2, a).unwrap(), 0);
            assert!((m[0] - 2.0 * PI * (1.0 - a.cos()) / (4.0 * PI).sqrt()).abs() < 1e-14);
        }
    }

    fn check_against_rule(domain: Domain, n: usize) {
        let space = PolySpace::new(domain.dim(), n).unwrap();
        let m = domain_moments(&domain, n).unwrap();
        let rule = build_rule(&RuleDomain::Domain(domain), n).unwrap();
        let frame: &Frame = domain.frame();
        let mut q = vec![0.0; space.dim()];
        let mut buf = vec![0.0; space.dim()];
        for (p, w) in rule.points().iter().zip(rule.weights()) {
            let local: SpherePoint = frame.to_local(p);
            space.eval_basis_into(local.coords(), &mut buf);
            for (qk, bk) in q.iter_mut().zip(&buf) {
                *qk += w * bk;
            }
        }
        let scale = m.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for k in 0..space.dim() {
            assert!((q[k] - m[k]).abs() <= 1e-12 * scale, "n={n} k={k}: {} vs {}", q[k], m[k]);
        }
    }

    #[test]
    fn moments_match_rules() {
        let e = SpherePoint::new(&[0.3, -0.2, 0.9]).unwrap();
        for n in [0, 1, 5, 12, 24] {
            for &a in &[0.3, 1.0, 2.0] {
                check_against_rule(Cap::new(e, a).unwrap().into(), n);
                check_against_rule(Cap::north(1, a).unwrap().into(), n);
            }
            check_against_rule(Collar::new(e, 0.4, 1.5).unwrap().into(), n);
            check_against_rule(Collar::north(1, 0.4, 1.5).unwrap().into(), n);
        }
    }
}
