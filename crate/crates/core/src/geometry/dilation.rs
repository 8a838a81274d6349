//! The polar dilation `T: (η sin θ, cos θ) ↦ (η sin 8θ, cos 8θ)` and its
//! Jacobian polynomial `D`.

use std::f64::consts::PI;

use super::point::{angle3, check_dim, Frame, SpherePoint};
use crate::error::{Error, Result};

pub const DILATION: f64 = 8.0;

/// `T x` in `e`-adapted coordinates, defined on `B(e, π/8)`.
pub fn map_t(x: &SpherePoint, e: &SpherePoint) -> Result<SpherePoint> {
    x.same_dim(e)?;
    let theta = angle3(x.array(), e.array());
    if theta > PI / DILATION + 1e-12 {
        return Err(Error::DilationRange(theta));
    }
    Ok(map_t_global(x, e))
}

/// `T x` for any polar angle; the polynomial identities hold on all of `S^d`.
pub fn map_t_global(x: &SpherePoint, e: &SpherePoint) -> SpherePoint {
    let frame = Frame::new(e);
    let (theta, phi) = frame.polar(x);
    frame.from_polar(DILATION * theta, phi)
}

/// `D(cos θ) = sin^{d−1}(8θ) / sin^{d−1}(θ)`.
///
/// For `d = 2` this is the Chebyshev polynomial `U₇`, evaluated by its
/// three-term recurrence so the value is continuous through `θ = 0`.
pub fn poly_d(dim: usize, t: f64) -> Result<f64> {
    check_dim(dim)?;
    if dim == 1 {
        return Ok(1.0);
    }
    let t = t.clamp(-1.0, 1.0);
    let (mut u0, mut u1) = (1.0, 2.0 * t);
    for _ in 1..7 {
        let u2 = 2.0 * t * u1 - u0;
        u0 = u1;
        u1 = u2;
    }
    Ok(u1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixes_the_center() {
        let e = SpherePoint::new(&[0.3, 0.1, 0.8]).unwrap();
        let y = map_t(&e, &e).unwrap();
        assert!(angle3(y.array(), e.array()) < 1e-12);
    }

    #[test]
    fn pi_over_16_goes_to_equator() {
        let e = SpherePoint::north_pole(2).unwrap();
        let x = SpherePoint::from_polar(2, PI / 16.0, 0.7).unwrap();
        let y = map_t(&x, &e).unwrap();
        assert!((angle3(y.array(), e.array()) - PI / 2.0).abs() < 1e-14);
        let too_far = SpherePoint::from_polar(2, 0.5, 0.0).unwrap();
        assert!(matches!(map_t(&too_far, &e), Err(Error::DilationRange(_))));
    }

    #[test]
    fn d_polynomial_values() {
        assert_eq!(poly_d(1, 0.3).unwrap(), 1.0);
        assert!((poly_d(2, 1.0).unwrap() - 8.0).abs() < 1e-14);
        let th = PI / 16.0;
        assert!((poly_d(2, th.cos()).unwrap() - 1.0 / th.sin()).abs() < 1e-12);
        assert!(poly_d(3, 0.0).is_err());
    }

    #[test]
    fn d_polynomial_matches_sine_ratio() {
        for k in 1..200 {
            let th = k as f64 * PI / 200.0;
            if th.sin().abs() < 1e-3 {
                continue;
            }
            let want = (8.0 * th).sin() / th.sin();
            assert!((poly_d(2, th.cos()).unwrap() - want).abs() < 1e-12);
        }
    }
}
