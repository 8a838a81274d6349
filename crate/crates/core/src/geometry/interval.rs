//! Metrics on the interval `[−α, α]` and their lifts to the cap.

use super::domain::Cap;
use super::point::{angle3, SpherePoint};
use crate::error::{Error, Result};

fn check(alpha: f64, x: f64) -> Result<()> {
    if alpha > 0.0 && x.abs() <= alpha * (1.0 + 1e-12) {
        Ok(())
    } else {
        Err(Error::OutsideInterval { value: x, alpha })
    }
}

fn interval_b(alpha: f64, x: f64) -> f64 {
    (x + alpha).abs().min((x - alpha).abs())
}

/// `ρ₁(x₁, x₂) = α⁻¹ √(|x₁ − x₂|² + α |√b₁ − √b₂|²)`,
/// `b_x = min{|x + α|, |x − α|}`.
pub fn rho1(alpha: f64, x1: f64, x2: f64) -> Result<f64> {
    check(alpha, x1)?;
    check(alpha, x2)?;
    let s = interval_b(alpha, x1).sqrt() - interval_b(alpha, x2).sqrt();
    Ok(((x1 - x2).powi(2) + alpha * s * s).sqrt() / alpha)
}

/// `ρ₂(x₁, x₂) = α⁻¹ √(|x₁ − x₂|² + |√(α² − x₁²) − √(α² − x₂²)|²)`.
pub fn rho2(alpha: f64, x1: f64, x2: f64) -> Result<f64> {
    check(alpha, x1)?;
    check(alpha, x2)?;
    let a2 = alpha * alpha;
    let s = (a2 - x1 * x1).max(0.0).sqrt() - (a2 - x2 * x2).max(0.0).sqrt();
    Ok(((x1 - x2).powi(2) + s * s).sqrt() / alpha)
}

/// The parameter `t ∈ [0, π]` with `x = arcsin(sin α · cos t)`.
pub fn rho3_parameter(alpha: f64, x: f64) -> f64 {
    (x.sin() / alpha.sin()).clamp(-1.0, 1.0).acos()
}

/// `ρ₃(x₁, x₂) = |t₁ − t₂|`.
pub fn rho3(alpha: f64, x1: f64, x2: f64) -> Result<f64> {
    check(alpha, x1)?;
    check(alpha, x2)?;
    Ok((rho3_parameter(alpha, x1) - rho3_parameter(alpha, x2)).abs())
}

fn decompose(cap: &Cap, x: &SpherePoint) -> Result<(f64, [f64; 3])> {
    cap.boundary_distance(x)?;
    let theta = angle3(x.array(), cap.center().array());
    Ok((theta, cap.frame().perpendicular(x)))
}

/// `ρ₄(x, y) = max{ρ₁(θ, t), d(ξ, η)}` for `x = e cos θ + ξ sin θ`,
/// `y = e cos t + η sin t`.
pub fn rho4(cap: &Cap, x: &SpherePoint, y: &SpherePoint) -> Result<f64> {
    let (tx, xi) = decompose(cap, x)?;
    let (ty, eta) = decompose(cap, y)?;
    let a = cap.alpha();
    let radial = rho1(a, tx.min(a), ty.min(a))?;
    Ok(radial.max(angle3(&xi, &eta)))
}

/// `ρ₅(x, y) = (sin α)⁻¹ √(|ξ sin θ − η sin t|² + |√(sin²α − sin²θ) − √(sin²α − sin²t)|²)`.
pub fn rho5(cap: &Cap, x: &SpherePoint, y: &SpherePoint) -> Result<f64> {
    let (tx, xi) = decompose(cap, x)?;
    let (ty, eta) = decompose(cap, y)?;
    let sa = cap.alpha().sin();
    let (sx, sy) = (tx.sin(), ty.sin());
    let mut tangential = 0.0;
    for k in 0..3 {
        tangential += (xi[k] * sx - eta[k] * sy).powi(2);
    }
    let s = (sa * sa - sx * sx).max(0.0).sqrt() - (sa * sa - sy * sy).max(0.0).sqrt();
    Ok((tangential + s * s).sqrt() / sa)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho1_examples() {
        assert_eq!(rho1(0.5, 0.0, 0.0).unwrap(), 0.0);
        for &a in &[0.05, 0.3, 0.5] {
            assert!((rho1(a, 0.0, a).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        }
        assert!(rho1(0.5, 0.6, 0.0).is_err());
    }

    #[test]
    fn rho2_rho3_vanish_on_diagonal() {
        assert_eq!(rho2(0.3, 0.0, 0.0).unwrap(), 0.0);
        assert_eq!(rho3(0.3, 0.1, 0.1).unwrap(), 0.0);
        assert_eq!(rho3(0.3, -0.3, -0.3).unwrap(), 0.0);
    }

    #[test]
    fn rho3_endpoints() {
        let a = 0.4;
        assert!((rho3(a, -a, a).unwrap() - std::f64::consts::PI).abs() < 1e-7);
        assert!((rho3_parameter(a, 0.0) - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn rho4_rho5_vanish_on_diagonal() {
        let cap = Cap::north(2, 0.5).unwrap();
        for &(t, p) in &[(0.0, 0.0), (0.2, 1.0), (0.5, -2.0)] {
            let x = SpherePoint::from_polar(2, t, p).unwrap();
            assert!(rho4(&cap, &x, &x).unwrap() < 1e-15);
            assert!(rho5(&cap, &x, &x).unwrap() < 1e-15);
        }
    }
}
