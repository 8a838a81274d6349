use std::f64::consts::PI;

use super::integrals::{abs_pow, check_p};
use super::report::Bracket;
use super::weight::DoublingWeight;
use crate::error::{Error, Result};
use crate::poly_space::{circle_basis_derivative, random_polynomial, PolySpace};
use crate::quadrature::integrate_interval;
use crate::rng::derive_seed;

/// Relative tolerance of the interval integrals.
pub const BERNSTEIN_TOL: f64 = 1e-8;

/// Weighted Bernstein estimate on `[−α, α]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BernsteinEstimate {
    pub constant: f64,
    pub ratios: Bracket,
}

/// `∫_{−α}^{α} g(t) dt` after `t = α sin u`, split at `t = 0`, which removes
/// the square-root endpoint behaviour and aligns the weight's kink with a
/// panel edge.
fn integrate_arc<G: Fn(f64) -> f64>(alpha: f64, g: G) -> Result<f64> {
    let h = |u: f64| {
        let (s, c) = u.sin_cos();
        g(alpha * s) * alpha * c
    };
    Ok(integrate_interval(h, -PI / 2.0, 0.0, BERNSTEIN_TOL)? + integrate_interval(h, 0.0, PI / 2.0, BERNSTEIN_TOL)?)
}

fn trig_values(coeffs: &[f64], n: usize, t: f64, buf: &mut [f64]) -> (f64, f64) {
    let mut v = 1.0 / (2.0 * PI).sqrt() * coeffs[0];
    for k in 1..=n {
        let (s, c) = (k as f64 * t).sin_cos();
        v += (coeffs[2 * k - 1] * c + coeffs[2 * k] * s) / PI.sqrt();
    }
    circle_basis_derivative(n, t, buf);
    let d = buf.iter().zip(coeffs).map(|(a, b)| a * b).sum();
    (v, d)
}

/// Ratio `∫|T′|^p W (α/n + √(α²−t²))^p / (n^p ∫|T|^p W)` for the trig
/// polynomial with the given coefficients.
pub fn bernstein_ratio(alpha: f64, degree: usize, p: f64, weight: &DoublingWeight, coeffs: &[f64]) -> Result<f64> {
    let n = degree;
    let w = |t: f64| weight.of_boundary(alpha - t.abs());
    let lhs = integrate_arc(alpha, |t| {
        let mut buf = vec![0.0; 2 * n + 1];
        let (_, d) = trig_values(coeffs, n, t, &mut buf);
        let fac = alpha / n as f64 + (alpha * alpha - t * t).max(0.0).sqrt();
        abs_pow(d * fac, p) * w(t)
    })?;
    let rhs = integrate_arc(alpha, |t| {
        let mut buf = vec![0.0; 2 * n + 1];
        let (v, _) = trig_values(coeffs, n, t, &mut buf);
        abs_pow(v, p) * w(t)
    })?;
    Ok(lhs / ((n as f64).powf(p) * rhs))
}

/// Largest Bernstein ratio on the arc `[−α, α]`, `α ≤ 1/2`, over random
/// trig polynomials of degree `n` together with `cos nθ` and `sin nθ`.
///
/// Random trials spread their energy over all frequencies and fall further
/// below the supremum as `n` grows; the top harmonics keep the estimate
/// close to it.
pub fn bernstein_check_d1(
    alpha: f64,
    degree: usize,
    p: f64,
    weight: &DoublingWeight,
    trials: usize,
    seed: u64,
) -> Result<BernsteinEstimate> {
    use rayon::prelude::*;
    check_p(p)?;
    if !(alpha > 0.0 && alpha <= 0.5) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1/2], got {alpha}")));
    }
    if degree == 0 || trials == 0 {
        return Err(Error::InvalidParameter("degree and trials must be positive".into()));
    }
    let space = PolySpace::new(1, degree)?;
    let mut ratios: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let poly = random_polynomial(space, derive_seed(seed, t as u64));
            bernstein_ratio(alpha, degree, p, weight, &poly.coeffs)
        })
        .collect::<Result<_>>()?;
    for index in [2 * degree - 1, 2 * degree] {
        let mut c = vec![0.0; space.dim()];
        c[index] = 1.0;
        ratios.push(bernstein_ratio(alpha, degree, p, weight, &c)?);
    }
    let b = Bracket::from_values(&ratios);
    Ok(BernsteinEstimate { constant: b.max, ratios: b })
}
