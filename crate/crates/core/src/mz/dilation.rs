use nalgebra::DMatrix;
use rayon::prelude::*;

use super::integrals::{trial_coeffs, values_at};
use crate::error::{Error, Result};
use crate::geometry::{map_t, map_t_global, poly_d, Cap, Domain, SpherePoint, DILATION, MAX_RADIUS};
use crate::poly_space::{PolySpace, SampledBasis};
use crate::quadrature::{build_rule, RuleDomain, MAX_DEGREE};

const PROJECTION_CHUNK: usize = 512;

/// Largest `|LHS − RHS| / (1 + |LHS|)` over random `f ∈ Π_n`, where
/// `LHS = ∫_{B(e,α)} f` and `RHS = 8 ∫_{B(e,α/8)} f(Tx) D(x·e)`.
pub fn change_of_variables_check(cap: &Cap, degree: usize, trials: usize, seed: u64) -> Result<f64> {
    if !(cap.alpha() >= 0.5 - 1e-12 && cap.alpha() <= MAX_RADIUS) {
        return Err(Error::InvalidParameter(format!("alpha must lie in [1/2, π − 0.1], got {}", cap.alpha())));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    let dim = cap.dim();
    let space = PolySpace::new(dim, degree)?;
    let coeffs = trial_coeffs(space, trials, seed);
    let big: Domain = (*cap).into();
    let small = Cap::new(*cap.center(), cap.alpha() / DILATION)?;
    let lhs_rule = build_rule(&RuleDomain::Domain(big), degree)?;
    let rhs_degree = 8 * degree + if dim == 2 { 7 } else { 0 };
    if rhs_degree > MAX_DEGREE {
        return Err(Error::DegreeOverflow(rhs_degree));
    }
    let rhs_rule = build_rule(&RuleDomain::Domain(small.into()), rhs_degree)?;
    let e = cap.center();
    let mapped: Vec<SpherePoint> = rhs_rule.points().iter().map(|x| map_t(x, e)).collect::<Result<_>>()?;
    let jac: Vec<f64> = rhs_rule.points().iter().map(|x| poly_d(dim, x.dot(e))).collect::<Result<_>>()?;
    let lv = values_at(&big, space, lhs_rule.points(), &coeffs);
    let rv = values_at(&big, space, &mapped, &coeffs);
    let mut worst: f64 = 0.0;
    for t in 0..trials {
        let lhs: f64 = lv.column(t).iter().zip(lhs_rule.weights()).map(|(v, w)| v * w).sum();
        let rhs: f64 =
            DILATION * rv.column(t).iter().zip(rhs_rule.weights()).zip(&jac).map(|((v, w), j)| v * w * j).sum::<f64>();
        worst = worst.max((lhs - rhs).abs() / (1.0 + lhs.abs()));
    }
    Ok(worst)
}

/// Largest relative `L²(S^d)` residual of projecting `f ∘ T` onto
/// `Π_{8n}` over random `f ∈ Π_n`.
pub fn dilation_projection_residual(dim: usize, degree: usize, trials: usize, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    let space = PolySpace::new(dim, degree)?;
    let target = PolySpace::new(dim, 8 * degree)?;
    let rule_degree = 2 * target.degree + 2;
    if rule_degree > MAX_DEGREE {
        return Err(Error::DegreeOverflow(rule_degree));
    }
    let rule = build_rule(&RuleDomain::Sphere { dim }, rule_degree)?;
    let e = SpherePoint::north_pole(dim)?;
    let mapped: Vec<SpherePoint> = rule.points().iter().map(|x| map_t_global(x, &e)).collect();
    let coeffs = trial_coeffs(space, trials, seed);
    let values = SampledBasis::new(space, &mapped).values_many(&coeffs);
    let points = rule.points();
    let weights = rule.weights();
    let chunks: Vec<(usize, usize)> =
        (0..points.len()).step_by(PROJECTION_CHUNK).map(|a| (a, (a + PROJECTION_CHUNK).min(points.len()))).collect();
    let block = |a: usize, b: usize| SampledBasis::new(target, &points[a..b]).matrix().clone();
    let weighted = |a: usize, b: usize| {
        let mut v = values.rows(a, b - a).into_owned();
        for (i, mut row) in v.row_iter_mut().enumerate() {
            row *= weights[a + i];
        }
        v
    };
    // Projection coefficients `∫ (f∘T) φ_k` by the exact rule.
    let partial: Vec<DMatrix<f64>> = chunks.par_iter().map(|&(a, b)| block(a, b).tr_mul(&weighted(a, b))).collect();
    let proj = partial.into_iter().fold(DMatrix::zeros(target.dim(), trials), |s, m| s + m);
    // Explicit residual sums, so tiny residuals do not cancel.
    let sums: Vec<Vec<(f64, f64)>> = chunks
        .par_iter()
        .map(|&(a, b)| {
            let q = block(a, b) * &proj;
            (0..trials)
                .map(|t| {
                    (a..b).fold((0.0, 0.0), |(num, den), i| {
                        let v = values[(i, t)];
                        (num + weights[i] * (v - q[(i - a, t)]).powi(2), den + weights[i] * v * v)
                    })
                })
                .collect()
        })
        .collect();
    let mut worst: f64 = 0.0;
    for t in 0..trials {
        let (num, den) = sums.iter().fold((0.0, 0.0), |(n, d), c| (n + c[t].0, d + c[t].1));
        if den > 0.0 {
            worst = worst.max((num / den).sqrt());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_polynomials_satisfy_the_identity() {
        for dim in [1, 2] {
            for alpha in [1.0, 2.5] {
                let cap = Cap::new(
                    SpherePoint::new(if dim == 2 { &[0.3, 0.2, 0.9][..] } else { &[0.6, 0.8][..] }).unwrap(),
                    alpha,
                )
                .unwrap();
                let d = change_of_variables_check(&cap, 5, 5, 11).unwrap();
                assert!(d <= 1e-10, "d={dim} alpha={alpha}: {d}");
            }
        }
        assert!(change_of_variables_check(&Cap::north(2, 0.3).unwrap(), 2, 1, 0).is_err());
    }

    #[test]
    fn composition_stays_in_the_dilated_space() {
        for dim in [1, 2] {
            let r = dilation_projection_residual(dim, 3, 3, 5).unwrap();
            assert!(r <= 1e-10, "{r}");
        }
    }
}
