//! `∫ |f|^p` for batches of polynomials, and the random trial polynomials.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Domain, SpherePoint};
use crate::poly_space::{random_polynomial, PolySpace, SampledBasis};
use crate::quadrature::{build_rule, ProductRule, RuleDomain, MAX_DEGREE};
use crate::rng::derive_seed;

/// Relative tolerance for `∫|f|^p` when `p` is an even integer (the first
/// rule is exact; a second level confirms it).
pub const EVEN_POWER_TOL: f64 = 1e-8;

/// Relative tolerance for other `p`, where `|f|^p` has kinks along the
/// zero set of `f` and product rules converge only algebraically.
pub const KINK_POWER_TOL: f64 = 1e-4;

/// Integrals smaller than this mark a degenerate trial polynomial.
pub const DEGENERATE_INTEGRAL: f64 = 1e-14;

const CHUNK: usize = 4096;

pub(crate) fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("p must be a finite number at least 1, got {p}")))
    }
}

pub(crate) fn is_even_integer(p: f64) -> bool {
    p.fract() == 0.0 && (p as u64).is_multiple_of(2)
}

pub(crate) fn power_tol(p: f64) -> f64 {
    if is_even_integer(p) {
        EVEN_POWER_TOL
    } else {
        KINK_POWER_TOL
    }
}

/// `|v|^p`, using integer powers when possible.
#[inline]
pub(crate) fn abs_pow(v: f64, p: f64) -> f64 {
    if p == 2.0 {
        v * v
    } else if p == 1.0 {
        v.abs()
    } else if p.fract() == 0.0 && p <= 16.0 {
        v.abs().powi(p as i32)
    } else {
        v.abs().powf(p)
    }
}

pub(crate) fn local(domain: &Domain, points: &[SpherePoint]) -> Vec<SpherePoint> {
    let f = domain.frame();
    points.iter().map(|p| f.to_local(p)).collect()
}

/// Polynomial values at `points` (global coordinates): `#points × T`.
pub(crate) fn values_at(
    domain: &Domain,
    space: PolySpace,
    points: &[SpherePoint],
    coeffs: &DMatrix<f64>,
) -> DMatrix<f64> {
    let loc = local(domain, points);
    let blocks: Vec<DMatrix<f64>> =
        loc.par_chunks(CHUNK).map(|c| SampledBasis::new(space, c).values_many(coeffs)).collect();
    let mut out = DMatrix::zeros(points.len(), coeffs.ncols());
    let mut row = 0;
    for b in blocks {
        out.rows_mut(row, b.nrows()).copy_from(&b);
        row += b.nrows();
    }
    out
}

/// `Σ_i w_i g_i |f_t(x_i)|^p` for every column `t`.
pub(crate) fn rule_power_sums(
    domain: &Domain,
    space: PolySpace,
    rule: &ProductRule,
    factor: Option<&[f64]>,
    coeffs: &DMatrix<f64>,
    p: f64,
) -> Vec<f64> {
    let vals = values_at(domain, space, rule.points(), coeffs);
    (0..coeffs.ncols())
        .map(|t| {
            let col = vals.column(t);
            let w = rule.weights();
            match factor {
                None => col.iter().zip(w).map(|(v, w)| w * abs_pow(*v, p)).sum(),
                Some(g) => col.iter().zip(w).zip(g).map(|((v, w), g)| w * g * abs_pow(*v, p)).sum(),
            }
        })
        .collect()
}

fn ladder(degree: usize, p: f64) -> Vec<usize> {
    let start = if is_even_integer(p) { (p as usize) * degree } else { 2 * degree };
    let mut v = vec![start.clamp(1, MAX_DEGREE)];
    while *v.last().unwrap() < MAX_DEGREE {
        v.push((v.last().unwrap() * 2).min(MAX_DEGREE));
    }
    if v.len() == 1 {
        v.push(MAX_DEGREE);
    }
    v
}

/// `∫_domain |f_t|^p dσ` for every column of `coeffs`, doubling the rule
/// degree until successive estimates agree to [`power_tol`].
pub fn power_integrals(domain: &Domain, space: PolySpace, coeffs: &DMatrix<f64>, p: f64) -> Result<Vec<f64>> {
    check_p(p)?;
    let tol = power_tol(p);
    let levels = ladder(space.degree, p);
    let mut prev: Option<Vec<f64>> = None;
    for deg in levels {
        let rule = build_rule(&RuleDomain::Domain(*domain), deg)?;
        let cur = rule_power_sums(domain, space, &rule, None, coeffs, p);
        if let Some(pv) = &prev {
            let worst =
                pv.iter().zip(&cur).max_by(|a, b| rel(a.0, a.1).total_cmp(&rel(b.0, b.1))).map(|(a, b)| (*a, *b));
            match worst {
                Some((a, b)) if rel(&a, &b) > tol => {
                    if deg == MAX_DEGREE {
                        return Err(Error::NonConvergence { previous: a, last: b });
                    }
                }
                _ => return Ok(cur),
            }
        }
        prev = Some(cur);
    }
    Err(Error::Breakdown("integration ladder exhausted".into()))
}

fn rel(a: &f64, b: &f64) -> f64 {
    if *b == 0.0 {
        a.abs()
    } else {
        (a - b).abs() / b.abs()
    }
}

/// Coefficient matrix (`dim × trials`) of the trial polynomials; column `t`
/// is drawn from the stream `derive_seed(seed, t)`, redraw `r` from
/// `derive_seed(derive_seed(seed, t), r)`.
pub(crate) fn trial_coeffs(space: PolySpace, trials: usize, seed: u64) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(space.dim(), trials);
    for t in 0..trials {
        let p = random_polynomial(space, derive_seed(seed, t as u64));
        m.column_mut(t).copy_from_slice(&p.coeffs);
    }
    m
}

/// Random trial polynomials with their `∫|f|^p`, redrawing degenerate ones.
pub(crate) struct Trials {
    pub space: PolySpace,
    pub coeffs: DMatrix<f64>,
    pub integrals: Vec<f64>,
}

pub(crate) fn draw_trials(domain: &Domain, space: PolySpace, p: f64, trials: usize, seed: u64) -> Result<Trials> {
    if trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    let mut coeffs = trial_coeffs(space, trials, seed);
    let mut integrals = power_integrals(domain, space, &coeffs, p)?;
    for redraw in 1..=8u64 {
        let bad: Vec<usize> = (0..trials).filter(|&t| integrals[t] < DEGENERATE_INTEGRAL).collect();
        if bad.is_empty() {
            return Ok(Trials { space, coeffs, integrals });
        }
        let mut sub = DMatrix::zeros(space.dim(), bad.len());
        for (i, &t) in bad.iter().enumerate() {
            let p = random_polynomial(space, derive_seed(derive_seed(seed, t as u64), redraw));
            sub.column_mut(i).copy_from_slice(&p.coeffs);
        }
        let fresh = power_integrals(domain, space, &sub, p)?;
        for (i, &t) in bad.iter().enumerate() {
            coeffs.column_mut(t).copy_from(&sub.column(i));
            integrals[t] = fresh[i];
        }
    }
    if integrals.iter().any(|&v| v < DEGENERATE_INTEGRAL) {
        return Err(Error::Breakdown("trial polynomials keep vanishing on the domain".into()));
    }
    Ok(Trials { space, coeffs, integrals })
}
