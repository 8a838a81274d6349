//! Empirical constants of the sampling inequalities on caps and collars.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::integrals::{abs_pow, check_p, draw_trials, rule_power_sums, values_at, Trials};
use super::report::Bracket;
use super::sampling::ball_samples;
use super::weight::{compute_wn, DoublingWeight, BALL_RESOLUTION};
use crate::cubature::CubatureRule;
use crate::error::{Error, Result};
use crate::geometry::{rho_ball_volume, Domain, RhoBall, SpherePoint};
use crate::point_sets::{tau_statistic, NodeSet, DEFAULT_PROBE_RESOLUTION};
use crate::poly_space::PolySpace;
use crate::quadrature::{build_rule, RuleDomain, MAX_DEGREE};

/// Default number of quasi-random points per ball (the centre is added).
pub const DEFAULT_BALL_SAMPLES: usize = 64;

/// Per-node, per-trial extremes of a batch of polynomials over metric balls.
pub(crate) struct BallExtrema {
    trials: usize,
    /// Row-major `nodes × trials`.
    max_abs: Vec<f64>,
    min_abs: Vec<f64>,
    osc: Vec<f64>,
}

impl BallExtrema {
    fn at(v: &[f64], trials: usize, node: usize, t: usize) -> f64 {
        v[node * trials + t]
    }
}

const NODE_CHUNK: usize = 64;

pub(crate) fn ball_extrema(
    domain: &Domain,
    centres: &[SpherePoint],
    radius: f64,
    space: PolySpace,
    coeffs: &DMatrix<f64>,
    samples: usize,
) -> Result<BallExtrema> {
    let trials = coeffs.ncols();
    let balls: Vec<RhoBall> = centres.iter().map(|c| RhoBall::new(*domain, *c, radius)).collect::<Result<_>>()?;
    let parts: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> = balls
        .par_chunks(NODE_CHUNK)
        .map(|chunk| {
            let sets: Vec<Vec<SpherePoint>> = chunk.iter().map(|b| ball_samples(b, samples)).collect();
            let flat: Vec<SpherePoint> = sets.iter().flatten().copied().collect();
            let vals = values_at(domain, space, &flat, coeffs);
            let mut mx = Vec::with_capacity(chunk.len() * trials);
            let mut mn = Vec::with_capacity(chunk.len() * trials);
            let mut os = Vec::with_capacity(chunk.len() * trials);
            let mut row = 0;
            for s in &sets {
                for t in 0..trials {
                    let col = vals.column(t);
                    let seg = &col.as_slice()[row..row + s.len()];
                    let (mut lo, mut hi, mut alo, mut ahi) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, 0.0f64);
                    for &v in seg {
                        lo = lo.min(v);
                        hi = hi.max(v);
                        alo = alo.min(v.abs());
                        ahi = ahi.max(v.abs());
                    }
                    if lo <= 0.0 && hi >= 0.0 {
                        alo = 0.0;
                    }
                    mx.push(ahi);
                    mn.push(alo);
                    os.push(hi - lo);
                }
                row += s.len();
            }
            (mx, mn, os)
        })
        .collect();
    let mut out = BallExtrema { trials, max_abs: Vec::new(), min_abs: Vec::new(), osc: Vec::new() };
    for (a, b, c) in parts {
        out.max_abs.extend(a);
        out.min_abs.extend(b);
        out.osc.extend(c);
    }
    Ok(out)
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        Err(Error::InvalidParameter("need at least one trial".into()))
    } else {
        Ok(())
    }
}

fn space_for(domain: &Domain, degree: usize) -> Result<PolySpace> {
    if 2 * degree > MAX_DEGREE {
        return Err(Error::DegreeOverflow(degree));
    }
    PolySpace::new(domain.dim(), degree)
}

/// `Σ_ω c_ω |f_t(ω)|^p` for every trial.
fn node_power_sums(domain: &Domain, points: &[SpherePoint], cw: &[f64], tr: &Trials, p: f64) -> Vec<f64> {
    let vals = values_at(domain, tr.space, points, &tr.coeffs);
    (0..tr.coeffs.ncols()).map(|t| vals.column(t).iter().zip(cw).map(|(v, c)| c * abs_pow(*v, p)).sum()).collect()
}

/// `(Σ λ_ω |f(ω)|^p) / ∫|f|^p` over random `f` of degree `poly_degree`.
pub fn mz_bracket_with(rule: &CubatureRule, p: f64, poly_degree: usize, trials: usize, seed: u64) -> Result<Bracket> {
    check_p(p)?;
    check_trials(trials)?;
    let domain = rule.domain();
    let space = space_for(domain, poly_degree)?;
    let tr = draw_trials(domain, space, p, trials, seed)?;
    let sums = node_power_sums(domain, &rule.nodes.points, &rule.weights, &tr, p);
    let ratios: Vec<f64> = sums.iter().zip(&tr.integrals).map(|(s, i)| s / i).collect();
    Ok(Bracket::from_values(&ratios))
}

/// MZ bracket over random `f ∈ Π_n` with `n` the rule degree.
pub fn mz_bracket(rule: &CubatureRule, p: f64, trials: usize, seed: u64) -> Result<Bracket> {
    mz_bracket_with(rule, p, rule.degree, trials, seed)
}

fn ball_volumes(domain: &Domain, points: &[SpherePoint], r: f64) -> Result<Vec<f64>> {
    points.par_iter().map(|x| rho_ball_volume(&RhoBall::new(*domain, *x, r)?, BALL_RESOLUTION)).collect()
}

/// Oscillation estimate: the largest `(LHS/RHS)^{1/p}/δ` over trials, with
/// `LHS = Σ_ω osc(f, B(ω, βδ/n))^p |B(ω, δ/n)|` and `RHS = ∫|f|^p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OscEstimate {
    pub constant: f64,
    pub ratios: Bracket,
}

pub fn osc_constant(
    nodes: &NodeSet,
    degree: usize,
    p: f64,
    beta: f64,
    trials: usize,
    ball_samples: usize,
    seed: u64,
) -> Result<OscEstimate> {
    check_p(p)?;
    check_trials(trials)?;
    if !(beta >= 1.0) {
        return Err(Error::InvalidParameter(format!("beta must be at least 1, got {beta}")));
    }
    let domain = &nodes.domain;
    let space = space_for(domain, degree)?;
    let tr = draw_trials(domain, space, p, trials, seed)?;
    let eps = nodes.epsilon;
    let vols = ball_volumes(domain, &nodes.points, eps)?;
    let ext = ball_extrema(domain, &nodes.points, beta * eps, space, &tr.coeffs, ball_samples)?;
    let ratios: Vec<f64> = (0..trials)
        .map(|t| {
            let lhs: f64 =
                (0..nodes.len()).map(|j| abs_pow(BallExtrema::at(&ext.osc, ext.trials, j, t), p) * vols[j]).sum();
            (lhs / tr.integrals[t]).powf(1.0 / p) / nodes.delta
        })
        .collect();
    let b = Bracket::from_values(&ratios);
    Ok(OscEstimate { constant: b.max, ratios: b })
}

/// Large-sieve estimate: the largest `Σ|f(ω)|^p Δ_{1/n}(ω) / (τ ∫|f|^p)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SieveEstimate {
    pub constant: f64,
    pub tau: usize,
    pub ratios: Bracket,
}

pub fn large_sieve_constant(
    domain: &Domain,
    points: &[SpherePoint],
    degree: usize,
    p: f64,
    trials: usize,
    seed: u64,
) -> Result<SieveEstimate> {
    check_p(p)?;
    check_trials(trials)?;
    if points.is_empty() || degree == 0 {
        return Err(Error::InvalidParameter("need a nonempty node list and degree at least 1".into()));
    }
    let space = space_for(domain, degree)?;
    let r = 1.0 / degree as f64;
    let deltas: Vec<f64> = points.iter().map(|x| domain.delta_r(x, r)).collect::<Result<_>>()?;
    let tau = tau_statistic(domain, points, degree, DEFAULT_PROBE_RESOLUTION)?;
    let tr = draw_trials(domain, space, p, trials, seed)?;
    let sums = node_power_sums(domain, points, &deltas, &tr, p);
    let ratios: Vec<f64> = sums.iter().zip(&tr.integrals).map(|(s, i)| s / (tau as f64 * i)).collect();
    let b = Bracket::from_values(&ratios);
    Ok(SieveEstimate { constant: b.max, tau, ratios: b })
}

/// Brackets of `Σ max_{B(ω,βδ/n)}|f|^p Δ_{δ/n}(ω) / ∫|f|^p` and the
/// corresponding min-sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaxMinEstimate {
    pub max_sum: Bracket,
    pub min_sum: Bracket,
    /// Max-sum at least min-sum in every trial.
    pub ordered: bool,
}

pub fn maxmin_equivalence(
    nodes: &NodeSet,
    degree: usize,
    p: f64,
    beta: f64,
    trials: usize,
    ball_samples: usize,
    seed: u64,
) -> Result<MaxMinEstimate> {
    check_p(p)?;
    check_trials(trials)?;
    if !(beta >= 1.0) {
        return Err(Error::InvalidParameter(format!("beta must be at least 1, got {beta}")));
    }
    let domain = &nodes.domain;
    let space = space_for(domain, degree)?;
    let tr = draw_trials(domain, space, p, trials, seed)?;
    let eps = nodes.epsilon;
    let deltas: Vec<f64> = nodes.points.iter().map(|x| domain.delta_r(x, eps)).collect::<Result<_>>()?;
    let ext = ball_extrema(domain, &nodes.points, beta * eps, space, &tr.coeffs, ball_samples)?;
    let mut maxs = Vec::with_capacity(trials);
    let mut mins = Vec::with_capacity(trials);
    for t in 0..trials {
        let (mut a, mut b) = (0.0, 0.0);
        for (j, dj) in deltas.iter().enumerate() {
            a += abs_pow(BallExtrema::at(&ext.max_abs, ext.trials, j, t), p) * dj;
            b += abs_pow(BallExtrema::at(&ext.min_abs, ext.trials, j, t), p) * dj;
        }
        maxs.push(a / tr.integrals[t]);
        mins.push(b / tr.integrals[t]);
    }
    let ordered = maxs.iter().zip(&mins).all(|(a, b)| a >= b);
    Ok(MaxMinEstimate { max_sum: Bracket::from_values(&maxs), min_sum: Bracket::from_values(&mins), ordered })
}

/// Brackets for the three weighted equivalences: `∫|f|^pW / ∫|f|^pW_n`, and
/// the max- and min-sums with ball masses `∫_{B(ω,δ/n)} W` against
/// `∫|f|^pW`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightedMzEstimate {
    pub wn_ratio: Bracket,
    pub max_sum: Bracket,
    pub min_sum: Bracket,
}

/// Degree of the fixed product rule used for weighted integrals.
pub fn weighted_rule_degree(degree: usize, p: f64) -> usize {
    (2 * (p.ceil() as usize) * degree).clamp(32, MAX_DEGREE)
}

#[allow(clippy::too_many_arguments)]
pub fn weighted_mz(
    domain: &Domain,
    weight: &DoublingWeight,
    nodes: &NodeSet,
    degree: usize,
    p: f64,
    trials: usize,
    ball_samples: usize,
    seed: u64,
) -> Result<WeightedMzEstimate> {
    check_p(p)?;
    check_trials(trials)?;
    if let Domain::Cap(c) = domain {
        if c.alpha() > 0.5 + 1e-12 {
            return Err(Error::InvalidParameter(format!("weighted check needs alpha at most 1/2, got {}", c.alpha())));
        }
    }
    if degree == 0 {
        return Err(Error::InvalidParameter("degree must be at least 1".into()));
    }
    let space = space_for(domain, degree)?;
    let tr = draw_trials(domain, space, p, trials, seed)?;
    let rule = build_rule(&RuleDomain::Domain(*domain), weighted_rule_degree(degree, p))?;
    let w: Vec<f64> = rule.points().iter().map(|x| weight.eval_inside(domain, x)).collect();
    let wn: Vec<f64> =
        rule.points().par_iter().map(|x| compute_wn(domain, weight, degree, x)).collect::<Result<_>>()?;
    let iw = rule_power_sums(domain, space, &rule, Some(&w), &tr.coeffs, p);
    let iwn = rule_power_sums(domain, space, &rule, Some(&wn), &tr.coeffs, p);
    let eps = nodes.epsilon;
    let masses: Vec<f64> = nodes
        .points
        .par_iter()
        .map(|x| {
            let ball = RhoBall::new(*domain, *x, eps)?;
            Ok(ball.integrals(|y| weight.eval_inside(domain, y), BALL_RESOLUTION)?.0)
        })
        .collect::<Result<_>>()?;
    let ext = ball_extrema(domain, &nodes.points, eps, space, &tr.coeffs, ball_samples)?;
    let mut r2 = Vec::with_capacity(trials);
    let mut r3 = Vec::with_capacity(trials);
    let mut r4 = Vec::with_capacity(trials);
    for t in 0..trials {
        let (mut a, mut b) = (0.0, 0.0);
        for (j, m) in masses.iter().enumerate() {
            a += abs_pow(BallExtrema::at(&ext.max_abs, ext.trials, j, t), p) * m;
            b += abs_pow(BallExtrema::at(&ext.min_abs, ext.trials, j, t), p) * m;
        }
        r2.push(iw[t] / iwn[t]);
        r3.push(a / iw[t]);
        r4.push(b / iw[t]);
    }
    Ok(WeightedMzEstimate {
        wn_ratio: Bracket::from_values(&r2),
        max_sum: Bracket::from_values(&r3),
        min_sum: Bracket::from_values(&r4),
    })
}
