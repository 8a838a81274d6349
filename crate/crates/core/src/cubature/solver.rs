use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error as ThisError;

use super::nnls::nnls;
use crate::error::{Error, Result};
use crate::geometry::{Domain, SpherePoint};
use crate::point_sets::{maximal_set_for, NodeSet};
use crate::poly_space::{PolySpace, SampledBasis};
use crate::quadrature::{build_rule, domain_moments, RuleDomain, MAX_DEGREE};

/// Default acceptance tolerance on the relative moment residual.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Smallest accepted tolerance.
pub const MIN_TOL: f64 = 1e-12;

/// Weights below `POSITIVITY_FLOOR · |domain| / #nodes` count as zero.
pub const POSITIVITY_FLOOR: f64 = 1e-14;

/// Singular values of the sampled basis below this fraction of the largest
/// are dropped when orthonormalising over the domain.
const RANK_CUTOFF: f64 = 1e-12;

const MAX_NEWTON: usize = 100;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverMeta {
    pub iterations: usize,
    pub backoffs: usize,
    pub seed: u64,
    pub pruned: usize,
}

/// Positive weights `λ_ω` on a node set, exact on `Π_n^d` over the domain.
#[derive(Clone, Debug, PartialEq)]
pub struct CubatureRule {
    pub nodes: NodeSet,
    pub weights: Vec<f64>,
    pub degree: usize,
    pub residual: f64,
    pub meta: SolverMeta,
}

impl CubatureRule {
    pub fn domain(&self) -> &Domain {
        &self.nodes.domain
    }

    /// `Σ λ_ω f(ω)`.
    pub fn apply<F: Fn(&SpherePoint) -> f64>(&self, f: F) -> f64 {
        self.nodes.points.iter().zip(&self.weights).map(|(p, w)| w * f(p)).sum()
    }
}

#[derive(Clone, Debug, PartialEq, ThisError)]
pub enum SolveError {
    /// No strictly positive exact weights were found on this node set.
    #[error("no positive cubature found (residual {residual:e}, {} zero-weight nodes)", zero_nodes.len())]
    Infeasible { residual: f64, zero_nodes: Vec<usize> },
    #[error(transparent)]
    Failed(#[from] Error),
}

fn local_points(domain: &Domain, points: &[SpherePoint]) -> Vec<SpherePoint> {
    let frame = domain.frame();
    points.iter().map(|p| frame.to_local(p)).collect()
}

/// `Σ⁻¹Vᵀ` from the SVD of the weighted reference samples, so that
/// `Σ⁻¹Vᵀ · basis` is orthonormal over the domain.
fn orthonormalising_map(domain: &Domain, space: PolySpace) -> Result<DMatrix<f64>> {
    let rule = build_rule(&RuleDomain::Domain(*domain), 2 * space.degree)?;
    let local = local_points(domain, rule.points());
    let mut b = SampledBasis::new(space, &local).matrix().clone();
    for (mut row, w) in b.row_iter_mut().zip(rule.weights()) {
        row *= w.sqrt();
    }
    let svd = b.svd(false, true);
    let vt = svd.v_t.ok_or_else(|| Error::Breakdown("singular value decomposition failed".into()))?;
    let smax = svd.singular_values.max();
    let keep: Vec<usize> =
        (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > RANK_CUTOFF * smax).collect();
    let mut t = DMatrix::zeros(keep.len(), space.dim());
    for (r, &i) in keep.iter().enumerate() {
        let s = svd.singular_values[i];
        for k in 0..space.dim() {
            t[(r, k)] = vt[(i, k)] / s;
        }
    }
    Ok(t)
}

/// Moment system in the original basis plus its orthonormalised form.
struct MomentSystem {
    /// `N × K` basis values at the nodes.
    basis: DMatrix<f64>,
    moments: DVector<f64>,
    /// `r × N` orthonormalised basis values at the nodes.
    psi: DMatrix<f64>,
    psi_moments: DVector<f64>,
}

impl MomentSystem {
    fn new(domain: &Domain, points: &[SpherePoint], degree: usize) -> Result<Self> {
        let space = PolySpace::new(domain.dim(), degree)?;
        let basis = SampledBasis::new(space, &local_points(domain, points)).matrix().clone();
        let moments = DVector::from_vec(domain_moments(domain, degree)?);
        let t = orthonormalising_map(domain, space)?;
        let psi = &t * basis.transpose();
        let psi_moments = &t * &moments;
        Ok(Self { basis, moments, psi, psi_moments })
    }

    /// `max_k |Σ_j λ_j basis_k(x_j) − m_k| / (1 + |m_k|)`.
    fn residual(&self, weights: &DVector<f64>) -> f64 {
        let q = self.basis.tr_mul(weights);
        q.iter().zip(self.moments.iter()).map(|(a, m)| (a - m).abs() / (1.0 + m.abs())).fold(0.0, f64::max)
    }
}

struct NewtonOutcome {
    v: DVector<f64>,
    iterations: usize,
    converged: bool,
}

/// `min ½‖v − 1‖²` subject to `A v = m`, `v ≥ 0`, by semismooth Newton on
/// the dual `φ(y) = ½‖(1 + Aᵀy)₊‖² − yᵀm`, whose minimiser gives
/// `v = (1 + Aᵀy)₊`.
fn dual_newton(a: &DMatrix<f64>, m: &DVector<f64>) -> Result<NewtonOutcome> {
    let r = a.nrows();
    let scale = m.amax().max(1.0);
    let primal = |y: &DVector<f64>| a.tr_mul(y).map(|z| (z + 1.0).max(0.0));
    let phi = |y: &DVector<f64>, v: &DVector<f64>| 0.5 * v.norm_squared() - y.dot(m);
    let mut y = DVector::zeros(r);
    let mut v = primal(&y);
    let mut best = f64::INFINITY;
    let mut stalled = 0;
    for it in 0..MAX_NEWTON {
        let g = a * &v - m;
        let gmax = g.amax();
        if gmax <= 1e-14 * scale {
            return Ok(NewtonOutcome { v, iterations: it, converged: true });
        }
        if gmax < 0.5 * best {
            best = gmax;
            stalled = 0;
        } else {
            stalled += 1;
            if stalled >= 4 && best <= 1e-11 * scale {
                return Ok(NewtonOutcome { v, iterations: it, converged: true });
            }
        }
        let active: Vec<usize> = (0..v.len()).filter(|&j| v[j] > 0.0).collect();
        if active.is_empty() {
            break;
        }
        let a_s = a.select_columns(&active);
        let h = &a_s * a_s.transpose();
        let mean_diag = (h.trace() / r as f64).max(1e-300);
        let mut mu = mean_diag * (1e-13 + (g.norm() / scale).min(1e-6));
        let d = loop {
            let mut hm = h.clone();
            for i in 0..r {
                hm[(i, i)] += mu;
            }
            if let Some(ch) = hm.cholesky() {
                break -ch.solve(&g);
            }
            mu *= 100.0;
            if mu > 1e6 * mean_diag {
                return Err(Error::Breakdown("Newton system is not positive definite".into()));
            }
        };
        let f0 = phi(&y, &v);
        let slope = g.dot(&d);
        if !(slope < 0.0) {
            break;
        }
        let mut t = 1.0;
        let mut accepted = false;
        while t > 1e-12 {
            let y_new = &y + &d * t;
            let v_new = primal(&y_new);
            if phi(&y_new, &v_new) <= f0 + 1e-4 * t * slope {
                y = y_new;
                v = v_new;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted || y.amax() > 1e12 {
            return Ok(NewtonOutcome { v, iterations: it + 1, converged: false });
        }
    }
    let converged = (a * &v - m).amax() <= 1e-11 * scale;
    Ok(NewtonOutcome { v, iterations: MAX_NEWTON, converged })
}

fn column_scales(nodes: &NodeSet, points: &[SpherePoint]) -> Result<Vec<f64>> {
    let raw: Vec<f64> = points.iter().map(|p| nodes.domain.delta_r(p, nodes.epsilon)).collect::<Result<_>>()?;
    let c = nodes.domain.measure() / raw.iter().sum::<f64>();
    Ok(raw.into_iter().map(|s| s * c).collect())
}

struct Attempt {
    weights: DVector<f64>,
    iterations: usize,
    converged: bool,
}

fn attempt(sys: &MomentSystem, cols: &[usize], scales: &[f64]) -> Result<Attempt> {
    let mut a = sys.psi.select_columns(cols);
    for (k, mut col) in a.column_iter_mut().enumerate() {
        col *= scales[cols[k]];
    }
    let out = dual_newton(&a, &sys.psi_moments)?;
    let mut weights = DVector::zeros(sys.basis.nrows());
    for (k, &j) in cols.iter().enumerate() {
        weights[j] = scales[j] * out.v[k];
    }
    Ok(Attempt { weights, iterations: out.iterations, converged: out.converged })
}

/// Lawson–Hanson fit on the scaled, orthonormalised system, for reporting
/// how close a failed solve came.
fn diagnose(sys: &MomentSystem, scales: &[f64], floor: f64) -> std::result::Result<SolveError, SolveError> {
    let mut a = sys.psi.clone();
    for (j, mut col) in a.column_iter_mut().enumerate() {
        col *= scales[j];
    }
    let fit = nnls(&a, &sys.psi_moments, 20 * a.nrows())?;
    let weights = DVector::from_iterator(scales.len(), fit.x.iter().zip(scales).map(|(v, s)| v * s));
    let zero_nodes = (0..weights.len()).filter(|&j| weights[j] < floor).collect();
    Ok(SolveError::Infeasible { residual: sys.residual(&weights), zero_nodes })
}

/// Strictly positive weights on `nodes` exact on `Π_degree^d` over the
/// node set's domain. Zero weights are pruned and the system solved once
/// more; persistent zeros make the set infeasible.
pub fn solve_weights(nodes: &NodeSet, degree: usize, tol: f64) -> std::result::Result<CubatureRule, SolveError> {
    if !(tol >= MIN_TOL) {
        return Err(Error::InvalidParameter(format!("tolerance must be at least {MIN_TOL:e}, got {tol}")).into());
    }
    if nodes.is_empty() {
        return Err(Error::InvalidParameter("node set is empty".into()).into());
    }
    if 2 * degree > MAX_DEGREE {
        return Err(Error::DegreeOverflow(degree).into());
    }
    let domain = nodes.domain;
    let sys = MomentSystem::new(&domain, &nodes.points, degree)?;
    let scales = column_scales(nodes, &nodes.points)?;
    let floor = POSITIVITY_FLOOR * domain.measure() / nodes.len() as f64;
    let all: Vec<usize> = (0..nodes.len()).collect();
    let mut att = attempt(&sys, &all, &scales)?;
    let mut iterations = att.iterations;
    if !att.converged && sys.residual(&att.weights) > tol {
        return Err(diagnose(&sys, &scales, floor).unwrap_or_else(|e| e));
    }
    let zeros = |w: &DVector<f64>| -> Vec<usize> { (0..w.len()).filter(|&j| w[j] < floor).collect() };
    let mut keep = all;
    let first_zeros = zeros(&att.weights);
    let pruned = first_zeros.len();
    if pruned > 0 {
        keep.retain(|j| att.weights[*j] >= floor);
        att = attempt(&sys, &keep, &scales)?;
        iterations += att.iterations;
        let residual = sys.residual(&att.weights);
        let still: Vec<usize> = keep.iter().copied().filter(|&j| att.weights[j] < floor).collect();
        if !still.is_empty() || residual > tol {
            let mut zero_nodes = first_zeros;
            zero_nodes.extend(still);
            zero_nodes.sort_unstable();
            return Err(SolveError::Infeasible { residual, zero_nodes });
        }
    }
    let residual = sys.residual(&att.weights);
    if residual > tol {
        return Err(SolveError::Infeasible { residual, zero_nodes: Vec::new() });
    }
    let points: Vec<SpherePoint> = keep.iter().map(|&j| nodes.points[j]).collect();
    let weights: Vec<f64> = keep.iter().map(|&j| att.weights[j]).collect();
    Ok(CubatureRule {
        nodes: NodeSet { points, ..nodes.clone() },
        weights,
        degree,
        residual,
        meta: SolverMeta { iterations, backoffs: 0, seed: nodes.seed, pruned },
    })
}

/// `(min_ω λ_ω / Δ_{ε}(ω), max_ω λ_ω / Δ_{ε}(ω))` with `ε` the node set's
/// separation.
pub fn weight_sharpness(rule: &CubatureRule) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (p, w) in rule.nodes.points.iter().zip(&rule.weights) {
        let r = w / rule.domain().delta_r(p, rule.nodes.epsilon)?;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok((lo, hi))
}

/// `max_k |Σ λ_j basis_k(x_j) − m_k| / (1 + |m_k|)` over `Π_probe_degree`.
pub fn verify_exactness(rule: &CubatureRule, probe_degree: usize) -> Result<f64> {
    if probe_degree > rule.degree {
        return Err(Error::InvalidParameter(format!(
            "probe degree {probe_degree} exceeds rule degree {}",
            rule.degree
        )));
    }
    let domain = rule.domain();
    let space = PolySpace::new(domain.dim(), probe_degree)?;
    let basis = SampledBasis::new(space, &local_points(domain, &rule.nodes.points));
    let q = basis.matrix().tr_mul(&DVector::from_column_slice(&rule.weights));
    let m = domain_moments(domain, probe_degree)?;
    Ok(q.iter().zip(&m).map(|(a, b)| (a - b).abs() / (1.0 + b.abs())).fold(0.0, f64::max))
}

/// Builds the maximal `(δ/n)`-separable set and solves for weights,
/// halving `δ` and regenerating on infeasibility up to `max_backoffs`
/// times.
pub fn solve_with_backoff(
    domain: &Domain,
    degree: usize,
    delta: f64,
    seed: u64,
    tol: f64,
    max_backoffs: usize,
) -> std::result::Result<CubatureRule, SolveError> {
    let mut delta = delta;
    let mut backoffs = 0;
    loop {
        let nodes = maximal_set_for(domain, degree, delta, seed)?;
        match solve_weights(&nodes, degree, tol) {
            Ok(mut rule) => {
                rule.meta.backoffs = backoffs;
                return Ok(rule);
            }
            Err(SolveError::Infeasible { .. }) if backoffs < max_backoffs => {
                backoffs += 1;
                delta /= 2.0;
            }
            Err(e) => return Err(e),
        }
    }
}
