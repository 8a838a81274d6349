//! Orthonormal real bases of `Π_n^d`.
//!
//! Basis ordering:
//! * `d = 1`: `[1/√(2π), cos θ/√π, sin θ/√π, cos 2θ/√π, sin 2θ/√π, …]`
//!   where a circle point is `(sin θ, cos θ)`.
//! * `d = 2`: real spherical harmonics `Y_l^m`, `(l, m)` lexicographic with
//!   `m ∈ [−l, l]`, i.e. index `l² + l + m`. `m > 0` carries `cos mφ`,
//!   `m < 0` carries `sin |m|φ`, with `z = cos θ` the last coordinate.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{check_dim, map_t, map_t_global, SpherePoint};
use crate::quadrature::{build_rule, RuleDomain, MAX_DEGREE};
use crate::rng::rng_from_seed;

/// `Π_n^d`, the spherical polynomials of degree at most `n` on `S^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PolySpace {
    pub dim_sphere: usize,
    pub degree: usize,
}

impl PolySpace {
    pub fn new(dim_sphere: usize, degree: usize) -> Result<Self> {
        check_dim(dim_sphere)?;
        Ok(Self { dim_sphere, degree })
    }

    /// `2n + 1` on the circle, `(n + 1)²` on the 2-sphere.
    pub fn dim(&self) -> usize {
        match self.dim_sphere {
            1 => 2 * self.degree + 1,
            _ => (self.degree + 1) * (self.degree + 1),
        }
    }

    pub fn eval_basis(&self, x: &SpherePoint) -> Result<Vec<f64>> {
        if x.dim() != self.dim_sphere {
            return Err(Error::DimensionMismatch { expected: self.dim_sphere, got: x.dim() });
        }
        let mut out = vec![0.0; self.dim()];
        self.eval_basis_into(x.coords(), &mut out);
        Ok(out)
    }

    /// Basis values at unit vector `c` into `out` (length `self.dim()`).
    pub fn eval_basis_into(&self, c: &[f64], out: &mut [f64]) {
        match self.dim_sphere {
            1 => circle_basis(self.degree, c[0].atan2(c[1]), out),
            _ => sphere_harmonics(self.degree, c, out),
        }
    }

    /// Labels for each basis element, in basis order.
    pub fn labels(&self) -> Vec<String> {
        match self.dim_sphere {
            1 => {
                let mut v = vec!["const".to_string()];
                for k in 1..=self.degree {
                    v.push(format!("cos{k}"));
                    v.push(format!("sin{k}"));
                }
                v
            }
            _ => (0..=self.degree as i64).flat_map(|l| (-l..=l).map(move |m| format!("Y({l},{m})"))).collect(),
        }
    }

    /// Degree of the basis element at `index`.
    pub fn degree_of(&self, index: usize) -> usize {
        match self.dim_sphere {
            1 => index.div_ceil(2),
            _ => (index as f64).sqrt().floor() as usize,
        }
    }
}

fn circle_basis(n: usize, theta: f64, out: &mut [f64]) {
    let c0 = 1.0 / (2.0 * PI).sqrt();
    let ck = 1.0 / PI.sqrt();
    out[0] = c0;
    let (s1, c1) = theta.sin_cos();
    let (mut s, mut c) = (0.0, 1.0);
    for k in 1..=n {
        let cn = c * c1 - s * s1;
        let sn = s * c1 + c * s1;
        c = cn;
        s = sn;
        out[2 * k - 1] = ck * c;
        out[2 * k] = ck * s;
    }
}

/// Derivative in `θ` of every basis element of the circle space.
pub(crate) fn circle_basis_derivative(n: usize, theta: f64, out: &mut [f64]) {
    let ck = 1.0 / PI.sqrt();
    out[0] = 0.0;
    for k in 1..=n {
        let (s, c) = (k as f64 * theta).sin_cos();
        out[2 * k - 1] = -ck * k as f64 * s;
        out[2 * k] = ck * k as f64 * c;
    }
}

/// Real orthonormal spherical harmonics through degree `n` via the fully
/// normalised associated-Legendre recurrences.
fn sphere_harmonics(n: usize, c: &[f64], out: &mut [f64]) {
    let z = c[2].clamp(-1.0, 1.0);
    let s = c[0].hypot(c[1]);
    let (cphi, sphi) = if s > 0.0 { (c[0] / s, c[1] / s) } else { (1.0, 0.0) };
    let sqrt2 = std::f64::consts::SQRT_2;
    // P̄_m^m, updated as m increases.
    let mut pmm = 1.0 / (4.0 * PI).sqrt();
    let (mut cm, mut sm) = (1.0, 0.0);
    for m in 0..=n {
        if m > 0 {
            let mf = m as f64;
            pmm *= ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s;
            let cn = cm * cphi - sm * sphi;
            let sn = sm * cphi + cm * sphi;
            cm = cn;
            sm = sn;
        }
        let mut emit = |l: usize, p: f64| {
            let base = l * l + l;
            if m == 0 {
                out[base] = p;
            } else {
                out[base + m] = sqrt2 * p * cm;
                out[base - m] = sqrt2 * p * sm;
            }
        };
        emit(m, pmm);
        if m == n {
            break;
        }
        let mf = m as f64;
        let mut p_prev = pmm;
        let mut p = (2.0 * mf + 3.0).sqrt() * z * pmm;
        emit(m + 1, p);
        for l in (m + 2)..=n {
            let lf = l as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let l1 = lf - 1.0;
            let b = ((l1 * l1 - mf * mf) / (4.0 * l1 * l1 - 1.0)).sqrt();
            let next = a * (z * p - b * p_prev);
            p_prev = p;
            p = next;
            emit(l, p);
        }
    }
}

/// An element of `Π_n^d` in the orthonormal basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyCoeffs {
    pub space: PolySpace,
    pub coeffs: Vec<f64>,
}

impl PolyCoeffs {
    pub fn new(space: PolySpace, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != space.dim() {
            return Err(Error::InvalidParameter(format!(
                "expected {} coefficients, got {}",
                space.dim(),
                coeffs.len()
            )));
        }
        Ok(Self { space, coeffs })
    }

    pub fn zero(space: PolySpace) -> Self {
        Self { space, coeffs: vec![0.0; space.dim()] }
    }

    /// Unit coefficient on basis element `index`.
    pub fn unit(space: PolySpace, index: usize) -> Self {
        let mut p = Self::zero(space);
        p.coeffs[index] = 1.0;
        p
    }
}

/// `Σ_k c_k · basis_k(x)`.
pub fn eval_poly(p: &PolyCoeffs, x: &SpherePoint) -> Result<f64> {
    let b = p.space.eval_basis(x)?;
    Ok(b.iter().zip(&p.coeffs).map(|(a, c)| a * c).sum())
}

/// Coefficients i.i.d. standard normal from a seeded ChaCha stream.
pub fn random_polynomial(space: PolySpace, seed: u64) -> PolyCoeffs {
    let mut rng = rng_from_seed(seed);
    let coeffs = (0..space.dim()).map(|_| StandardNormal.sample(&mut rng)).collect();
    PolyCoeffs { space, coeffs }
}

/// Least-squares projection of `f` onto `space`, using a full-sphere rule
/// exact to degree `2n + 2`. The residual is the relative `L²(S^d)` error
/// `‖f − Pf‖ / ‖f‖` (zero when `f` vanishes).
pub fn project_onto<F: Fn(&SpherePoint) -> f64 + Sync>(space: PolySpace, f: F) -> Result<(PolyCoeffs, f64)> {
    let target = 2 * space.degree + 2;
    if target > MAX_DEGREE {
        return Err(Error::DegreeOverflow(target));
    }
    let rule = build_rule(&RuleDomain::Sphere { dim: space.dim_sphere }, target)?;
    let basis = SampledBasis::new(space, rule.points());
    let values: Vec<f64> = rule.points().par_iter().map(&f).collect();
    let wv = DVector::from_iterator(values.len(), values.iter().zip(rule.weights()).map(|(v, w)| v * w));
    let coeffs = basis.matrix().tr_mul(&wv);
    let proj = basis.matrix() * &coeffs;
    let (mut num, mut den) = (0.0, 0.0);
    for ((v, q), w) in values.iter().zip(proj.iter()).zip(rule.weights()) {
        num += w * (v - q).powi(2);
        den += w * v * v;
    }
    let residual = if den > 0.0 { (num / den).sqrt() } else { 0.0 };
    Ok((PolyCoeffs { space, coeffs: coeffs.iter().copied().collect() }, residual))
}

/// `x ↦ p(T x)` for the polar dilation about `e`.
#[derive(Clone, Debug)]
pub struct ComposedWithT {
    poly: PolyCoeffs,
    center: SpherePoint,
}

impl ComposedWithT {
    /// Value at `x`, defined for `d(x, e) ≤ π/8`.
    pub fn eval(&self, x: &SpherePoint) -> Result<f64> {
        eval_poly(&self.poly, &map_t(x, &self.center)?)
    }

    /// Value at `x` with `T` extended to the whole sphere.
    pub fn eval_unrestricted(&self, x: &SpherePoint) -> Result<f64> {
        eval_poly(&self.poly, &map_t_global(x, &self.center))
    }
}

pub fn compose_with_t(p: &PolyCoeffs, e: &SpherePoint) -> Result<ComposedWithT> {
    if e.dim() != p.space.dim_sphere {
        return Err(Error::DimensionMismatch { expected: p.space.dim_sphere, got: e.dim() });
    }
    Ok(ComposedWithT { poly: p.clone(), center: *e })
}

/// Basis values at a fixed point list: row `i` holds the basis at point `i`.
#[derive(Clone, Debug)]
pub struct SampledBasis {
    space: PolySpace,
    matrix: DMatrix<f64>,
}

impl SampledBasis {
    pub fn new(space: PolySpace, points: &[SpherePoint]) -> Self {
        let dim = space.dim();
        let mut rows = vec![0.0; points.len() * dim];
        rows.par_chunks_mut(dim).zip(points.par_iter()).for_each(|(row, p)| {
            space.eval_basis_into(p.coords(), row);
        });
        Self { space, matrix: DMatrix::from_row_slice(points.len(), dim, &rows) }
    }

    pub fn space(&self) -> PolySpace {
        self.space
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Polynomial values at every sampled point.
    pub fn values(&self, coeffs: &[f64]) -> DVector<f64> {
        &self.matrix * DVector::from_column_slice(coeffs)
    }

    /// Values of several polynomials at once: column `j` of the result holds
    /// polynomial `j` (column `j` of `coeffs`).
    pub fn values_many(&self, coeffs: &DMatrix<f64>) -> DMatrix<f64> {
        &self.matrix * coeffs
    }
}
