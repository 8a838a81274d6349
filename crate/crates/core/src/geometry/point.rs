use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if dim == 1 || dim == 2 {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(dim))
    }
}

/// A unit vector in `R^{d+1}`, `d ∈ {1, 2}`.
///
/// Coordinates are renormalised on construction. For `d = 1` the third slot
/// of the backing array is always zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SpherePoint {
    dim: usize,
    c: [f64; 3],
}

impl SpherePoint {
    pub fn new(coords: &[f64]) -> Result<Self> {
        let dim = coords.len().wrapping_sub(1);
        check_dim(dim)?;
        let mut c = [0.0; 3];
        c[..coords.len()].copy_from_slice(coords);
        Self::from_array(dim, c)
    }

    pub(crate) fn from_array(dim: usize, mut c: [f64; 3]) -> Result<Self> {
        let norm = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::DegenerateVector);
        }
        for v in &mut c {
            *v /= norm;
        }
        if dim == 1 {
            c[2] = 0.0;
        }
        Ok(Self { dim, c })
    }

    /// Unchecked constructor for coordinates that are already unit length.
    pub(crate) fn raw(dim: usize, c: [f64; 3]) -> Self {
        Self { dim, c }
    }

    /// `(0, …, 0, 1)`.
    pub fn north_pole(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let mut c = [0.0; 3];
        c[dim] = 1.0;
        Ok(Self { dim, c })
    }

    /// Point at polar angle `theta` from the north pole and azimuth `phi`.
    /// For `d = 1` the azimuth only contributes its sign through `cos phi`,
    /// so `phi = 0` gives `(sin θ, cos θ)` and `phi = π` gives `(-sin θ, cos θ)`.
    pub fn from_polar(dim: usize, theta: f64, phi: f64) -> Result<Self> {
        check_dim(dim)?;
        let (st, ct) = theta.sin_cos();
        let c = match dim {
            1 => [st * phi.cos().signum(), ct, 0.0],
            _ => [st * phi.cos(), st * phi.sin(), ct],
        };
        Self::from_array(dim, c)
    }

    /// Point `(sin s, cos s)` on the circle at signed angle `s` from the north pole.
    pub fn from_angle(s: f64) -> Self {
        let (ss, cs) = s.sin_cos();
        Self { dim: 1, c: [ss, cs, 0.0] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.c[..=self.dim]
    }

    pub(crate) fn array(&self) -> &[f64; 3] {
        &self.c
    }

    pub fn antipode(&self) -> Self {
        Self { dim: self.dim, c: [-self.c[0], -self.c[1], -self.c[2]] }
    }

    pub fn dot(&self, other: &Self) -> f64 {
        dot3(&self.c, &other.c)
    }

    pub(crate) fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim, got: other.dim })
        }
    }

    /// Euclidean (chordal) distance `|x − y|` in `R^{d+1}`.
    pub fn chordal(&self, other: &Self) -> f64 {
        chord2(&self.c, &other.c).sqrt()
    }
}

impl TryFrom<Vec<f64>> for SpherePoint {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(&v)
    }
}

impl From<SpherePoint> for Vec<f64> {
    fn from(p: SpherePoint) -> Self {
        p.coords().to_vec()
    }
}

#[inline]
pub(crate) fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub(crate) fn chord2(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let d0 = a[0] - b[0];
    let d1 = a[1] - b[1];
    let d2 = a[2] - b[2];
    d0 * d0 + d1 * d1 + d2 * d2
}

/// Angle between two unit vectors, `atan2(|a × b|, a · b)`.
///
/// Agrees with `arccos(a · b)` but keeps full relative accuracy for nearly
/// coincident and nearly antipodal pairs. Exactly symmetric in its arguments.
#[inline]
pub(crate) fn angle3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let x0 = a[1] * b[2] - a[2] * b[1];
    let x1 = a[2] * b[0] - a[0] * b[2];
    let x2 = a[0] * b[1] - a[1] * b[0];
    let cross = (x0 * x0 + x1 * x1 + x2 * x2).sqrt();
    cross.atan2(dot3(a, b))
}

/// Orthogonal change of coordinates taking a centre `e` to the north pole.
///
/// The Householder reflection `H = I − 2vvᵀ/|v|²` with `v = e − n` swaps `e`
/// and `n`; it is symmetric and its own inverse, so the same map converts
/// in both directions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame {
    dim: usize,
    v: [f64; 3],
    scale: f64,
}

impl Frame {
    pub fn new(center: &SpherePoint) -> Self {
        let dim = center.dim;
        let mut v = center.c;
        v[dim] -= 1.0;
        let nv = dot3(&v, &v);
        let scale = if nv < 1e-30 { 0.0 } else { 2.0 / nv };
        Self { dim, v, scale }
    }

    fn apply(&self, c: &[f64; 3]) -> [f64; 3] {
        if self.scale == 0.0 {
            return *c;
        }
        let s = self.scale * dot3(&self.v, c);
        let mut out = [c[0] - s * self.v[0], c[1] - s * self.v[1], c[2] - s * self.v[2]];
        if self.dim == 1 {
            out[2] = 0.0;
        }
        out
    }

    /// Global coordinates → frame coordinates (centre at the north pole).
    pub fn to_local(&self, x: &SpherePoint) -> SpherePoint {
        SpherePoint::raw(self.dim, self.apply(&x.c))
    }

    /// Frame coordinates → global coordinates.
    pub fn to_global(&self, x: &SpherePoint) -> SpherePoint {
        SpherePoint::raw(self.dim, self.apply(&x.c))
    }

    /// Polar coordinates `(θ, φ)` of `x` about the frame centre. For `d = 1`,
    /// `φ ∈ {0, π}` records the side. At `θ = 0` the azimuth is reported as 0.
    pub fn polar(&self, x: &SpherePoint) -> (f64, f64) {
        let l = self.apply(&x.c);
        match self.dim {
            1 => {
                let s = l[0].atan2(l[1]);
                if s < 0.0 {
                    (-s, std::f64::consts::PI)
                } else {
                    (s, 0.0)
                }
            }
            _ => {
                let rho = l[0].hypot(l[1]);
                let theta = rho.atan2(l[2]);
                let phi = if rho == 0.0 { 0.0 } else { l[1].atan2(l[0]) };
                (theta, phi)
            }
        }
    }

    /// Signed angle of a circle point from the frame centre (`d = 1` only).
    pub fn signed_angle(&self, x: &SpherePoint) -> f64 {
        let l = self.apply(&x.c);
        l[0].atan2(l[1])
    }

    pub fn from_polar(&self, theta: f64, phi: f64) -> SpherePoint {
        let (st, ct) = theta.sin_cos();
        let c = match self.dim {
            1 => [st * phi.cos().signum(), ct, 0.0],
            _ => [st * phi.cos(), st * phi.sin(), ct],
        };
        SpherePoint::raw(self.dim, self.apply(&c))
    }

    /// Unit direction `ξ ⊥ e` with `x = e cos θ + ξ sin θ`, in frame
    /// coordinates. At `θ = 0` the fixed vector `(1, 0, …)` is returned.
    pub fn perpendicular(&self, x: &SpherePoint) -> [f64; 3] {
        let l = self.apply(&x.c);
        let r = l[0].hypot(l[1]);
        if r < 1e-300 {
            [1.0, 0.0, 0.0]
        } else {
            [l[0] / r, l[1] / r, 0.0]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_normalises() {
        let p = SpherePoint::new(&[3.0, 0.0, 4.0]).unwrap();
        assert!((p.coords()[0] - 0.6).abs() < 1e-15);
        assert!((p.coords()[2] - 0.8).abs() < 1e-15);
        assert!(SpherePoint::new(&[0.0, 0.0]).is_err());
        assert!(SpherePoint::new(&[1.0, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn frame_maps_center_to_pole_and_back() {
        let e = SpherePoint::new(&[0.3, -0.4, 0.5]).unwrap();
        let f = Frame::new(&e);
        let l = f.to_local(&e);
        assert!((l.coords()[2] - 1.0).abs() < 1e-14);
        let x = SpherePoint::new(&[-0.1, 0.7, 0.2]).unwrap();
        let back = f.to_global(&f.to_local(&x));
        for (a, b) in back.coords().iter().zip(x.coords()) {
            assert!((a - b).abs() < 1e-14);
        }
        let (theta, _) = f.polar(&x);
        assert!((theta - x.dot(&e).acos()).abs() < 1e-12);
    }

    #[test]
    fn frame_at_north_pole_is_identity() {
        let n = SpherePoint::north_pole(2).unwrap();
        let f = Frame::new(&n);
        let x = SpherePoint::new(&[0.1, 0.2, 0.9]).unwrap();
        assert_eq!(f.to_local(&x), x);
    }

    #[test]
    fn circle_polar_and_signed_angle() {
        let e = SpherePoint::from_angle(0.7);
        let f = Frame::new(&e);
        let x = SpherePoint::from_angle(0.2);
        assert!((f.signed_angle(&x).abs() - 0.5).abs() < 1e-14);
        let (t, _) = f.polar(&x);
        assert!((t - 0.5).abs() < 1e-14);
        let y = f.from_polar(0.3, 0.0);
        assert!((angle3(y.array(), e.array()) - 0.3).abs() < 1e-14);
    }

    #[test]
    fn angle_is_accurate_for_close_points() {
        let a = SpherePoint::from_polar(2, 1e-9, 0.0).unwrap();
        let n = SpherePoint::north_pole(2).unwrap();
        assert!((angle3(a.array(), n.array()) - 1e-9).abs() < 1e-22);
    }
}
