//! Gauss–Legendre nodes and weights on `[−1, 1]`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes (ascending) and weights of an `n`-point Gauss–Legendre rule.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn compute(n: usize) -> GaussLegendre {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        // Tricomi's initial guess for the i-th largest root.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    GaussLegendre { nodes, weights }
}

/// Cached `n`-point rule, `n ≥ 1`.
pub fn gauss_legendre(n: usize) -> Arc<GaussLegendre> {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().expect("gauss cache poisoned").get(&n) {
        return Arc::clone(r);
    }
    let rule = Arc::new(compute(n));
    cache.lock().expect("gauss cache poisoned").entry(n).or_insert(rule).clone()
}

/// `∫_a^b f` by composite Gauss–Legendre panels, doubling the panel count
/// until two successive estimates differ by less than `tol · |estimate|`.
pub fn integrate_interval<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> crate::Result<f64> {
    const ORDER: usize = 10;
    const MAX_PANELS: usize = 1 << 15;
    let gl = gauss_legendre(ORDER);
    let composite = |panels: usize| -> f64 {
        let h = (b - a) / panels as f64;
        let mut total = 0.0;
        for k in 0..panels {
            let m = a + (k as f64 + 0.5) * h;
            let mut s = 0.0;
            for (x, w) in gl.nodes.iter().zip(&gl.weights) {
                s += w * f(m + 0.5 * h * x);
            }
            total += 0.5 * h * s;
        }
        total
    };
    let mut panels = 1;
    let mut prev = composite(panels);
    while panels < MAX_PANELS {
        panels *= 2;
        let cur = composite(panels);
        if (cur - prev).abs() <= tol * cur.abs() {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(crate::Error::NonConvergence { previous: prev, last: composite(panels) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_inside_and_weights_positive() {
        for n in [1, 2, 5, 16, 63, 200, 1024] {
            let r = gauss_legendre(n);
            assert!(r.nodes.iter().all(|x| x.abs() < 1.0));
            assert!(r.weights.iter().all(|&w| w > 0.0));
            let total: f64 = r.weights.iter().sum();
            assert!((total - 2.0).abs() < 1e-13, "n {n}: {total}");
            assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn exact_for_degree_2n_minus_1() {
        for n in [1, 3, 8, 20] {
            let r = gauss_legendre(n);
            for k in 0..(2 * n) {
                let got: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(k as i32)).sum();
                let want = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                assert!((got - want).abs() < 1e-14, "n {n} k {k}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn known_three_point_rule() {
        let r = gauss_legendre(3);
        assert!((r.nodes[2] - (0.6f64).sqrt()).abs() < 1e-15);
        assert!((r.weights[1] - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn composite_handles_kinks() {
        let v = integrate_interval(|x: f64| x.abs(), -1.0, 0.7, 1e-10).unwrap();
        assert!((v - (0.5 + 0.245)).abs() < 1e-9);
        let s = integrate_interval(|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12).unwrap();
        assert!((s - 2.0).abs() < 1e-12);
    }
}
