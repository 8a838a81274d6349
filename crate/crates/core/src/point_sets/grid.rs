use std::f64::consts::PI;

use crate::geometry::{Domain, SpherePoint};

/// Polar angles of the grid rings: a uniform family in `θ` merged with a
/// family uniform in `√b` near each boundary, where the metric is
/// dominated by the `√b` term.
fn ring_angles(domain: &Domain, epsilon: f64, resolution: usize) -> Vec<f64> {
    let alpha = domain.alpha();
    let (lo, hi) = domain.polar_range();
    let len = hi - lo;
    let res = resolution.max(1) as f64;
    let k = (res * (len / (alpha * epsilon)).ceil()).max(1.0) as usize;
    let mut rings: Vec<f64> = (0..=k).map(|i| lo + len * i as f64 / k as f64).collect();
    let b_cut = len / 4.0;
    let root_cut = b_cut.sqrt();
    let j = (res * (root_cut / (epsilon * alpha.sqrt())).ceil()).max(1.0) as usize;
    let sides: &[f64] = match domain {
        Domain::Cap(_) => &[-1.0],
        Domain::Collar(_) => &[1.0, -1.0],
    };
    for i in 0..=j {
        let b = (root_cut * i as f64 / j as f64).powi(2);
        for &side in sides {
            rings.push(if side < 0.0 { hi - b } else { lo + b });
        }
    }
    rings.sort_by(|a, b| a.total_cmp(b));
    rings.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
    rings
}

/// Product grid on a domain with spacing about `epsilon / resolution` in
/// the domain metric. `phase ∈ [0, 1)` rotates each azimuthal ring by a
/// fraction of its step. The first point is the innermost ring's first
/// point (the centre, for caps).
pub fn probe_grid(domain: &Domain, epsilon: f64, resolution: usize, phase: f64) -> Vec<SpherePoint> {
    let frame = domain.frame();
    let alpha = domain.alpha();
    let res = resolution.max(1) as f64;
    let mut out = Vec::new();
    for theta in ring_angles(domain, epsilon, resolution) {
        if theta <= 0.0 {
            out.push(frame.from_polar(0.0, 0.0));
            continue;
        }
        if domain.dim() == 1 {
            out.push(frame.from_polar(theta, 0.0));
            out.push(frame.from_polar(theta, PI));
            continue;
        }
        let m = (res * (2.0 * PI * theta.sin() / (alpha * epsilon)).ceil()).max(res) as usize;
        for i in 0..m {
            let phi = 2.0 * PI * (i as f64 + phase) / m as f64;
            out.push(frame.from_polar(theta, phi));
        }
    }
    out
}
