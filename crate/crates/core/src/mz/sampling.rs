//! Deterministic low-discrepancy samples in domains and metric balls.

use std::f64::consts::PI;

use crate::geometry::{BallWindow, Domain, RhoBall, SpherePoint, BALL_TOL};

/// Additive recurrence constants of the R2 sequence (inverse powers of the
/// plastic number) and the golden-ratio sequence.
const R2_A: f64 = 0.754_877_666_246_692_8;
const R2_B: f64 = 0.569_840_290_998_053_3;
const GOLDEN: f64 = 0.618_033_988_749_894_9;

fn r2(k: usize) -> (f64, f64) {
    let k = k as f64;
    ((0.5 + R2_A * k).fract(), (0.5 + R2_B * k).fract())
}

fn golden(k: usize) -> f64 {
    (0.5 + GOLDEN * k as f64).fract()
}

/// `count` points spread area-uniformly over the domain.
pub(crate) fn domain_samples(domain: &Domain, count: usize) -> Vec<SpherePoint> {
    let frame = domain.frame();
    let (lo, hi) = domain.polar_range();
    (0..count)
        .map(|k| {
            if domain.dim() == 1 {
                let u = golden(k);
                let s = lo + (hi - lo) * (2.0 * u - 1.0).abs();
                frame.from_polar(s, if u < 0.5 { PI } else { 0.0 })
            } else {
                let (u, v) = r2(k);
                let (c_lo, c_hi) = (hi.cos(), lo.cos());
                let t = (c_lo + (c_hi - c_lo) * u).clamp(-1.0, 1.0).acos();
                frame.from_polar(t, 2.0 * PI * v)
            }
        })
        .collect()
}

/// The centre of `ball` followed by up to `count` accepted quasi-random
/// points of the ball.
pub(crate) fn ball_samples(ball: &RhoBall, count: usize) -> Vec<SpherePoint> {
    let dom = ball.domain();
    let frame = dom.frame();
    let centre = dom.site_unchecked(ball.center());
    let limit = ball.radius() + BALL_TOL;
    let (lo, hi) = dom.polar_range();
    let mut out = vec![*ball.center()];
    let max_attempts = count * 64;
    let window = ball.window();
    let mut k = 0;
    while out.len() <= count && k < max_attempts {
        k += 1;
        let p = match window {
            BallWindow::Arc { lo: a, hi: b } => {
                if b <= a {
                    break;
                }
                frame.to_global(&SpherePoint::from_angle(a + (b - a) * golden(k)))
            }
            BallWindow::Patch { t_lo, t_hi, phi_lo, phi_width } => {
                if t_hi <= t_lo {
                    break;
                }
                let (u, v) = r2(k);
                let (c_lo, c_hi) = (t_hi.cos(), t_lo.cos());
                let t = (c_lo + (c_hi - c_lo) * u).clamp(-1.0, 1.0).acos();
                frame.from_polar(t, phi_lo + phi_width * v)
            }
        };
        let (theta, _) = frame.polar(&p);
        if theta < lo - 1e-14 || theta > hi + 1e-14 {
            continue;
        }
        let s = dom.site_unchecked(&p);
        if dom.site_metric(&centre, &s) <= limit {
            out.push(p);
        }
    }
    out
}
