//! Lawson–Hanson active-set nonnegative least squares.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Solution of `min ‖E x − f‖₂` subject to `x ≥ 0`.
#[derive(Clone, Debug)]
pub struct NnlsSolution {
    pub x: DVector<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
}

/// Unconstrained least squares restricted to the columns in `passive`.
fn passive_ls(e: &DMatrix<f64>, f: &DVector<f64>, passive: &[usize]) -> Result<DVector<f64>> {
    let sub = e.select_columns(passive);
    let svd = sub.svd(true, true);
    let tol = svd.singular_values.max() * 1e-13 * (e.nrows().max(passive.len()) as f64);
    svd.solve(f, tol).map_err(|m| Error::Breakdown(format!("least-squares solve failed: {m}")))
}

pub fn nnls(e: &DMatrix<f64>, f: &DVector<f64>, max_iter: usize) -> Result<NnlsSolution> {
    let n = e.ncols();
    let mut x = DVector::zeros(n);
    let mut in_p = vec![false; n];
    let mut passive: Vec<usize> = Vec::new();
    let scale = e.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
    let tol = 1e-12 * scale * f.norm().max(1.0);
    let mut iterations = 0;
    loop {
        let w = e.tr_mul(&(f - e * &x));
        let next = (0..n).filter(|&j| !in_p[j] && w[j] > tol).max_by(|&a, &b| w[a].total_cmp(&w[b]).then(b.cmp(&a)));
        let Some(j) = next else { break };
        if iterations >= max_iter {
            return Err(Error::Breakdown(format!("nonnegative least squares did not finish in {max_iter} steps")));
        }
        in_p[j] = true;
        passive.push(j);
        loop {
            iterations += 1;
            let z = passive_ls(e, f, &passive)?;
            if z.iter().all(|&v| v > 0.0) {
                for (k, &p) in passive.iter().enumerate() {
                    x[p] = z[k];
                }
                break;
            }
            let mut step = 1.0f64;
            for (k, &p) in passive.iter().enumerate() {
                if z[k] <= 0.0 {
                    let denom = x[p] - z[k];
                    if denom > 0.0 {
                        step = step.min(x[p] / denom);
                    }
                }
            }
            for (k, &p) in passive.iter().enumerate() {
                x[p] += step * (z[k] - x[p]);
            }
            let drop_tol = 1e-15 * x.amax().max(1e-300);
            passive.retain(|&p| {
                if x[p] <= drop_tol {
                    x[p] = 0.0;
                    in_p[p] = false;
                    false
                } else {
                    true
                }
            });
            if passive.is_empty() || iterations >= max_iter {
                break;
            }
        }
    }
    let residual_norm = (f - e * &x).norm();
    Ok(NnlsSolution { x, residual_norm, iterations })
}
