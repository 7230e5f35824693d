//! Least-squares fits used for exponent extraction and data collapse.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Ordinary least squares `y ≈ X c` via SVD; returns coefficients and RMS residual.
pub fn linear_lstsq(design: &[Vec<f64>], y: &[f64]) -> Result<(Vec<f64>, f64)> {
    let m = y.len();
    let n = design.first().map_or(0, Vec::len);
    if m < n || n == 0 {
        return Err(Error::domain("lstsq: need at least as many rows as columns"));
    }
    let x = DMatrix::from_fn(m, n, |i, j| design[i][j]);
    let yv = DVector::from_column_slice(y);
    let svd = x.clone().svd(true, true);
    let c = svd
        .solve(&yv, 1e-14)
        .map_err(|e| Error::numerical(format!("lstsq: {e}"), (m, n)))?;
    let r = &x * &c - &yv;
    let rms = (r.norm_squared() / m as f64).sqrt();
    Ok((c.iter().copied().collect(), rms))
}

/// Straight-line fit `y = a + s x`; returns (a, s, rms residual).
pub fn line_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    let rows: Vec<Vec<f64>> = x.iter().map(|&v| vec![1.0, v]).collect();
    let (c, r) = linear_lstsq(&rows, y)?;
    Ok((c[0], c[1], r))
}

/// Levenberg–Marquardt on a residual vector with forward-difference Jacobian.
/// Returns the minimiser and the final RMS residual.
pub fn levenberg_marquardt<F>(mut resid: F, p0: &[f64], max_iter: usize) -> Result<(Vec<f64>, f64)>
where
    F: FnMut(&[f64]) -> Option<Vec<f64>>,
{
    let n = p0.len();
    let mut p = p0.to_vec();
    let mut r = resid(&p).ok_or_else(|| Error::numerical("lm: residual undefined at start", p0))?;
    let mut cost: f64 = r.iter().map(|v| v * v).sum();
    let mut lambda = 1e-3;
    for _ in 0..max_iter {
        let m = r.len();
        let mut jac = DMatrix::zeros(m, n);
        for j in 0..n {
            let h = 1e-7 * p[j].abs().max(1e-3);
            let mut q = p.clone();
            q[j] += h;
            let rq = resid(&q).ok_or_else(|| Error::numerical("lm: residual undefined", &q))?;
            for i in 0..m {
                jac[(i, j)] = (rq[i] - r[i]) / h;
            }
        }
        let rv = DVector::from_column_slice(&r);
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * &rv;
        let mut improved = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for d in 0..n {
                a[(d, d)] += lambda * jtj[(d, d)].max(1e-12);
            }
            let Some(step) = a.lu().solve(&(-&g)) else {
                lambda *= 10.0;
                continue;
            };
            let q: Vec<f64> = p.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            if let Some(rq) = resid(&q) {
                let c: f64 = rq.iter().map(|v| v * v).sum();
                if c < cost {
                    let rel = (cost - c) / cost.max(f64::MIN_POSITIVE);
                    p = q;
                    r = rq;
                    cost = c;
                    lambda = (lambda * 0.3).max(1e-12);
                    improved = true;
                    if rel < 1e-15 {
                        let rms = (cost / r.len() as f64).sqrt();
                        return Ok((p, rms));
                    }
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    let rms = (cost / r.len() as f64).sqrt();
    Ok((p, rms))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_recovers_exact_data() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.5 * v).collect();
        let (a, s, r) = line_fit(&x, &y).unwrap();
        assert!((a - 2.0).abs() < 1e-12 && (s + 0.5).abs() < 1e-12 && r < 1e-12);
    }

    #[test]
    fn lm_fits_exponential() {
        let x: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * (-1.7 * v).exp()).collect();
        let (p, r) = levenberg_marquardt(
            |p| Some(x.iter().zip(&y).map(|(xi, yi)| p[0] * (-p[1] * xi).exp() - yi).collect()),
            &[1.0, 1.0],
            200,
        )
        .unwrap();
        assert!((p[0] - 3.0).abs() < 1e-7 && (p[1] - 1.7).abs() < 1e-7, "{p:?} {r}");
    }
}
