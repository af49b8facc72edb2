use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Nodes and weights of an `n`-point Gauss–Hermite rule for `∫ f(x) e^(−x²) dx`.
#[derive(Clone, Debug)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

const RESCALE: f64 = 1e200;

/// Normalized Hermite function recurrence at `x` without the Gaussian factor.
/// Returns `(h_n, h_n')` up to a common positive scale and the log of that scale.
fn hermite(n: usize, x: f64, a: &[f64], b: &[f64]) -> (f64, f64, f64) {
    let (mut p1, mut p2) = (PI.powf(-0.25), 0.0);
    let mut log_scale = 0.0;
    for j in 0..n {
        let p3 = p2;
        p2 = p1;
        p1 = x * a[j] * p2 - b[j] * p3;
        if p1.abs() > RESCALE {
            p1 /= RESCALE;
            p2 /= RESCALE;
            log_scale += RESCALE.ln();
        }
    }
    (p1, (2.0 * n as f64).sqrt() * p2, log_scale)
}

/// Roots are bracketed by a sign scan finer than the smallest root spacing and
/// polished by safeguarded Newton steps. The recurrence is rescaled whenever it
/// grows past `RESCALE`, so weights of outer nodes underflow instead of
/// overflowing.
pub fn gauss_hermite(n: usize) -> GaussHermite {
    let a: Vec<f64> = (0..n).map(|j| (2.0 / (j as f64 + 1.0)).sqrt()).collect();
    let b: Vec<f64> = (0..n)
        .map(|j| (j as f64 / (j as f64 + 1.0)).sqrt())
        .collect();
    let weight = |pp: f64, log_scale: f64| (2.0f64.ln() - 2.0 * (pp.abs().ln() + log_scale)).exp();

    let mut positive = Vec::with_capacity(n / 2 + 1);
    let upper = (2.0 * n as f64 + 1.0).sqrt() + 1.0;
    let step = 0.25 * PI / (2.0 * n as f64 + 1.0).sqrt();
    let mut lo = if n % 2 == 1 { 0.5 * step } else { 0.0 };
    let mut f_lo = hermite(n, lo, &a, &b).0;
    while lo < upper && positive.len() < n / 2 {
        let hi = lo + step;
        let f_hi = hermite(n, hi, &a, &b).0;
        if f_lo.signum() != f_hi.signum() {
            let (mut l, mut h) = (lo, hi);
            let mut fl = f_lo;
            let mut z = 0.5 * (l + h);
            for _ in 0..200 {
                let (p, dp, _) = hermite(n, z, &a, &b);
                if p.signum() == fl.signum() {
                    l = z;
                    fl = p;
                } else {
                    h = z;
                }
                let newton = z - p / dp;
                let next = if newton > l && newton < h {
                    newton
                } else {
                    0.5 * (l + h)
                };
                if (next - z).abs() <= 1e-15 * z.abs().max(1.0) || h - l <= 1e-15 * z.abs().max(1.0)
                {
                    z = next;
                    break;
                }
                z = next;
            }
            let (_, pp, ls) = hermite(n, z, &a, &b);
            positive.push((z, weight(pp, ls)));
        }
        lo = hi;
        f_lo = f_hi;
    }

    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for &(z, w) in positive.iter().rev() {
        nodes.push(z);
        weights.push(w);
    }
    if n % 2 == 1 {
        let (_, pp, ls) = hermite(n, 0.0, &a, &b);
        nodes.push(0.0);
        weights.push(weight(pp, ls));
    }
    for &(z, w) in &positive {
        nodes.push(-z);
        weights.push(w);
    }
    GaussHermite { nodes, weights }
}

impl GaussHermite {
    /// `E[f(X)]` for `X ~ N(mean, variance)`.
    pub fn expectation(&self, f: impl Fn(f64) -> f64, mean: f64, variance: f64) -> f64 {
        let s = (2.0 * variance).sqrt();
        let total: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mean + s * x))
            .sum();
        total / PI.sqrt()
    }
}

/// `E[f(X)]` for a normal variable, doubling the rule order from 64 up to 4096
/// until successive orders agree to `tol` relative.
pub fn gaussian_expectation(
    f: impl Fn(f64) -> f64,
    mean: f64,
    variance: f64,
    tol: f64,
) -> Result<f64> {
    if !(variance > 0.0) || !variance.is_finite() || !mean.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "need finite mean and positive variance, got {mean}, {variance}"
        )));
    }
    let mut n = 64;
    let mut prev = gauss_hermite(n).expectation(&f, mean, variance);
    while n < 4096 {
        n *= 2;
        let cur = gauss_hermite(n).expectation(&f, mean, variance);
        if (cur - prev).abs() <= tol * cur.abs().max(f64::MIN_POSITIVE) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::QuadratureFailure(format!(
        "no agreement to {tol:e} between orders {} and {n}",
        n / 2
    )))
}
