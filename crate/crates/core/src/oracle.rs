//! Exact quantum reference: evolution under `√(p̂² + q̂² + m²)` in the
//! harmonic-oscillator Fock basis, and exact Gaussian wave-packet evolution
//! under `√(p̂² + m²)` for the free particle.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::gaussian_expectation;
use crate::reduction::ReducedState;

/// Truncated coefficient sequence `c₀ … c_N`, stored as moduli and phases so
/// that evolution leaves the moduli untouched.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    modulus: Vec<f64>,
    phase: Vec<f64>,
    hbar: f64,
    m: f64,
}

/// Required normalization accuracy and tail weight.
pub const NORM_TOL: f64 = 1e-12;

impl FockVector {
    /// Validates normalization and that the last ten levels are empty to `1e-12`.
    pub fn new(coeffs: Vec<Complex64>, hbar: f64, m: f64) -> Result<Self> {
        if !(hbar > 0.0) || !(m >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need hbar > 0 and m >= 0, got {hbar}, {m}"
            )));
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("empty coefficient sequence".into()));
        }
        let f = Self {
            modulus: coeffs.iter().map(|c| c.norm()).collect(),
            phase: coeffs.iter().map(|c| c.arg()).collect(),
            hbar,
            m,
        };
        let norm = f.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter(format!(
                "coefficients not normalized: Σ|c|² = {norm}"
            )));
        }
        if f.tail_weight(10) > NORM_TOL {
            return Err(Error::InvalidParameter(format!(
                "cutoff too small: tail weight {:e}",
                f.tail_weight(10)
            )));
        }
        Ok(f)
    }

    pub fn coeffs(&self) -> Vec<Complex64> {
        self.modulus
            .iter()
            .zip(&self.phase)
            .map(|(&r, &th)| Complex64::from_polar(r, th))
            .collect()
    }

    pub fn cutoff(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.m
    }

    pub fn norm_sqr(&self) -> f64 {
        self.modulus.iter().map(|r| r * r).sum()
    }

    /// `Σ_{n > N − k} |cₙ|²`.
    pub fn tail_weight(&self, k: usize) -> f64 {
        let start = self.modulus.len().saturating_sub(k);
        self.modulus[start..].iter().map(|r| r * r).sum()
    }

    /// `Σ |cₙ|² λₙ`, conserved by the evolution.
    pub fn energy_expectation(&self) -> f64 {
        self.modulus
            .iter()
            .enumerate()
            .map(|(n, r)| r * r * sqrt_eigenvalue(n, self.hbar, self.m))
            .sum()
    }
}

/// `λₙ = √(2(n + ½)ħ + m²)`.
pub fn sqrt_eigenvalue(n: usize, hbar: f64, m: f64) -> f64 {
    (2.0 * (n as f64 + 0.5) * hbar + m * m).sqrt()
}

/// Smallest cutoff for a coherent state with amplitude `|α|`.
fn default_cutoff(alpha: f64) -> usize {
    (alpha * alpha + 10.0 * alpha + 20.0).ceil() as usize
}

/// Coherent-state coefficients `e^(−|α|²/2) αⁿ/√(n!)`, built from the ratio of
/// neighbouring terms so that no factorial is formed.
pub fn coherent(alpha: Complex64, hbar: f64, m: f64) -> Result<FockVector> {
    let mut n = default_cutoff(alpha.norm());
    loop {
        let coeffs = coherent_coefficients(alpha, n);
        let tail: f64 = coeffs[coeffs.len().saturating_sub(10)..]
            .iter()
            .map(|c| c.norm_sqr())
            .sum();
        if tail <= NORM_TOL * 1e-2 || n > 1_000_000 {
            return FockVector::new(coeffs, hbar, m);
        }
        n += n / 2 + 10;
    }
}

/// Coherent state with an explicit cutoff.
pub fn coherent_with_cutoff(
    alpha: Complex64,
    hbar: f64,
    m: f64,
    cutoff: usize,
) -> Result<FockVector> {
    FockVector::new(coherent_coefficients(alpha, cutoff), hbar, m)
}

fn coherent_coefficients(alpha: Complex64, cutoff: usize) -> Vec<Complex64> {
    let r = alpha.norm();
    let phase = alpha.arg();
    let mut modulus = vec![0.0; cutoff + 1];
    if r == 0.0 {
        modulus[0] = 1.0;
    } else {
        // ratio recurrence |c_{n+1}/c_n| = |α|/√(n+1), anchored at the mode
        let mode = ((r * r).floor() as usize).min(cutoff);
        modulus[mode] = 1.0;
        for n in (0..mode).rev() {
            modulus[n] = modulus[n + 1] * ((n + 1) as f64).sqrt() / r;
        }
        for n in mode..cutoff {
            modulus[n + 1] = modulus[n] * r / ((n + 1) as f64).sqrt();
        }
        let norm = modulus.iter().map(|x| x * x).sum::<f64>().sqrt();
        modulus.iter_mut().for_each(|x| *x /= norm);
    }
    modulus
        .iter()
        .enumerate()
        .map(|(n, &m)| Complex64::from_polar(m, n as f64 * phase))
        .collect()
}

/// Multiplies each `cₙ` by `exp(−iλₙt/ħ)`.
pub fn evolve(f: &FockVector, t: f64) -> FockVector {
    let phase = f
        .phase
        .iter()
        .enumerate()
        .map(|(n, th)| th - sqrt_eigenvalue(n, f.hbar, f.m) * t / f.hbar)
        .collect();
    FockVector {
        modulus: f.modulus.clone(),
        phase,
        hbar: f.hbar,
        m: f.m,
    }
}

/// Expectation values and central, Weyl-symmetrized second moments of `q̂, p̂`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Observables {
    pub q: f64,
    pub p: f64,
    pub dq2: f64,
    pub dqp: f64,
    pub dp2: f64,
}

impl Observables {
    pub fn to_reduced(&self, t: f64) -> ReducedState {
        ReducedState {
            t,
            q: self.q,
            p: self.p,
            dq2: self.dq2,
            dqp: self.dqp,
            dp2: self.dp2,
        }
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.q, self.p, self.dq2, self.dqp, self.dp2]
    }

    fn from_raw(hbar: f64, norm: f64, a1: Complex64, a2: Complex64, number: f64) -> Self {
        let q = (2.0 * hbar).sqrt() * a1.re;
        let p = (2.0 * hbar).sqrt() * a1.im;
        let q2 = 0.5 * hbar * (2.0 * a2.re + 2.0 * number + norm);
        let p2 = 0.5 * hbar * (2.0 * number + norm - 2.0 * a2.re);
        let qp = hbar * a2.im;
        Self {
            q,
            p,
            dq2: q2 - q * q,
            dqp: qp - q * p,
            dp2: p2 - p * p,
        }
    }
}

/// Observables from the ladder-operator sums `⟨a⟩`, `⟨a²⟩` and `⟨a*a⟩`.
pub fn observables(f: &FockVector) -> Observables {
    let c = &f.coeffs();
    let mut a1 = Complex64::new(0.0, 0.0);
    let mut a2 = Complex64::new(0.0, 0.0);
    let mut number = 0.0;
    for n in 0..c.len() {
        let nf = n as f64;
        number += nf * c[n].norm_sqr();
        if n + 1 < c.len() {
            a1 += (nf + 1.0).sqrt() * c[n].conj() * c[n + 1];
        }
        if n + 2 < c.len() {
            a2 += ((nf + 1.0) * (nf + 2.0)).sqrt() * c[n].conj() * c[n + 2];
        }
    }
    Observables::from_raw(f.hbar, f.norm_sqr(), a1, a2, number)
}

/// Observables from dense matrices of `q̂` and `p̂` on a basis padded by `pad`
/// levels beyond the cutoff.
pub fn observables_dense(f: &FockVector, pad: usize) -> Observables {
    let coeffs = f.coeffs();
    let dim = coeffs.len() + pad.max(2);
    let mut a = DMatrix::<Complex64>::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    let ad = a.adjoint();
    let s = (0.5 * f.hbar).sqrt();
    let q = (&ad + &a) * Complex64::new(s, 0.0);
    let p = (&ad - &a) * Complex64::new(0.0, s);
    let mut psi = DVector::<Complex64>::zeros(dim);
    for (n, c) in coeffs.iter().enumerate() {
        psi[n] = *c;
    }
    let expect = |op: &DMatrix<Complex64>| psi.dotc(&(op * &psi));
    let qm = expect(&q).re;
    let pm = expect(&p).re;
    let q2 = expect(&(&q * &q)).re;
    let p2 = expect(&(&p * &p)).re;
    let sym = (&q * &p + &p * &q) * Complex64::new(0.5, 0.0);
    let qp = expect(&sym).re;
    Observables {
        q: qm,
        p: pm,
        dq2: q2 - qm * qm,
        dqp: qp - qm * pm,
        dp2: p2 - pm * pm,
    }
}

/// Distance of `f` from the coherent form: `α̂ = c₁/c₀` is fitted and the
/// coefficients compared with `c₀ α̂ⁿ/√(n!)`.
pub fn coherence_residual(f: &FockVector) -> f64 {
    let c = &f.coeffs();
    if c.len() < 2 || c[0].norm() == 0.0 {
        return f64::INFINITY;
    }
    let alpha = c[1] / c[0];
    let mut model = c[0];
    let mut sum = (c[0] - model).norm_sqr();
    for (n, cn) in c.iter().enumerate().skip(1) {
        model *= alpha / (n as f64).sqrt();
        sum += (cn - model).norm_sqr();
    }
    sum.sqrt()
}

/// `⟨√(p̂² + m²)⟩` for a Gaussian momentum distribution by Gauss–Hermite quadrature.
pub fn sqrt_mass_shell_expectation(p_mean: f64, dp2: f64, m: f64, hbar: f64) -> Result<f64> {
    if !(hbar > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "hbar must be positive, got {hbar}"
        )));
    }
    if !(dp2 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "momentum variance must be positive, got {dp2}"
        )));
    }
    gaussian_expectation(|p| (p * p + m * m).sqrt(), p_mean, dp2, 1e-13)
}

/// Exact evolution of a pure Gaussian state under `±√(p̂² + m²)`.
///
/// In the Heisenberg picture `q̂(t) = q̂ + t v(p̂)` with `v(p) = ±p/√(p² + m²)`
/// while `p̂` is conserved, so every moment reduces to a momentum average.
#[derive(Clone, Copy, Debug)]
pub struct FreeGaussian {
    pub initial: ReducedState,
    pub m: f64,
    /// `+1` for the positive frequency branch.
    pub orientation: f64,
}

impl FreeGaussian {
    pub fn at(&self, t: f64) -> Result<Observables> {
        let r = self.initial;
        let m = self.m;
        let o = self.orientation;
        let v = move |p: f64| {
            let e = (p * p + m * m).sqrt();
            if e == 0.0 {
                0.0
            } else {
                o * p / e
            }
        };
        let mean_v = gaussian_expectation(v, r.p, r.dp2, 1e-13)?;
        let cov = gaussian_expectation(|p| (p - r.p) * v(p), r.p, r.dp2, 1e-13)?;
        let var = gaussian_expectation(|p| (v(p) - mean_v).powi(2), r.p, r.dp2, 1e-13)?;
        let dt = t - r.t;
        Ok(Observables {
            q: r.q + dt * mean_v,
            p: r.p,
            dq2: r.dq2 + 2.0 * dt * r.dqp / r.dp2 * cov + dt * dt * var,
            dqp: r.dqp + dt * cov,
            dp2: r.dp2,
        })
    }

    pub fn energy(&self, hbar: f64) -> Result<f64> {
        sqrt_mass_shell_expectation(self.initial.p, self.initial.dp2, self.m, hbar)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn vacuum_observables() {
        let f = coherent(c(0.0, 0.0), 0.4, 0.0).unwrap();
        assert_eq!(f.coeffs()[0], c(1.0, 0.0));
        let o = observables(&f);
        assert_eq!((o.q, o.p, o.dqp), (0.0, 0.0, 0.0));
        assert!((o.dq2 - 0.2).abs() < 1e-15 && (o.dp2 - 0.2).abs() < 1e-15);
    }

    #[test]
    fn coherent_state_is_minimal() {
        let f = coherent(c(10.0 / 2f64.sqrt(), 0.0), 1.0, 0.0).unwrap();
        let o = observables(&f);
        assert!((o.q - 10.0).abs() < 1e-12);
        assert!(o.p.abs() < 1e-12);
        assert!((o.dq2 - 0.5).abs() < 1e-11 && (o.dp2 - 0.5).abs() < 1e-11 && o.dqp.abs() < 1e-11);
        let mean_n: f64 = f
            .coeffs()
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum();
        assert!((mean_n - 50.0).abs() < 1e-10);
    }

    #[test]
    fn ladder_and_dense_agree_after_evolution() {
        let f = evolve(&coherent(c(2.0, -1.5), 0.7, 0.3).unwrap(), 3.7);
        let a = observables(&f).as_array();
        let b = observables_dense(&f, 4).as_array();
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < 1e-12, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn evolution_composes_and_preserves_norm() {
        let f = coherent(c(1.0, 2.0), 1.0, 0.5).unwrap();
        let a = evolve(&evolve(&f, 0.4), 1.1);
        let b = evolve(&f, 1.5);
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            assert!((x - y).norm() < 1e-13);
        }
        assert_eq!(b.norm_sqr(), f.norm_sqr());
        assert!((b.energy_expectation() - f.energy_expectation()).abs() < 1e-12);
    }

    #[test]
    fn evolved_state_is_not_coherent() {
        let f = coherent(c(3.0, 0.0), 1.0, 0.0).unwrap();
        assert!(coherence_residual(&f) < 1e-12);
        assert!(coherence_residual(&evolve(&f, 5.0)) > 1e-3);
    }

    #[test]
    fn eigenvalues() {
        assert_eq!(sqrt_eigenvalue(0, 1.0, 0.0), 1.0);
        let (m, h) = (100.0, 0.01);
        assert!((sqrt_eigenvalue(3, h, m) - (m + 3.5 * h / m)).abs() < 1e-8);
    }

    #[test]
    fn free_gaussian_keeps_momentum_and_spreads() {
        let g = FreeGaussian {
            initial: ReducedState::coherent(0.0, 1.0, 0.1),
            m: 1.0,
            orientation: 1.0,
        };
        let o = g.at(10.0).unwrap();
        assert_eq!(o.p, 1.0);
        assert!(o.dq2 > 0.05);
        assert!(o.q > 0.0 && o.q < 10.0);
    }

    #[test]
    fn symmetric_mass_shell_is_at_least_m() {
        let v = sqrt_mass_shell_expectation(0.0, 0.3, 2.0, 1.0).unwrap();
        assert!(v >= 2.0);
    }
}
