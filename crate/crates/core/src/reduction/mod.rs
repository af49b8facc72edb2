//! Deparametrization: the semiclassical solution of the constraints for the
//! `p_t` sector, the effective energy, gauge fixing and the Dirac matrix of
//! the resulting second-class conditions.

mod dirac;
mod energy;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraContext, MomentState, Var};
use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::numerics::polynomial_roots;

pub use dirac::{
    dirac_determinant, dirac_determinant_exact, dirac_matrix, dirac_matrix_printed, DiracMatrix,
};
pub use energy::{energy, energy_dual, energy_expanded, energy_nonrelativistic};

/// Branch of the linearized constraint `C₁± = p_t ± E`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[default]
    #[serde(rename = "+", alias = "plus")]
    Plus,
    #[serde(rename = "-", alias = "minus")]
    Minus,
}

impl Sign {
    /// `p_t / E` on this branch.
    pub fn sigma(self) -> f64 {
        match self {
            Sign::Plus => -1.0,
            Sign::Minus => 1.0,
        }
    }

    /// The `±` appearing in `C₁± = p_t ± E`.
    pub fn pm(self) -> f64 {
        -self.sigma()
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// Physical variables plus the gauge time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReducedState {
    #[serde(default)]
    pub t: f64,
    pub q: f64,
    pub p: f64,
    pub dq2: f64,
    pub dqp: f64,
    pub dp2: f64,
}

impl ReducedState {
    pub fn new(q: f64, p: f64, dq2: f64, dqp: f64, dp2: f64) -> Self {
        Self {
            t: 0.0,
            q,
            p,
            dq2,
            dqp,
            dp2,
        }
    }

    /// Minimum-uncertainty Gaussian with equal spreads `ħ/2`.
    pub fn coherent(q: f64, p: f64, hbar: f64) -> Self {
        Self::new(q, p, 0.5 * hbar, 0.0, 0.5 * hbar)
    }

    pub fn at_time(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    /// `(Δq)²(Δp)² − Δ(qp)²`.
    pub fn covariance_determinant(&self) -> f64 {
        self.dq2 * self.dp2 - self.dqp * self.dqp
    }

    /// `[q, p, dq2, dqp, dp2]`.
    pub fn physical(&self) -> [f64; 5] {
        [self.q, self.p, self.dq2, self.dqp, self.dp2]
    }

    pub fn from_physical(t: f64, y: &[f64; 5]) -> Self {
        Self {
            t,
            q: y[0],
            p: y[1],
            dq2: y[2],
            dqp: y[3],
            dp2: y[4],
        }
    }

    pub fn largest_moment(&self) -> f64 {
        self.dq2.abs().max(self.dqp.abs()).max(self.dp2.abs())
    }

    /// The gauge-fixed phase-space point with `(Δt)² = Δ(tq) = Δ(tp) = 0` and
    /// the `p_t` sector taken from `sector`.
    pub fn embed(&self, sector: &SolvedSector, ctx: AlgebraContext) -> MomentState {
        let mut s = MomentState::zeros(ctx);
        s.set(Var::T, self.t);
        s.set(Var::Q, self.q);
        s.set(Var::P, self.p);
        s.set(Var::Dq2, self.dq2);
        s.set(Var::Dqp, self.dqp);
        s.set(Var::Dp2, self.dp2);
        s.set(Var::Pt, sector.pt);
        s.set(Var::Dtpt, sector.dtpt);
        s.set(Var::Dpt2, sector.dpt2);
        s.set(Var::Dptq, sector.dptq);
        s.set(Var::Dptp, sector.dptp);
        s
    }
}

/// Outcome of [`check_admissible`]: the first violated condition, if any.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Admissibility {
    Admissible,
    NotFinite,
    NegativeDq2,
    NegativeDp2,
    Uncertainty,
}

impl Admissibility {
    pub fn is_admissible(self) -> bool {
        self == Admissibility::Admissible
    }
}

/// Reality (finite real values), positivity and the uncertainty relation.
pub fn check_admissible(r: &ReducedState, ctx: &AlgebraContext) -> Admissibility {
    let h = ctx.hbar();
    if r.physical().iter().chain([&r.t]).any(|x| !x.is_finite()) {
        return Admissibility::NotFinite;
    }
    if r.dq2 < 0.0 {
        return Admissibility::NegativeDq2;
    }
    if r.dp2 < 0.0 {
        return Admissibility::NegativeDp2;
    }
    let bound = 0.25 * h * h;
    if r.covariance_determinant() < bound * (1.0 - 1e-12) {
        return Admissibility::Uncertainty;
    }
    Admissibility::Admissible
}

/// Solved values of `p_t` and its moments on one branch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolvedSector {
    pub sign: Sign,
    pub pt: f64,
    pub dtpt: Complex64,
    pub dpt2: f64,
    pub dptq: Complex64,
    pub dptp: Complex64,
}

impl SolvedSector {
    pub const CSV_HEADER: &'static str =
        "sign,pt,dtpt_re,dtpt_im,dpt2,dptq_re,dptq_im,dptp_re,dptp_im";

    pub fn csv_row(&self) -> String {
        let f = crate::csv_float;
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.sign,
            f(self.pt),
            f(self.dtpt.re),
            f(self.dtpt.im),
            f(self.dpt2),
            f(self.dptq.re),
            f(self.dptq.im),
            f(self.dptp.re),
            f(self.dptp.im)
        )
    }
}

/// Default bound on `(Δp_t)²` relative to the largest physical moment.
pub const DEFAULT_KAPPA: f64 = 10.0;

/// `(S, K)` such that the `(Δp_t)²` quadratic reads `x² − S x + K = 0`.
fn quadratic_coefficients(model: &ModelSpec, r: &ReducedState) -> (f64, f64) {
    let m2 = model.effective_mass_squared() - model.time_potential(r.t);
    let mut s = r.p * r.p + m2 + r.dp2;
    let mut k = r.p * r.p * r.dp2;
    if model.has_space_potential() {
        s += r.q * r.q + r.dq2;
        k += 2.0 * r.q * r.p * r.dqp + r.q * r.q * r.dq2;
    }
    (s, k)
}

/// Both roots `(x₋, x₊)` of the quadratic for `(Δp_t)²`, smaller first.
pub fn pt_moment_roots(model: &ModelSpec, r: &ReducedState) -> Result<(f64, f64)> {
    model.validate()?;
    let (s, k) = quadratic_coefficients(model, r);
    let disc = s * s - 4.0 * k;
    if disc < 0.0 {
        return Err(Error::Domain(format!(
            "negative discriminant {disc:e} in the (Δp_t)² quadratic"
        )));
    }
    let root = disc.sqrt();
    let big = 0.5 * (s + root);
    // smaller root via Vieta to avoid cancellation
    let small = if big != 0.0 { k / big } else { 0.0 };
    Ok((small, big))
}

/// Solves the constraints for `p_t` and its moments in the standard gauge.
pub fn solve_pt_sector(
    model: &ModelSpec,
    r: &ReducedState,
    sign: Sign,
    ctx: &AlgebraContext,
) -> Result<SolvedSector> {
    solve_pt_sector_with(model, r, sign, ctx, DEFAULT_KAPPA)
}

/// As [`solve_pt_sector`] with an explicit hierarchy constant `kappa`.
pub fn solve_pt_sector_with(
    model: &ModelSpec,
    r: &ReducedState,
    sign: Sign,
    ctx: &AlgebraContext,
    kappa: f64,
) -> Result<SolvedSector> {
    let e = energy(model, r)?;
    let (small, big) = pt_moment_roots(model, r)?;
    let scale = r.largest_moment();
    if small > kappa * scale {
        return Err(Error::NoSemiclassicalRoot(format!(
            "roots {small:e} and {big:e} both exceed {kappa} × {scale:e}"
        )));
    }
    let h = ctx.hbar();
    let half_ih = Complex64::new(0.0, 0.5 * h);
    let sigma = sign.sigma();
    let (dpt2, dptq, dptp) = match model {
        ModelSpec::Massless => (
            r.dp2,
            sigma * r.p / e * (r.dqp + half_ih),
            Complex64::from(sigma * r.p / e * r.dp2),
        ),
        ModelSpec::QuadraticPotential { .. } => (
            small,
            sigma / e * (r.p * r.dqp + half_ih * r.p + r.q * r.dq2),
            sigma / e * (r.p * r.dp2 + r.q * r.dqp - half_ih * r.q),
        ),
        _ => (
            small,
            sigma * r.p / e * (r.dqp + half_ih),
            Complex64::from(sigma * r.p / e * r.dp2),
        ),
    };
    Ok(SolvedSector {
        sign,
        pt: sigma * e,
        dtpt: -half_ih,
        dpt2,
        dptq,
        dptp,
    })
}

/// Moments of `t` left free before gauge fixing, as they enter the quartic.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TimeMoments {
    pub dt2: f64,
    pub dtq: f64,
    pub dtp: f64,
}

/// All four roots of the quartic for `p_t` in the linear time potential.
pub fn solve_quartic_pt(
    model: &ModelSpec,
    r: &ReducedState,
    ctx: &AlgebraContext,
    pre_gauge: TimeMoments,
) -> Result<Vec<Complex64>> {
    let ModelSpec::LinearTimePotential { m, lambda } = *model else {
        return Err(Error::InvalidParameter(format!(
            "quartic applies to the linear time potential, not {}",
            model.name()
        )));
    };
    let h = ctx.hbar();
    let s = r.p * r.p + m * m - lambda * r.t + r.dp2;
    let c0 =
        r.p * r.p * r.dp2 + 0.25 * lambda * lambda * pre_gauge.dt2 - lambda * r.p * pre_gauge.dtp;
    let coeffs = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(-s, 0.0),
        Complex64::new(0.0, 0.5 * h * lambda),
        Complex64::new(c0, 0.0),
    ];
    Ok(polynomial_roots(&coeffs))
}
