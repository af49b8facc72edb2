use crate::algebra::Var;
use crate::error::{Error, Result};
use crate::models::ModelSpec;
use crate::numerics::Dual;

use super::ReducedState;

/// Relative size below which `|p|` counts as zero for the massless model.
const MASSLESS_CUTOFF: f64 = 1e-12;

struct Inputs {
    t: Dual,
    q: Dual,
    p: Dual,
    dq2: Dual,
    dqp: Dual,
    dp2: Dual,
}

impl Inputs {
    fn new(r: &ReducedState) -> Self {
        Self {
            t: Dual::var(Var::T, r.t),
            q: Dual::var(Var::Q, r.q),
            p: Dual::var(Var::P, r.p),
            dq2: Dual::var(Var::Dq2, r.dq2),
            dqp: Dual::var(Var::Dqp, r.dqp),
            dp2: Dual::var(Var::Dp2, r.dp2),
        }
    }
}

/// `m² − V(t)` with the time-dependent part of the potential subtracted.
pub(super) fn mass_term(model: &ModelSpec, t: Dual) -> Dual {
    let m2 = Dual::constant(model.effective_mass_squared());
    match model {
        ModelSpec::LinearTimePotential { lambda, .. } => m2 - t * *lambda,
        ModelSpec::SlowPolynomialPotential { lambda, vtilde, .. } => {
            let mut v = Dual::constant(0.0);
            for c in vtilde.iter().rev() {
                v = (v + *c) * t;
            }
            m2 - v * *lambda
        }
        _ => m2,
    }
}

fn massless(r: &ReducedState, x: &Inputs) -> Result<Dual> {
    let scale = 1.0 + r.dp2.abs().sqrt();
    if r.p.abs() < MASSLESS_CUTOFF * scale || !r.p.is_finite() {
        return Err(Error::Domain(format!(
            "massless energy |p| is singular at p = {:e}",
            r.p
        )));
    }
    Ok(x.p * r.p.signum())
}

/// `E` together with its gradient over the reduced variables (and `t`).
///
/// With `expanded` the order-ħ truncation `R + N/(2R³)` is returned instead
/// of the full radical.
pub fn energy_dual(model: &ModelSpec, r: &ReducedState, expanded: bool) -> Result<Dual> {
    model.validate()?;
    let x = Inputs::new(r);
    if matches!(model, ModelSpec::Massless) {
        return massless(r, &x);
    }
    let m2 = mass_term(model, x.t);
    let quad = model.has_space_potential();
    let mut r2 = x.p * x.p + m2;
    if quad {
        r2 = r2 + x.q * x.q;
    }
    if expanded {
        if !(r2.re() > 0.0) {
            return Err(Error::Domain(format!(
                "classical radicand {:e} is not positive",
                r2.re()
            )));
        }
        let n = if quad {
            (x.q * x.q + m2) * x.dp2 - 2.0 * x.q * x.p * x.dqp + (x.p * x.p + m2) * x.dq2
        } else {
            m2 * x.dp2
        };
        let root = r2.sqrt();
        return Ok(root + n / (2.0 * r2 * root));
    }
    let mut s = r2 + x.dp2;
    let mut k = x.p * x.p * x.dp2;
    if quad {
        s = s + x.dq2;
        k = k + 2.0 * x.q * x.p * x.dqp + x.q * x.q * x.dq2;
    }
    let disc = s * s - 4.0 * k;
    if !(s.re() > 0.0) || !(disc.re() >= 0.0) {
        return Err(Error::Domain(format!(
            "energy radicand {:e} or discriminant {:e} out of range; outside the slowly varying regime",
            s.re(),
            disc.re()
        )));
    }
    Ok(((s + disc.sqrt()) * 0.5).sqrt())
}

/// The effective energy `E` in its closed radical form.
pub fn energy(model: &ModelSpec, r: &ReducedState) -> Result<f64> {
    energy_dual(model, r, false).map(|d| d.re())
}

/// The order-ħ expansion of `E` in the moments.
pub fn energy_expanded(model: &ModelSpec, r: &ReducedState) -> Result<f64> {
    energy_dual(model, r, true).map(|d| d.re())
}

/// Newtonian limit `m + (p² + (Δp)²)/(2m)`.
pub fn energy_nonrelativistic(m: f64, r: &ReducedState) -> f64 {
    m + (r.p * r.p + r.dp2) / (2.0 * m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dispersion_relation() {
        let r = ReducedState::new(0.0, 3.0, 0.0, 0.0, 0.0);
        assert_eq!(energy(&ModelSpec::FreeMassive { m: 4.0 }, &r).unwrap(), 5.0);
        assert_eq!(
            energy_expanded(&ModelSpec::FreeMassive { m: 4.0 }, &r).unwrap(),
            5.0
        );
    }

    #[test]
    fn massless_is_abs_p() {
        let r = ReducedState::new(0.3, -2.0, 0.7, 0.1, 0.4);
        assert_eq!(energy(&ModelSpec::Massless, &r).unwrap(), 2.0);
        assert!(energy(
            &ModelSpec::Massless,
            &ReducedState::new(0.0, 0.0, 0.5, 0.0, 0.5)
        )
        .is_err());
    }

    #[test]
    fn quadratic_expansion_at_q_zero() {
        let r = ReducedState::new(0.0, 1.5, 0.02, 0.0, 0.03);
        let m = 0.8f64;
        let rr = r.p * r.p + m * m;
        let expected = rr.sqrt() * (1.0 + (m * m * r.dp2 + rr * r.dq2) / (2.0 * rr * rr));
        let got = energy_expanded(&ModelSpec::QuadraticPotential { m }, &r).unwrap();
        assert!((got - expected).abs() < 1e-15);
    }

    #[test]
    fn time_potential_lowers_the_mass() {
        let lin = ModelSpec::LinearTimePotential {
            m: 2.0,
            lambda: 0.5,
        };
        let r = ReducedState::new(0.0, 1.0, 0.0, 0.0, 0.0).at_time(2.0);
        assert!((energy(&lin, &r).unwrap() - 4f64.sqrt()).abs() < 1e-15);
        let past = r.at_time(20.0);
        assert!(matches!(energy(&lin, &past), Err(Error::Domain(_))));
    }

    #[test]
    fn energy_is_non_negative_and_gradient_matches_finite_differences() {
        let model = ModelSpec::QuadraticPotential { m: 0.5 };
        let r = ReducedState::new(1.1, -0.4, 0.3, 0.1, 0.2);
        let d = energy_dual(&model, &r, false).unwrap();
        assert!(d.re() > 0.0);
        let h = 1e-6;
        let fd = (energy(
            &model,
            &ReducedState {
                dqp: r.dqp + h,
                ..r
            },
        )
        .unwrap()
            - energy(
                &model,
                &ReducedState {
                    dqp: r.dqp - h,
                    ..r
                },
            )
            .unwrap())
            / (2.0 * h);
        assert!((d.partial(Var::Dqp).re - fd).abs() < 1e-8);
    }
}
