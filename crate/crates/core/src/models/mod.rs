//! Model definitions, their five truncated constraint functions, closure of
//! the constraint algebra, and the Lorentz boost of the free models.

mod boost;
mod closure;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraContext, PolyExpr, Var};
use crate::error::{Error, Result};

pub use boost::{boost, boost_matrix, velocity_addition};
pub use closure::{
    closure_report, CellReport, ClosureReport, ClosureTable, ClosureVerdict, TableEntry,
    TableSource,
};

/// A relativistic particle model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    FreeMassive {
        m: f64,
    },
    Massless,
    QuadraticPotential {
        m: f64,
    },
    LinearTimePotential {
        m: f64,
        lambda: f64,
    },
    /// Potential `V(t) = v0 + λ Ṽ(t)`, with `vtilde[k]` the coefficient of
    /// `t^(k+1)` in `Ṽ`. The constant `v0` is absorbed into the mass.
    SlowPolynomialPotential {
        m: f64,
        lambda: f64,
        #[serde(default)]
        v0: f64,
        vtilde: Vec<f64>,
    },
}

/// Whether the truncated constraint algebra closes exactly or only up to
/// terms beyond first order in ħ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosureExpectation {
    Exact,
    OrderHbar,
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = |name: &str, x: f64| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be finite")))
            }
        };
        match self {
            ModelSpec::Massless => Ok(()),
            ModelSpec::FreeMassive { m } | ModelSpec::QuadraticPotential { m } => {
                finite("m", *m)?;
                if *m < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "mass must be non-negative, got {m}"
                    )));
                }
                Ok(())
            }
            ModelSpec::LinearTimePotential { m, lambda } => {
                finite("m", *m)?;
                finite("lambda", *lambda)?;
                if *m < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "mass must be non-negative, got {m}"
                    )));
                }
                Ok(())
            }
            ModelSpec::SlowPolynomialPotential {
                m,
                lambda,
                v0,
                vtilde,
            } => {
                finite("m", *m)?;
                finite("lambda", *lambda)?;
                finite("v0", *v0)?;
                if *m < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "mass must be non-negative, got {m}"
                    )));
                }
                if vtilde.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidParameter(
                        "vtilde coefficients must be finite".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::FreeMassive { .. } => "free_massive",
            ModelSpec::Massless => "massless",
            ModelSpec::QuadraticPotential { .. } => "quadratic_potential",
            ModelSpec::LinearTimePotential { .. } => "linear_time_potential",
            ModelSpec::SlowPolynomialPotential { .. } => "slow_polynomial_potential",
        }
    }

    pub fn mass(&self) -> f64 {
        match self {
            ModelSpec::Massless => 0.0,
            ModelSpec::FreeMassive { m }
            | ModelSpec::QuadraticPotential { m }
            | ModelSpec::LinearTimePotential { m, .. }
            | ModelSpec::SlowPolynomialPotential { m, .. } => *m,
        }
    }

    /// `m²` after absorbing the constant part of a time potential.
    pub fn effective_mass_squared(&self) -> f64 {
        match self {
            ModelSpec::SlowPolynomialPotential { m, v0, .. } => m * m - v0,
            other => other.mass().powi(2),
        }
    }

    /// Time-dependent part of the potential, `λt` or `λṼ(t)`.
    pub fn time_potential(&self, t: f64) -> f64 {
        match self {
            ModelSpec::LinearTimePotential { lambda, .. } => lambda * t,
            ModelSpec::SlowPolynomialPotential { lambda, vtilde, .. } => {
                lambda * vtilde_value(vtilde, t)
            }
            _ => 0.0,
        }
    }

    /// Time derivative of [`ModelSpec::time_potential`].
    pub fn time_potential_rate(&self, t: f64) -> f64 {
        match self {
            ModelSpec::LinearTimePotential { lambda, .. } => *lambda,
            ModelSpec::SlowPolynomialPotential { lambda, vtilde, .. } => {
                lambda * vtilde_derivative(vtilde, t)
            }
            _ => 0.0,
        }
    }

    pub fn is_time_dependent(&self) -> bool {
        matches!(
            self,
            ModelSpec::LinearTimePotential { .. } | ModelSpec::SlowPolynomialPotential { .. }
        )
    }

    pub fn has_space_potential(&self) -> bool {
        matches!(self, ModelSpec::QuadraticPotential { .. })
    }

    pub fn closure_expectation(&self) -> ClosureExpectation {
        match self {
            ModelSpec::FreeMassive { .. } | ModelSpec::Massless => ClosureExpectation::Exact,
            _ => ClosureExpectation::OrderHbar,
        }
    }
}

/// `Ṽ(t) = Σ_k vtilde[k] t^(k+1)`.
pub(crate) fn vtilde_value(vtilde: &[f64], t: f64) -> f64 {
    vtilde.iter().rev().fold(0.0, |acc, c| (acc + c) * t)
}

/// `Ṽ'(t)`.
pub(crate) fn vtilde_derivative(vtilde: &[f64], t: f64) -> f64 {
    vtilde
        .iter()
        .enumerate()
        .rev()
        .fold(0.0, |acc, (k, c)| acc * t + (k as f64 + 1.0) * c)
}

/// Index of a constraint function within a [`ConstraintSet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ConstraintId {
    C,
    Ct,
    Cpt,
    Cq,
    Cp,
}

impl ConstraintId {
    pub const ALL: [ConstraintId; 5] = [
        ConstraintId::C,
        ConstraintId::Ct,
        ConstraintId::Cpt,
        ConstraintId::Cq,
        ConstraintId::Cp,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            ConstraintId::C => "C",
            ConstraintId::Ct => "C_t",
            ConstraintId::Cpt => "C_pt",
            ConstraintId::Cq => "C_q",
            ConstraintId::Cp => "C_p",
        }
    }
}

/// The five second-order constraint functions `⟨C⟩, ⟨(t̂−t)C⟩, ⟨(p̂_t−p_t)C⟩,
/// ⟨(q̂−q)C⟩, ⟨(p̂−p)C⟩` of a model.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintSet {
    pub c: PolyExpr,
    pub c_t: PolyExpr,
    pub c_pt: PolyExpr,
    pub c_q: PolyExpr,
    pub c_p: PolyExpr,
    pub model: ModelSpec,
    pub closure_expectation: ClosureExpectation,
}

impl ConstraintSet {
    pub fn get(&self, id: ConstraintId) -> &PolyExpr {
        match id {
            ConstraintId::C => &self.c,
            ConstraintId::Ct => &self.c_t,
            ConstraintId::Cpt => &self.c_pt,
            ConstraintId::Cq => &self.c_q,
            ConstraintId::Cp => &self.c_p,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (ConstraintId, &PolyExpr)> {
        ConstraintId::ALL
            .into_iter()
            .map(move |id| (id, self.get(id)))
    }
}

fn v(x: Var) -> PolyExpr {
    PolyExpr::var(x)
}

/// Builds the truncated constraint functions of `model`.
///
/// ħ stays symbolic in the returned polynomials; `ctx` only fixes the value
/// used later for evaluation and is accepted for interface symmetry.
pub fn build_constraints(model: &ModelSpec, _ctx: &AlgebraContext) -> Result<ConstraintSet> {
    use Var::*;
    model.validate()?;
    let ih = PolyExpr::i_hbar();
    let (pt, p, q) = (v(Pt), v(P), v(Q));
    let m2 = model.effective_mass_squared();

    // free-particle skeleton shared by every model
    let mut c = &pt * &pt - &p * &p + v(Dpt2) - v(Dp2);
    if m2 != 0.0 {
        c -= &PolyExpr::constant(m2);
    }
    let mut c_t = 2.0 * &pt * v(Dtpt) + &ih * &pt - 2.0 * &p * v(Dtp);
    let mut c_pt = 2.0 * &pt * v(Dpt2) - 2.0 * &p * v(Dptp);
    let mut c_q = 2.0 * &pt * v(Dptq) - 2.0 * &p * v(Dqp) - &ih * &p;
    let mut c_p = 2.0 * &pt * v(Dptp) - 2.0 * &p * v(Dp2);

    match model {
        ModelSpec::FreeMassive { .. } | ModelSpec::Massless => {}
        ModelSpec::QuadraticPotential { .. } => {
            c = c - &q * &q - v(Dq2);
            c_t = c_t - 2.0 * &q * v(Dtq);
            c_pt = c_pt - 2.0 * &q * v(Dptq);
            c_q = c_q - 2.0 * &q * v(Dq2);
            c_p = c_p - 2.0 * &q * v(Dqp) + &ih * &q;
        }
        ModelSpec::LinearTimePotential { lambda, .. } => {
            let l = *lambda;
            c = c + l * v(T);
            c_t = c_t + l * v(Dt2);
            c_pt = c_pt + l * v(Dtpt) - (0.5 * l) * ih.clone();
            c_q = c_q + l * v(Dtq);
            c_p = c_p + l * v(Dtp);
        }
        ModelSpec::SlowPolynomialPotential { lambda, vtilde, .. } => {
            let mut power = PolyExpr::one();
            for coeff in vtilde {
                power = power * v(T);
                c = c + (lambda * coeff) * &power;
            }
        }
    }

    Ok(ConstraintSet {
        c,
        c_t,
        c_pt,
        c_q,
        c_p,
        model: model.clone(),
        closure_expectation: model.closure_expectation(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> AlgebraContext {
        AlgebraContext::default()
    }

    #[test]
    fn massless_differs_from_massive_only_in_c() {
        let a = build_constraints(&ModelSpec::FreeMassive { m: 2.0 }, &ctx()).unwrap();
        let b = build_constraints(&ModelSpec::Massless, &ctx()).unwrap();
        assert_eq!(&a.c - &b.c, PolyExpr::constant(-4.0));
        for id in [
            ConstraintId::Ct,
            ConstraintId::Cpt,
            ConstraintId::Cq,
            ConstraintId::Cp,
        ] {
            assert_eq!(a.get(id), b.get(id));
        }
    }

    #[test]
    fn quadratic_c_p_matches_printed_form() {
        use Var::*;
        let cs = build_constraints(&ModelSpec::QuadraticPotential { m: 1.0 }, &ctx()).unwrap();
        let expected = 2.0 * v(Pt) * v(Dptp) - 2.0 * v(P) * v(Dp2) - 2.0 * v(Q) * v(Dqp)
            + PolyExpr::i_hbar() * v(Q);
        assert_eq!(cs.c_p, expected);
    }

    #[test]
    fn slow_polynomial_with_linear_vtilde_matches_linear_c() {
        let lin = build_constraints(
            &ModelSpec::LinearTimePotential {
                m: 1.5,
                lambda: 0.01,
            },
            &ctx(),
        )
        .unwrap();
        let slow = build_constraints(
            &ModelSpec::SlowPolynomialPotential {
                m: 1.5,
                lambda: 0.01,
                v0: 0.0,
                vtilde: vec![1.0],
            },
            &ctx(),
        )
        .unwrap();
        assert_eq!(lin.c, slow.c);
        // the other four differ only by λ·(moment or ħ) terms
        for id in [
            ConstraintId::Ct,
            ConstraintId::Cpt,
            ConstraintId::Cq,
            ConstraintId::Cp,
        ] {
            let diff = lin.get(id) - slow.get(id);
            assert!(
                diff.terms().all(|(m, _)| m.hbar_grade() >= 1),
                "{id:?}: {diff}"
            );
        }
    }

    #[test]
    fn constant_potential_is_absorbed_into_mass() {
        let model = ModelSpec::SlowPolynomialPotential {
            m: 2.0,
            lambda: 0.1,
            v0: 1.0,
            vtilde: vec![0.0, 1.0],
        };
        assert_eq!(model.effective_mass_squared(), 3.0);
        let cs = build_constraints(&model, &ctx()).unwrap();
        assert_eq!(cs.c.coefficient(&crate::algebra::Monomial::ONE).re, -3.0);
    }

    #[test]
    fn vtilde_polynomial_and_derivative() {
        // Ṽ(t) = 2t + 3t²
        let c = [2.0, 3.0];
        assert_eq!(vtilde_value(&c, 2.0), 16.0);
        assert_eq!(vtilde_derivative(&c, 2.0), 14.0);
    }

    #[test]
    fn rejects_negative_mass() {
        assert!(build_constraints(&ModelSpec::FreeMassive { m: -1.0 }, &ctx()).is_err());
    }
}
