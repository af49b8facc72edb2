use nalgebra::Matrix6;
use num_complex::Complex64;

use crate::algebra::{AlgebraContext, Var};
use crate::error::Result;
use crate::models::ModelSpec;
use crate::numerics::Dual;

use super::energy::{energy_dual, mass_term};
use super::{solve_pt_sector, ReducedState, Sign};

/// Bracket matrix `Δᵢⱼ = {χᵢ, χⱼ}` of `(C₂±, C₃±, C₄±, φ₁, φ₂, φ₃)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiracMatrix {
    pub entries: Matrix6<Complex64>,
}

impl DiracMatrix {
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    /// Numeric determinant by LU decomposition.
    pub fn determinant(&self) -> Complex64 {
        self.entries.lu().determinant()
    }

    pub fn is_antisymmetric(&self, tol: f64) -> bool {
        (0..6).all(|i| (0..6).all(|j| (self.entries[(i, j)] + self.entries[(j, i)]).norm() <= tol))
    }

    /// Both diagonal 3×3 blocks vanish.
    pub fn is_off_block_diagonal(&self, tol: f64) -> bool {
        (0..3).all(|i| {
            (0..3).all(|j| {
                self.entries[(i, j)].norm() <= tol && self.entries[(i + 3, j + 3)].norm() <= tol
            })
        })
    }

    pub fn max_abs_difference(&self, other: &DiracMatrix) -> f64 {
        (self.entries - other.entries)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// One `i,j,re,im` line per entry.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,re,im\n");
        for i in 0..6 {
            for j in 0..6 {
                let z = self.entries[(i, j)];
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    i + 1,
                    j + 1,
                    crate::csv_float(z.re),
                    crate::csv_float(z.im)
                ));
            }
        }
        out
    }
}

/// The six second-class conditions as functions on phase space.
fn conditions(
    model: &ModelSpec,
    r: &ReducedState,
    sign: Sign,
    ctx: &AlgebraContext,
) -> Result<[Dual; 6]> {
    let e = energy_dual(model, r, false)?;
    let v = |x: Var, val: f64| Dual::var(x, val);
    let (q, p, dq2, dqp, dp2) = (
        v(Var::Q, r.q),
        v(Var::P, r.p),
        v(Var::Dq2, r.dq2),
        v(Var::Dqp, r.dqp),
        v(Var::Dp2, r.dp2),
    );
    let sector = solve_pt_sector(model, r, sign, ctx)?;
    let dpt2 = v(Var::Dpt2, sector.dpt2);
    let dptp = Dual {
        value: sector.dptp,
        ..Dual::var(Var::Dptp, 0.0)
    };
    let dptq = Dual {
        value: sector.dptq,
        ..Dual::var(Var::Dptq, 0.0)
    };
    let half_ih = Complex64::new(0.0, 0.5 * ctx.hbar());
    let pm = sign.pm();

    let quad = model.has_space_potential();
    let mut s = p * p + dp2 + mass_term(model, v(Var::T, r.t));
    if quad {
        s = s + q * q + dq2;
    }
    let c2 = dpt2 - s + e * e;
    let (c3, c4) = if quad {
        (
            dptp + pm * (p * dp2 + q * dqp - q * half_ih) / e,
            dptq + pm * (p * dqp + p * half_ih + q * dq2) / e,
        )
    } else {
        (dptp + pm * p * dp2 / e, dptq + pm * p * (dqp + half_ih) / e)
    };
    Ok([
        c2,
        c3,
        c4,
        v(Var::Dt2, 0.0),
        v(Var::Dtq, 0.0),
        v(Var::Dtp, 0.0),
    ])
}

/// Evaluates `{χᵢ, χⱼ}` on the gauge-fixed surface through the chain rule
/// over the bracket engine's Poisson tensor.
pub fn dirac_matrix(
    model: &ModelSpec,
    r: &ReducedState,
    sign: Sign,
    ctx: &AlgebraContext,
) -> Result<DiracMatrix> {
    let chi = conditions(model, r, sign, ctx)?;
    let sector = solve_pt_sector(model, r, sign, ctx)?;
    let tensor = r.embed(&sector, *ctx).poisson_tensor();
    let mut entries = Matrix6::zeros();
    for i in 0..6 {
        for j in 0..6 {
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, row) in tensor.iter().enumerate() {
                let ga = chi[i].grad[a];
                if ga.norm() == 0.0 {
                    continue;
                }
                for (b, pab) in row.iter().enumerate() {
                    acc += ga * pab * chi[j].grad[b];
                }
            }
            entries[(i, j)] = acc;
        }
    }
    Ok(DiracMatrix { entries })
}

/// The free-particle matrix in its printed closed form.
pub fn dirac_matrix_printed(
    model: &ModelSpec,
    r: &ReducedState,
    sign: Sign,
    ctx: &AlgebraContext,
) -> Result<DiracMatrix> {
    let e = energy_dual(model, r, false)?.re();
    let h = ctx.hbar();
    let ih = Complex64::new(0.0, h);
    let a = sign.pm() * r.p / e;
    let z = Complex64::new(0.0, 0.0);
    let c = |x: f64| Complex64::new(x, 0.0);
    let r15 = a * (ih + 2.0 * r.dqp);
    let r16 = c(2.0 * a * r.dp2);
    #[rustfmt::skip]
    let entries = Matrix6::from_row_slice(&[
        z, z, z, 2.0 * ih, r15, r16,
        z, z, z, z, 0.5 * ih - r.dqp, c(-r.dp2),
        z, z, z, z, c(-r.dq2), -0.5 * ih - r.dqp,
        -2.0 * ih, z, z, z, z, z,
        -r15, r.dqp - 0.5 * ih, c(r.dq2), z, z, z,
        -r16, c(r.dp2), 0.5 * ih + r.dqp, z, z, z,
    ]);
    Ok(DiracMatrix { entries })
}

/// The printed closed form
/// `−4ħ²[ħ⁴/16 + Δ(qp)⁴ + 2((Δp)²(Δq)² − ħ²/4)((Δp)²(Δq)² − Δ(qp)²)]`.
pub fn dirac_determinant(r: &ReducedState, ctx: &AlgebraContext) -> f64 {
    let h2 = ctx.hbar() * ctx.hbar();
    let prod = r.dp2 * r.dq2;
    -4.0 * h2 * (h2 * h2 / 16.0 + r.dqp.powi(4) + 2.0 * (prod - h2 / 4.0) * (prod - r.dqp * r.dqp))
}

/// Determinant of the printed matrix expanded symbolically:
/// `−4ħ²(Δ(qp)² + ħ²/4 − (Δq)²(Δp)²)²`.
pub fn dirac_determinant_exact(r: &ReducedState, ctx: &AlgebraContext) -> f64 {
    let h2 = ctx.hbar() * ctx.hbar();
    -4.0 * h2 * (r.dqp * r.dqp + h2 / 4.0 - r.dq2 * r.dp2).powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> AlgebraContext {
        AlgebraContext::new(0.7).unwrap()
    }

    fn state() -> ReducedState {
        ReducedState::new(0.4, 1.3, 0.6, 0.15, 0.9)
    }

    #[test]
    fn engine_matrix_matches_printed_matrix() {
        for model in [ModelSpec::FreeMassive { m: 1.1 }, ModelSpec::Massless] {
            for sign in [Sign::Plus, Sign::Minus] {
                let a = dirac_matrix(&model, &state(), sign, &ctx()).unwrap();
                let b = dirac_matrix_printed(&model, &state(), sign, &ctx()).unwrap();
                assert!(
                    a.max_abs_difference(&b) < 1e-13,
                    "{}\n{}\n{}",
                    model.name(),
                    a.entries,
                    b.entries
                );
                assert!(a.is_antisymmetric(1e-13));
                assert!(a.is_off_block_diagonal(1e-13));
            }
        }
    }

    #[test]
    fn numeric_determinant_is_the_squared_form() {
        let m = dirac_matrix(
            &ModelSpec::FreeMassive { m: 1.1 },
            &state(),
            Sign::Plus,
            &ctx(),
        )
        .unwrap();
        let det = m.determinant();
        let exact = dirac_determinant_exact(&state(), &ctx());
        assert!((det.re - exact).abs() < 1e-12 * exact.abs());
        assert!(det.im.abs() < 1e-12 * exact.abs());
    }

    #[test]
    fn closed_form_examples() {
        let h = 0.7f64;
        let r = ReducedState::new(0.0, 1.0, h / 2.0, 0.0, h / 2.0);
        assert!((dirac_determinant(&r, &ctx()) + h.powi(6) / 4.0).abs() < 1e-15);
        assert_eq!(dirac_determinant_exact(&r, &ctx()), 0.0);
    }

    #[test]
    fn quadratic_matrix_keeps_gauge_block() {
        let m = dirac_matrix(
            &ModelSpec::QuadraticPotential { m: 0.5 },
            &state(),
            Sign::Plus,
            &ctx(),
        )
        .unwrap();
        assert!(m.is_antisymmetric(1e-13));
        for i in 3..6 {
            for j in 3..6 {
                assert_eq!(m.get(i, j).norm(), 0.0);
            }
        }
        // gauge rows carry the same entries as for the free particle
        assert_eq!(m.get(3, 0), Complex64::new(0.0, -1.4));
        assert_eq!(m.get(4, 2), Complex64::new(0.6, 0.0));
    }
}
