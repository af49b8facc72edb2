//! Truncated quantum phase space of two canonical pairs `(t, p_t)` and
//! `(q, p)` at second moment order.
//!
//! The phase space is coordinatized by four expectation values and ten
//! Weyl-symmetrized second-order moments. Observables on it are polynomials
//! ([`PolyExpr`]) with complex coefficients and an explicit power of ħ, and
//! the Poisson bracket between them is the bilinear Leibniz extension of the
//! fixed base table in [`table`].

mod poly;
pub mod table;
mod text;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use poly::{Monomial, PolyExpr};
pub use table::base_bracket;

/// The ħ value against which polynomials are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraContext {
    hbar: f64,
}

impl AlgebraContext {
    pub fn new(hbar: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "hbar must be positive, got {hbar}"
            )));
        }
        Ok(Self { hbar })
    }

    #[inline]
    pub fn hbar(&self) -> f64 {
        self.hbar
    }
}

impl Default for AlgebraContext {
    fn default() -> Self {
        Self { hbar: 1.0 }
    }
}

/// One of the four canonical operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Canonical {
    T,
    Pt,
    Q,
    P,
}

impl Canonical {
    pub const ALL: [Canonical; 4] = [Canonical::T, Canonical::Pt, Canonical::Q, Canonical::P];

    /// Canonical symplectic form: `{t, p_t} = {q, p} = 1`.
    pub fn symplectic(self, other: Canonical) -> i8 {
        use Canonical::*;
        match (self, other) {
            (T, Pt) | (Q, P) => 1,
            (Pt, T) | (P, Q) => -1,
            _ => 0,
        }
    }

    pub fn var(self) -> Var {
        match self {
            Canonical::T => Var::T,
            Canonical::Pt => Var::Pt,
            Canonical::Q => Var::Q,
            Canonical::P => Var::P,
        }
    }
}

/// The 14 coordinates of the second-order quantum phase space.
///
/// The declaration order is the canonical monomial order. Moments are listed
/// in the column order of the second-order bracket table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Var {
    T,
    Pt,
    Q,
    P,
    /// `(Δt)²`
    Dt2,
    /// `Δ(t p_t)`
    Dtpt,
    /// `(Δp_t)²`
    Dpt2,
    /// `(Δq)²`
    Dq2,
    /// `Δ(qp)`
    Dqp,
    /// `(Δp)²`
    Dp2,
    /// `Δ(tq)`
    Dtq,
    /// `Δ(p_t p)`
    Dptp,
    /// `Δ(tp)`
    Dtp,
    /// `Δ(p_t q)`
    Dptq,
}

impl Var {
    pub const COUNT: usize = 14;

    pub const ALL: [Var; 14] = [
        Var::T,
        Var::Pt,
        Var::Q,
        Var::P,
        Var::Dt2,
        Var::Dtpt,
        Var::Dpt2,
        Var::Dq2,
        Var::Dqp,
        Var::Dp2,
        Var::Dtq,
        Var::Dptp,
        Var::Dtp,
        Var::Dptq,
    ];

    pub const EXPECTATIONS: [Var; 4] = [Var::T, Var::Pt, Var::Q, Var::P];

    pub const MOMENTS: [Var; 10] = [
        Var::Dt2,
        Var::Dtpt,
        Var::Dpt2,
        Var::Dq2,
        Var::Dqp,
        Var::Dp2,
        Var::Dtq,
        Var::Dptp,
        Var::Dtp,
        Var::Dptq,
    ];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    #[inline]
    pub fn is_moment(self) -> bool {
        self.index() >= 4
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::T => "t",
            Var::Pt => "pt",
            Var::Q => "q",
            Var::P => "p",
            Var::Dt2 => "Dt2",
            Var::Dtpt => "Dtpt",
            Var::Dpt2 => "Dpt2",
            Var::Dq2 => "Dq2",
            Var::Dqp => "Dqp",
            Var::Dp2 => "Dp2",
            Var::Dtq => "Dtq",
            Var::Dptp => "Dptp",
            Var::Dtp => "Dtp",
            Var::Dptq => "Dptq",
        }
    }

    pub fn from_name(name: &str) -> Option<Var> {
        Var::ALL.into_iter().find(|v| v.name() == name)
    }

    /// The two canonical factors of a moment; `None` for expectation values.
    pub fn factors(self) -> Option<(Canonical, Canonical)> {
        use Canonical::*;
        Some(match self {
            Var::Dt2 => (T, T),
            Var::Dtpt => (T, Pt),
            Var::Dpt2 => (Pt, Pt),
            Var::Dq2 => (Q, Q),
            Var::Dqp => (Q, P),
            Var::Dp2 => (P, P),
            Var::Dtq => (T, Q),
            Var::Dptp => (Pt, P),
            Var::Dtp => (T, P),
            Var::Dptq => (Pt, Q),
            _ => return None,
        })
    }

    /// The symmetric moment `Δ(ab)`; order of the arguments is irrelevant.
    pub fn moment(a: Canonical, b: Canonical) -> Var {
        use Canonical::*;
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        match (a, b) {
            (T, T) => Var::Dt2,
            (T, Pt) => Var::Dtpt,
            (Pt, Pt) => Var::Dpt2,
            (Q, Q) => Var::Dq2,
            (Q, P) => Var::Dqp,
            (P, P) => Var::Dp2,
            (T, Q) => Var::Dtq,
            (Pt, P) => Var::Dptp,
            (T, P) => Var::Dtp,
            (Pt, Q) => Var::Dptq,
            _ => unreachable!("arguments are sorted"),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A complete point of the 14-dimensional quantum phase space.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentState {
    values: [Complex64; 14],
    ctx: AlgebraContext,
}

impl MomentState {
    pub fn zeros(ctx: AlgebraContext) -> Self {
        Self {
            values: [Complex64::new(0.0, 0.0); 14],
            ctx,
        }
    }

    pub fn from_values(values: [Complex64; 14], ctx: AlgebraContext) -> Self {
        Self { values, ctx }
    }

    #[inline]
    pub fn get(&self, v: Var) -> Complex64 {
        self.values[v.index()]
    }

    #[inline]
    pub fn set(&mut self, v: Var, value: impl Into<Complex64>) {
        self.values[v.index()] = value.into();
    }

    pub fn with(mut self, v: Var, value: impl Into<Complex64>) -> Self {
        self.set(v, value);
        self
    }

    pub fn values(&self) -> &[Complex64; 14] {
        &self.values
    }

    pub fn context(&self) -> AlgebraContext {
        self.ctx
    }

    /// The expectation value of the canonical operator `a`.
    pub fn expectation(&self, a: Canonical) -> Complex64 {
        self.get(a.var())
    }

    /// Second moment `Δ(ab)` as an entry of the symmetric 4×4 covariance matrix.
    pub fn covariance(&self, a: Canonical, b: Canonical) -> Complex64 {
        self.get(Var::moment(a, b))
    }

    /// Brackets `{a, b}` of all coordinate pairs evaluated at this state.
    pub fn poisson_tensor(&self) -> [[Complex64; Var::COUNT]; Var::COUNT] {
        let table = table::base_table();
        std::array::from_fn(|i| std::array::from_fn(|j| table[i][j].evaluate(self)))
    }

    /// Reality, positivity and uncertainty of the `(q, p)` sector.
    pub fn is_physical(&self) -> bool {
        const REAL_TOL: f64 = 1e-12;
        let sector = [Var::Q, Var::P, Var::Dq2, Var::Dqp, Var::Dp2];
        if sector
            .iter()
            .any(|&v| self.get(v).im.abs() > REAL_TOL * (1.0 + self.get(v).re.abs()))
        {
            return false;
        }
        let dq2 = self.get(Var::Dq2).re;
        let dqp = self.get(Var::Dqp).re;
        let dp2 = self.get(Var::Dp2).re;
        let h = self.ctx.hbar();
        dq2 >= 0.0 && dp2 >= 0.0 && dq2 * dp2 - dqp * dqp >= 0.25 * h * h * (1.0 - 1e-12)
    }
}

/// Exact polynomial evaluation of `expr` at `state`.
pub fn evaluate(expr: &PolyExpr, state: &MomentState) -> Complex64 {
    expr.evaluate(state)
}

/// ħ-grade of a monomial: number of moment factors plus the explicit ħ power.
pub fn hbar_grade(m: &Monomial) -> u32 {
    m.hbar_grade()
}

/// Poisson bracket of two polynomial observables.
pub fn bracket(a: &PolyExpr, b: &PolyExpr) -> PolyExpr {
    a.bracket(b)
}
