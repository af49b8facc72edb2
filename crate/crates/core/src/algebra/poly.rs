use std::collections::BTreeMap;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use super::{base_bracket, MomentState, Var};

/// A product of phase-space variables times an explicit power of ħ.
///
/// Ordering is lexicographic over the exponent vector (in [`Var`] order)
/// with the ħ power compared last.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    exps: [u8; 14],
    hbar: u8,
}

impl Monomial {
    pub const ONE: Monomial = Monomial {
        exps: [0; 14],
        hbar: 0,
    };

    pub fn var(v: Var) -> Self {
        let mut m = Self::ONE;
        m.exps[v.index()] = 1;
        m
    }

    pub fn hbar_power(k: u8) -> Self {
        Monomial {
            exps: [0; 14],
            hbar: k,
        }
    }

    #[inline]
    pub fn exponent(&self, v: Var) -> u8 {
        self.exps[v.index()]
    }

    #[inline]
    pub fn hbar(&self) -> u8 {
        self.hbar
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().map(|&e| e as u32).sum()
    }

    pub fn hbar_grade(&self) -> u32 {
        Var::MOMENTS
            .iter()
            .map(|v| self.exponent(*v) as u32)
            .sum::<u32>()
            + self.hbar as u32
    }

    pub fn is_one(&self) -> bool {
        *self == Self::ONE
    }

    /// Variables with nonzero exponent, in canonical order.
    pub fn factors(&self) -> impl Iterator<Item = (Var, u8)> + '_ {
        Var::ALL.into_iter().filter_map(move |v| {
            let e = self.exponent(v);
            (e > 0).then_some((v, e))
        })
    }

    pub(crate) fn with_exponent(mut self, v: Var, e: u8) -> Self {
        self.exps[v.index()] = e;
        self
    }

    pub(crate) fn with_hbar(mut self, k: u8) -> Self {
        self.hbar = k;
        self
    }

    /// `(e, m / v)` for the partial derivative `∂m/∂v = e · m / v`.
    fn lower(&self, v: Var) -> Option<(u8, Monomial)> {
        let e = self.exponent(v);
        (e > 0).then(|| (e, self.with_exponent(v, e - 1)))
    }

    fn evaluate(&self, state: &MomentState) -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        for (v, e) in self.factors() {
            acc *= state.get(v).powu(e as u32);
        }
        if self.hbar > 0 {
            acc *= state.context().hbar().powi(self.hbar as i32);
        }
        acc
    }
}

impl Mul for Monomial {
    type Output = Monomial;

    fn mul(self, rhs: Monomial) -> Monomial {
        let mut out = self;
        for i in 0..14 {
            out.exps[i] = self.exps[i]
                .checked_add(rhs.exps[i])
                .expect("monomial exponent overflow");
        }
        out.hbar = self
            .hbar
            .checked_add(rhs.hbar)
            .expect("monomial hbar power overflow");
        out
    }
}

/// Polynomial in the 14 phase-space variables and ħ with complex coefficients,
/// kept in canonical form (sorted monomials, no zero coefficients).
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PolyExpr {
    terms: BTreeMap<Monomial, Complex64>,
}

impl PolyExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn constant(c: impl Into<Complex64>) -> Self {
        Self::term(c, Monomial::ONE)
    }

    pub fn var(v: Var) -> Self {
        Self::term(1.0, Monomial::var(v))
    }

    /// `ħ` as a polynomial.
    pub fn hbar() -> Self {
        Self::term(1.0, Monomial::hbar_power(1))
    }

    /// `i ħ`.
    pub fn i_hbar() -> Self {
        Self::term(Complex64::new(0.0, 1.0), Monomial::hbar_power(1))
    }

    pub fn term(c: impl Into<Complex64>, m: Monomial) -> Self {
        let mut out = Self::zero();
        out.add_term(m, c.into());
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Complex64 {
        self.terms.get(m).copied().unwrap_or_default()
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: Complex64) {
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        let entry = self.terms.entry(m).or_default();
        *entry += c;
        if *entry == Complex64::new(0.0, 0.0) {
            self.terms.remove(&m);
        }
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> Self {
        let c = c.into();
        let mut out = Self::zero();
        for (m, k) in &self.terms {
            out.add_term(*m, k * c);
        }
        out
    }

    /// Smallest ħ-grade among the terms; `None` for the zero polynomial.
    pub fn min_hbar_grade(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::hbar_grade).min()
    }

    /// Drops every term whose ħ-grade exceeds `max_grade`.
    pub fn truncate_grade(&self, max_grade: u32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.hbar_grade() <= max_grade)
                .map(|(m, c)| (*m, *c))
                .collect(),
        }
    }

    pub fn partial(&self, v: Var) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if let Some((e, lowered)) = m.lower(v) {
                out.add_term(lowered, c * e as f64);
            }
        }
        out
    }

    pub fn evaluate(&self, state: &MomentState) -> Complex64 {
        self.terms.iter().map(|(m, c)| c * m.evaluate(state)).sum()
    }

    /// Poisson bracket `{self, other}` by the Leibniz rule over the base table.
    pub fn bracket(&self, other: &PolyExpr) -> PolyExpr {
        let mut out = PolyExpr::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let c = ca * cb;
                for (x, _) in ma.factors() {
                    let (ex, ra) = ma.lower(x).expect("factor present");
                    for (y, _) in mb.factors() {
                        let (ey, rb) = mb.lower(y).expect("factor present");
                        let base = base_bracket(x, y);
                        if base.is_zero() {
                            continue;
                        }
                        let prefactor = c * (ex as f64 * ey as f64);
                        let rest = ra * rb;
                        for (mbase, cbase) in &base.terms {
                            out.add_term(rest * *mbase, prefactor * cbase);
                        }
                    }
                }
            }
        }
        out
    }
}

impl From<Var> for PolyExpr {
    fn from(v: Var) -> Self {
        PolyExpr::var(v)
    }
}

impl From<f64> for PolyExpr {
    fn from(c: f64) -> Self {
        PolyExpr::constant(c)
    }
}

impl From<Complex64> for PolyExpr {
    fn from(c: Complex64) -> Self {
        PolyExpr::constant(c)
    }
}

impl AddAssign<&PolyExpr> for PolyExpr {
    fn add_assign(&mut self, rhs: &PolyExpr) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, *c);
        }
    }
}

impl SubAssign<&PolyExpr> for PolyExpr {
    fn sub_assign(&mut self, rhs: &PolyExpr) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, -c);
        }
    }
}

impl Neg for PolyExpr {
    type Output = PolyExpr;

    fn neg(self) -> PolyExpr {
        self.scale(-1.0)
    }
}

impl Neg for &PolyExpr {
    type Output = PolyExpr;

    fn neg(self) -> PolyExpr {
        self.scale(-1.0)
    }
}

impl Mul<&PolyExpr> for &PolyExpr {
    type Output = PolyExpr;

    fn mul(self, rhs: &PolyExpr) -> PolyExpr {
        let mut out = PolyExpr::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(*ma * *mb, ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_binops {
    ($($tr:ident $method:ident $assign:ident);*) => {$(
        impl $tr<&PolyExpr> for PolyExpr {
            type Output = PolyExpr;
            fn $method(mut self, rhs: &PolyExpr) -> PolyExpr {
                self.$assign(rhs);
                self
            }
        }
        impl $tr<PolyExpr> for PolyExpr {
            type Output = PolyExpr;
            fn $method(mut self, rhs: PolyExpr) -> PolyExpr {
                self.$assign(&rhs);
                self
            }
        }
        impl $tr<PolyExpr> for &PolyExpr {
            type Output = PolyExpr;
            fn $method(self, rhs: PolyExpr) -> PolyExpr {
                let mut out = self.clone();
                out.$assign(&rhs);
                out
            }
        }
        impl $tr<&PolyExpr> for &PolyExpr {
            type Output = PolyExpr;
            fn $method(self, rhs: &PolyExpr) -> PolyExpr {
                let mut out = self.clone();
                out.$assign(rhs);
                out
            }
        }
    )*};
}

forward_binops!(Add add add_assign; Sub sub sub_assign);

impl Mul<PolyExpr> for PolyExpr {
    type Output = PolyExpr;

    fn mul(self, rhs: PolyExpr) -> PolyExpr {
        &self * &rhs
    }
}

impl Mul<&PolyExpr> for PolyExpr {
    type Output = PolyExpr;

    fn mul(self, rhs: &PolyExpr) -> PolyExpr {
        &self * rhs
    }
}

impl Mul<PolyExpr> for &PolyExpr {
    type Output = PolyExpr;

    fn mul(self, rhs: PolyExpr) -> PolyExpr {
        self * &rhs
    }
}

impl Mul<PolyExpr> for f64 {
    type Output = PolyExpr;

    fn mul(self, rhs: PolyExpr) -> PolyExpr {
        rhs.scale(self)
    }
}

impl Mul<&PolyExpr> for f64 {
    type Output = PolyExpr;

    fn mul(self, rhs: &PolyExpr) -> PolyExpr {
        rhs.scale(self)
    }
}

impl Mul<PolyExpr> for Complex64 {
    type Output = PolyExpr;

    fn mul(self, rhs: PolyExpr) -> PolyExpr {
        rhs.scale(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: Var) -> PolyExpr {
        PolyExpr::var(x)
    }

    #[test]
    fn zero_coefficients_are_pruned() {
        let e = v(Var::P) - v(Var::P);
        assert!(e.is_zero());
        assert_eq!(e, PolyExpr::zero());
    }

    #[test]
    fn grade_counts_moments_and_hbar() {
        assert_eq!(Monomial::var(Var::Dp2).hbar_grade(), 1);
        assert_eq!(
            (Monomial::hbar_power(1) * Monomial::var(Var::Pt)).hbar_grade(),
            1
        );
        assert_eq!(
            (Monomial::hbar_power(1) * Monomial::var(Var::Dqp)).hbar_grade(),
            2
        );
        assert_eq!(Monomial::var(Var::Q).hbar_grade(), 0);
    }

    #[test]
    fn canonical_pairs() {
        assert_eq!(v(Var::T).bracket(&v(Var::Pt)), PolyExpr::one());
        assert_eq!(v(Var::Q).bracket(&v(Var::P)), PolyExpr::one());
        assert_eq!(v(Var::P).bracket(&v(Var::Q)), PolyExpr::constant(-1.0));
        assert!(v(Var::Q).bracket(&v(Var::Dp2)).is_zero());
    }

    #[test]
    fn leibniz_on_products() {
        // {q², p} = 2q
        let q2 = v(Var::Q) * v(Var::Q);
        assert_eq!(q2.bracket(&v(Var::P)), 2.0 * v(Var::Q));
        // {q p, Dq2 Dp2} = 0: expectation values commute with moments
        let qp = v(Var::Q) * v(Var::P);
        assert!(qp.bracket(&(v(Var::Dq2) * v(Var::Dp2))).is_zero());
    }

    #[test]
    fn evaluation_substitutes_hbar() {
        let ctx = super::super::AlgebraContext::new(0.5).unwrap();
        let s = MomentState::zeros(ctx).with(Var::P, 3.0);
        let e = PolyExpr::i_hbar() * v(Var::P);
        assert_eq!(e.evaluate(&s), Complex64::new(0.0, 1.5));
    }
}
