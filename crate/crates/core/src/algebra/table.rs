//! Base brackets of the 14 phase-space coordinates.
//!
//! Expectation values form two canonical pairs and commute with every
//! moment. Brackets between two second-order moments are linear in the
//! moments and are listed row by row in [`MOMENT_TABLE`], in the order of
//! [`Var::MOMENTS`]: `{row, column}`.

use super::{PolyExpr, Var};

type Entry = &'static [(i8, Var)];

use Var::{Dp2, Dpt2, Dptp, Dptq, Dq2, Dqp, Dt2, Dtp, Dtpt, Dtq};

const Z: Entry = &[];

/// `{row, column}` for the ten second-order moments.
#[rustfmt::skip]
pub const MOMENT_TABLE: [[Entry; 10]; 10] = [
    // (Δt)²
    [Z, &[(2, Dt2)], &[(4, Dtpt)], Z, Z, Z, Z, &[(2, Dtp)], Z, &[(2, Dtq)]],
    // Δ(t p_t)
    [&[(-2, Dt2)], Z, &[(2, Dpt2)], Z, Z, Z, &[(-1, Dtq)], &[(1, Dptp)], &[(-1, Dtp)], &[(1, Dptq)]],
    // (Δp_t)²
    [&[(-4, Dtpt)], &[(-2, Dpt2)], Z, Z, Z, Z, &[(-2, Dptq)], Z, &[(-2, Dptp)], Z],
    // (Δq)²
    [Z, Z, Z, Z, &[(2, Dq2)], &[(4, Dqp)], Z, &[(2, Dptq)], &[(2, Dtq)], Z],
    // Δ(qp)
    [Z, Z, Z, &[(-2, Dq2)], Z, &[(2, Dp2)], &[(-1, Dtq)], &[(1, Dptp)], &[(1, Dtp)], &[(-1, Dptq)]],
    // (Δp)²
    [Z, Z, Z, &[(-4, Dqp)], &[(-2, Dp2)], Z, &[(-2, Dtp)], Z, Z, &[(-2, Dptp)]],
    // Δ(tq)
    [Z, &[(1, Dtq)], &[(2, Dptq)], Z, &[(1, Dtq)], &[(2, Dtp)], Z, &[(1, Dtpt), (1, Dqp)], &[(1, Dt2)], &[(1, Dq2)]],
    // Δ(p_t p)
    [&[(-2, Dtp)], &[(-1, Dptp)], Z, &[(-2, Dptq)], &[(-1, Dptp)], Z, &[(-1, Dtpt), (-1, Dqp)], Z, &[(-1, Dp2)], &[(-1, Dpt2)]],
    // Δ(tp)
    [Z, &[(1, Dtp)], &[(2, Dptp)], &[(-2, Dtq)], &[(-1, Dtp)], Z, &[(-1, Dt2)], &[(1, Dp2)], Z, &[(1, Dqp), (-1, Dtpt)]],
    // Δ(p_t q)
    [&[(-2, Dtq)], &[(-1, Dptq)], Z, Z, &[(1, Dptq)], &[(2, Dptp)], &[(-1, Dq2)], &[(1, Dpt2)], &[(1, Dtpt), (-1, Dqp)], Z],
];

/// `{a, b}` for two coordinates, read from the base table.
pub fn base_bracket(a: Var, b: Var) -> PolyExpr {
    match (a.is_moment(), b.is_moment()) {
        (false, false) => {
            let (ca, cb) = (canonical(a), canonical(b));
            let w = ca.symplectic(cb);
            if w == 0 {
                PolyExpr::zero()
            } else {
                PolyExpr::constant(w as f64)
            }
        }
        (true, true) => {
            let entry = MOMENT_TABLE[a.index() - 4][b.index() - 4];
            let mut out = PolyExpr::zero();
            for &(c, v) in entry {
                out += &PolyExpr::var(v).scale(c as f64);
            }
            out
        }
        _ => PolyExpr::zero(),
    }
}

/// Every base bracket, indexed by [`Var::index`].
pub(crate) fn base_table() -> &'static [[PolyExpr; Var::COUNT]; Var::COUNT] {
    static TABLE: std::sync::OnceLock<[[PolyExpr; Var::COUNT]; Var::COUNT]> =
        std::sync::OnceLock::new();
    TABLE.get_or_init(|| {
        std::array::from_fn(|i| std::array::from_fn(|j| base_bracket(Var::ALL[i], Var::ALL[j])))
    })
}

fn canonical(v: Var) -> super::Canonical {
    use super::Canonical;
    match v {
        Var::T => Canonical::T,
        Var::Pt => Canonical::Pt,
        Var::Q => Canonical::Q,
        Var::P => Canonical::P,
        _ => unreachable!("{v} is a moment"),
    }
}
