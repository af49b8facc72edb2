use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use crate::algebra::{Canonical, MomentState, Var};
use crate::error::{Error, Result};

/// Linear map on `(t, p_t, q, p)` for a boost with velocity `v`: momenta
/// transform with `Λ(v)`, positions with `Λ(−v)`.
pub fn boost_matrix(v: f64) -> Result<Matrix4<f64>> {
    if !v.is_finite() || v.abs() >= 1.0 {
        return Err(Error::InvalidVelocity(v));
    }
    let g = 1.0 / (1.0 - v * v).sqrt();
    let gv = g * v;
    #[rustfmt::skip]
    let m = Matrix4::new(
        g,   0.0, gv,  0.0,
        0.0, g,   0.0, -gv,
        gv,  0.0, g,   0.0,
        0.0, -gv, 0.0, g,
    );
    Ok(m)
}

/// Relativistic composition of two collinear velocities.
pub fn velocity_addition(v1: f64, v2: f64) -> f64 {
    (v1 + v2) / (1.0 + v1 * v2)
}

/// Applies a boost to expectation values and second moments.
pub fn boost(state: &MomentState, v: f64) -> Result<MomentState> {
    let l = boost_matrix(v)?.map(|x| Complex64::new(x, 0.0));
    let mut x = Vector4::zeros();
    let mut m = Matrix4::zeros();
    for (i, a) in Canonical::ALL.into_iter().enumerate() {
        x[i] = state.expectation(a);
        for (j, b) in Canonical::ALL.into_iter().enumerate() {
            m[(i, j)] = state.covariance(a, b);
        }
    }
    let x2 = l * x;
    let m2 = l * m * l.transpose();
    let mut out = state.clone();
    for (i, a) in Canonical::ALL.into_iter().enumerate() {
        out.set(a.var(), x2[i]);
        for (j, b) in Canonical::ALL.into_iter().enumerate().skip(i) {
            out.set(Var::moment(a, b), m2[(i, j)]);
        }
    }
    Ok(out)
}
