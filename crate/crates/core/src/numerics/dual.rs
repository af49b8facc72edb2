use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::algebra::Var;

/// Complex value with its gradient over the 14 phase-space variables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual {
    pub value: Complex64,
    pub grad: [Complex64; Var::COUNT],
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

impl Dual {
    pub fn constant(value: impl Into<Complex64>) -> Self {
        Self {
            value: value.into(),
            grad: [ZERO; Var::COUNT],
        }
    }

    /// The coordinate function `v`, evaluated at `value`.
    pub fn var(v: Var, value: impl Into<Complex64>) -> Self {
        let mut d = Self::constant(value);
        d.grad[v.index()] = Complex64::new(1.0, 0.0);
        d
    }

    pub fn re(&self) -> f64 {
        self.value.re
    }

    pub fn partial(&self, v: Var) -> Complex64 {
        self.grad[v.index()]
    }

    fn chain(self, value: Complex64, deriv: Complex64) -> Self {
        Self {
            value,
            grad: self.grad.map(|g| g * deriv),
        }
    }

    pub fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s)
    }

    pub fn powi(self, n: i32) -> Self {
        let v = self.value.powi(n);
        self.chain(v, self.value.powi(n - 1) * n as f64)
    }

    pub fn recip(self) -> Self {
        let r = 1.0 / self.value;
        self.chain(r, -r * r)
    }

    pub fn scale(self, c: impl Into<Complex64>) -> Self {
        let c = c.into();
        self.chain(self.value * c, c)
    }
}

impl From<f64> for Dual {
    fn from(x: f64) -> Self {
        Dual::constant(x)
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        self.scale(-1.0)
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        let mut grad = self.grad;
        for (g, h) in grad.iter_mut().zip(o.grad) {
            *g += h;
        }
        Dual {
            value: self.value + o.value,
            grad,
        }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        self + (-o)
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        let mut grad = [ZERO; Var::COUNT];
        for (i, g) in grad.iter_mut().enumerate() {
            *g = self.grad[i] * o.value + self.value * o.grad[i];
        }
        Dual {
            value: self.value * o.value,
            grad,
        }
    }
}

impl Div for Dual {
    type Output = Dual;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Dual) -> Dual {
        self * o.recip()
    }
}

macro_rules! scalar_ops {
    ($t:ty) => {
        impl Add<$t> for Dual {
            type Output = Dual;
            fn add(mut self, c: $t) -> Dual {
                self.value += c;
                self
            }
        }
        impl Sub<$t> for Dual {
            type Output = Dual;
            fn sub(mut self, c: $t) -> Dual {
                self.value -= c;
                self
            }
        }
        impl Mul<$t> for Dual {
            type Output = Dual;
            fn mul(self, c: $t) -> Dual {
                self.scale(c)
            }
        }
        impl Div<$t> for Dual {
            type Output = Dual;
            fn div(self, c: $t) -> Dual {
                self.scale(1.0 / Complex64::from(c))
            }
        }
        impl Mul<Dual> for $t {
            type Output = Dual;
            fn mul(self, d: Dual) -> Dual {
                d.scale(self)
            }
        }
        impl Add<Dual> for $t {
            type Output = Dual;
            fn add(self, d: Dual) -> Dual {
                d + self
            }
        }
        impl Sub<Dual> for $t {
            type Output = Dual;
            fn sub(self, d: Dual) -> Dual {
                -d + self
            }
        }
    };
}

scalar_ops!(f64);
scalar_ops!(Complex64);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_radical_matches_finite_difference() {
        let f = |x: f64, y: f64| {
            let a = Dual::var(Var::Q, x);
            let b = Dual::var(Var::P, y);
            (a * a + b * b * 3.0 + 1.0).sqrt() / (a + 2.0)
        };
        let d = f(0.7, -1.3);
        let h = 1e-6;
        let fd = (f(0.7 + h, -1.3).re() - f(0.7 - h, -1.3).re()) / (2.0 * h);
        assert!((d.partial(Var::Q).re - fd).abs() < 1e-8);
        let fd = (f(0.7, -1.3 + h).re() - f(0.7, -1.3 - h).re()) / (2.0 * h);
        assert!((d.partial(Var::P).re - fd).abs() < 1e-8);
    }

    #[test]
    fn powi_and_recip() {
        let x = Dual::var(Var::T, 2.0);
        assert_eq!(x.powi(3).partial(Var::T).re, 12.0);
        assert_eq!(x.recip().partial(Var::T).re, -0.25);
    }
}
