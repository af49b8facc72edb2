//! Deterministic text form of [`PolyExpr`].
//!
//! Terms appear in canonical monomial order joined by `" + "`. Each term is a
//! parenthesized coefficient `(a+bi)` with both parts at 17 significant
//! digits, followed by `*name` or `*name^k` factors and a trailing
//! `*hbar^k`. The zero polynomial renders as `0`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::{Monomial, PolyExpr, Var};
use crate::error::Error;

pub(crate) fn format_real(x: f64) -> String {
    // -0.0 and 0.0 must render identically
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

fn format_coefficient(c: Complex64) -> String {
    let re = format_real(c.re);
    let im = if c.im == 0.0 { 0.0 } else { c.im };
    let sign = if im.is_sign_negative() { '-' } else { '+' };
    format!("({re}{sign}{}i)", format_real(im.abs()))
}

impl fmt::Display for PolyExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            f.write_str(&format_coefficient(*c))?;
            for (v, e) in m.factors() {
                if e == 1 {
                    write!(f, "*{v}")?;
                } else {
                    write!(f, "*{v}^{e}")?;
                }
            }
            match m.hbar() {
                0 => {}
                1 => f.write_str("*hbar")?,
                k => write!(f, "*hbar^{k}")?,
            }
        }
        Ok(())
    }
}

fn parse_error(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn parse_coefficient(s: &str) -> Result<Complex64, Error> {
    let inner = s
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix("i)"))
        .ok_or_else(|| parse_error(format!("malformed coefficient `{s}`")))?;
    // split at the sign that is neither leading nor part of an exponent
    let bytes = inner.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'e')
        .ok_or_else(|| parse_error(format!("missing imaginary part in `{s}`")))?;
    let re: f64 = inner[..split]
        .parse()
        .map_err(|_| parse_error(format!("bad real part in `{s}`")))?;
    let im: f64 = inner[split..]
        .parse()
        .map_err(|_| parse_error(format!("bad imaginary part in `{s}`")))?;
    Ok(Complex64::new(re, im))
}

fn parse_factor(s: &str, m: Monomial) -> Result<Monomial, Error> {
    let (name, exp) = match s.split_once('^') {
        Some((n, e)) => (
            n,
            e.parse::<u8>()
                .map_err(|_| parse_error(format!("bad exponent in `{s}`")))?,
        ),
        None => (s, 1),
    };
    if exp == 0 {
        return Err(parse_error(format!("zero exponent in `{s}`")));
    }
    if name == "hbar" {
        return Ok(m.with_hbar(m.hbar() + exp));
    }
    let v =
        Var::from_name(name).ok_or_else(|| parse_error(format!("unknown variable `{name}`")))?;
    Ok(m.with_exponent(v, m.exponent(v) + exp))
}

impl FromStr for PolyExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if s == "0" {
            return Ok(PolyExpr::zero());
        }
        let mut out = PolyExpr::zero();
        for term in s.split(" + ") {
            let close = term
                .find(')')
                .ok_or_else(|| parse_error(format!("malformed term `{term}`")))?;
            let coeff = parse_coefficient(&term[..=close])?;
            let mut m = Monomial::ONE;
            let rest = &term[close + 1..];
            if !rest.is_empty() {
                let rest = rest
                    .strip_prefix('*')
                    .ok_or_else(|| parse_error(format!("expected `*` in `{term}`")))?;
                for factor in rest.split('*') {
                    m = parse_factor(factor, m)?;
                }
            }
            out.add_term(m, coeff);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_constant_and_zero() {
        assert_eq!(PolyExpr::zero().to_string(), "0");
        assert_eq!(
            PolyExpr::one().to_string(),
            "(1.0000000000000000e0+0.0000000000000000e0i)"
        );
    }

    #[test]
    fn renders_hbar_and_powers() {
        let e = PolyExpr::i_hbar() * PolyExpr::var(Var::P) * PolyExpr::var(Var::P);
        assert_eq!(
            e.to_string(),
            "(0.0000000000000000e0+1.0000000000000000e0i)*p^2*hbar"
        );
    }

    #[test]
    fn negative_imaginary_part() {
        let c = PolyExpr::constant(Complex64::new(-0.5, -0.25));
        let s = c.to_string();
        assert_eq!(s, "(-5.0000000000000000e-1-2.5000000000000000e-1i)");
        assert_eq!(s.parse::<PolyExpr>().unwrap(), c);
    }

    #[test]
    fn rejects_garbage() {
        assert!("(1+2i)*x".parse::<PolyExpr>().is_err());
        assert!("1*p".parse::<PolyExpr>().is_err());
    }
}
