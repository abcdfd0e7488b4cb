//! The rational functions `1 − z` and `(1 − z)^{c²}/(1 − z^c)` and their norms under `w ↦ w^d`.

use std::fmt;

use num_traits::{One, Zero};

use crate::arith::{CycloElement, Rational};
use crate::error::{Error, Result};

/// Polynomial over `Q`, constant term first, no trailing zeros.
fn trim<T: Zero>(mut v: Vec<T>) -> Vec<T> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

/// A quotient `num / den` of polynomials over `Q` in one variable, compared by cross-multiplication.
#[derive(Clone, Debug)]
pub struct RationalFunction {
    num: Vec<Rational>,
    den: Vec<Rational>,
}

impl RationalFunction {
    pub fn new(num: Vec<Rational>, den: Vec<Rational>) -> Result<Self> {
        let den = trim(den);
        if den.is_empty() {
            return Err(Error::DivisionByZero("zero denominator"));
        }
        Ok(RationalFunction { num: trim(num), den })
    }

    pub fn polynomial(num: Vec<Rational>) -> Self {
        RationalFunction { num: trim(num), den: vec![Rational::one()] }
    }

    pub fn numerator(&self) -> &[Rational] {
        &self.num
    }

    pub fn denominator(&self) -> &[Rational] {
        &self.den
    }

    pub fn eval(&self, z: &CycloElement) -> Result<CycloElement> {
        let horner = |p: &[Rational]| {
            p.iter().rev().fold(CycloElement::zero(z.conductor()), |acc, c| {
                &(&acc * z) + &CycloElement::from_rational(z.conductor(), c)
            })
        };
        let d = horner(&self.den);
        if d.is_zero() {
            return Err(Error::DivisionByZero("pole of rational function"));
        }
        horner(&self.num).div(&d)
    }
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        poly_mul(&self.num, &other.den) == poly_mul(&other.num, &self.den)
    }
}

fn fmt_poly(p: &[Rational], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let terms: Vec<String> = p
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| match i {
            0 => format!("{c}"),
            1 => format!("{c}*z"),
            _ => format!("{c}*z^{i}"),
        })
        .collect();
    if terms.is_empty() {
        write!(f, "0")
    } else {
        write!(f, "{}", terms.join(" + "))
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        fmt_poly(&self.num, f)?;
        write!(f, ")/(")?;
        fmt_poly(&self.den, f)?;
        write!(f, ")")
    }
}

/// `1 − z`.
pub fn xi() -> RationalFunction {
    RationalFunction::polynomial(vec![Rational::one(), -Rational::one()])
}

fn one_minus_power(e: usize) -> Vec<Rational> {
    let mut p = vec![Rational::zero(); e + 1];
    p[0] = Rational::one();
    p[e] -= Rational::one();
    p
}

/// `(1 − z)^{c²} / (1 − z^c)`.
pub fn xi_c(c: u64) -> Result<RationalFunction> {
    if c == 0 {
        return Err(Error::Config("c must be positive".into()));
    }
    let base = one_minus_power(1);
    let num = (0..c * c).fold(vec![Rational::one()], |acc, _| poly_mul(&acc, &base));
    RationalFunction::new(num, one_minus_power(c as usize))
}

/// `Π_j p(ζ_d^j w)` as a polynomial in `z = w^d`.
fn norm_poly(p: &[Rational], d: u64) -> Result<Vec<Rational>> {
    let mut acc = vec![CycloElement::one(d)];
    for j in 0..d as i64 {
        let twisted: Vec<CycloElement> = p
            .iter()
            .enumerate()
            .map(|(i, c)| CycloElement::zeta_pow(d, j * i as i64).scale(c))
            .collect();
        let mut out = vec![CycloElement::zero(d); acc.len() + twisted.len() - 1];
        for (a, x) in acc.iter().enumerate() {
            for (b, y) in twisted.iter().enumerate() {
                out[a + b] = &out[a + b] + &(x * y);
            }
        }
        acc = out;
    }
    let mut z = Vec::new();
    for (i, c) in acc.iter().enumerate() {
        let q = c
            .as_rational()
            .ok_or_else(|| Error::Unsupported(format!("coefficient of w^{i} is not rational")))?;
        if i as u64 % d == 0 {
            z.push(q);
        } else if !q.is_zero() {
            return Err(Error::Unsupported(format!("w^{i} occurs, not a function of w^{d}")));
        }
    }
    Ok(z)
}

/// `Π_{j<d} f(ζ_d^j w)`, re-expressed in `z = w^d`.
pub fn norm_under_power(f: &RationalFunction, d: u64) -> Result<RationalFunction> {
    if d == 0 {
        return Err(Error::Config("d must be positive".into()));
    }
    RationalFunction::new(norm_poly(&f.num, d)?, norm_poly(&f.den, d)?)
}
