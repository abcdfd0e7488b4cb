//! Exact arithmetic in `Q(ζ_M)`, stored as the reduced residue modulo `Φ_M`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::poly::cyclo_poly_cached;
use super::{format_rational, parse_rational, Rational};
use crate::error::{Error, Result};

/// An element `Σ a_i ζ_M^i` with `deg < φ(M)`.
///
/// Internally the coefficients share one positive denominator, coprime to the
/// content of the numerators, so structural equality is field equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycloElement {
    m: u64,
    num: Vec<BigInt>,
    den: BigInt,
}

impl CycloElement {
    fn from_parts(m: u64, mut num: Vec<BigInt>, den: BigInt) -> Self {
        let modulus = cyclo_poly_cached(m);
        modulus.reduce(&mut num);
        let mut out = CycloElement { m, num, den };
        out.normalize();
        out
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.den = -std::mem::take(&mut self.den);
            for c in &mut self.num {
                *c = -std::mem::take(c);
            }
        }
        let g = self.num.iter().fold(self.den.clone(), |g, c| g.gcd(c));
        if self.num.iter().all(Zero::is_zero) {
            self.den = BigInt::one();
        } else if !g.is_one() {
            for c in &mut self.num {
                *c /= &g;
            }
            self.den /= &g;
        }
    }

    pub fn zero(m: u64) -> Self {
        Self::from_rational(m, &Rational::zero())
    }

    pub fn one(m: u64) -> Self {
        Self::from_rational(m, &Rational::one())
    }

    pub fn from_rational(m: u64, x: &Rational) -> Self {
        let mut num = vec![BigInt::zero(); cyclo_poly_cached(m).degree()];
        num[0] = x.numer().clone();
        CycloElement { m, num, den: x.denom().clone() }
    }

    pub fn from_int(m: u64, x: i64) -> Self {
        Self::from_rational(m, &Rational::from_integer(BigInt::from(x)))
    }

    /// `ζ_M^e` for any integer `e`.
    pub fn zeta_pow(m: u64, e: i64) -> Self {
        let e = e.rem_euclid(m as i64) as usize;
        let mut num = vec![BigInt::zero(); (m as usize).max(1)];
        num[e % (m as usize)] = BigInt::one();
        Self::from_parts(m, num, BigInt::one())
    }

    pub fn zeta(m: u64) -> Self {
        Self::zeta_pow(m, 1)
    }

    /// Builds `Σ c_i ζ_M^i` from coefficients of any length.
    pub fn from_coeffs(m: u64, coeffs: &[Rational]) -> Self {
        let den = coeffs.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let mut num: Vec<BigInt> = coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        let d = cyclo_poly_cached(m).degree();
        if num.len() < d {
            num.resize(d, BigInt::zero());
        }
        Self::from_parts(m, num, den)
    }

    pub fn conductor(&self) -> u64 {
        self.m
    }

    /// The `φ(M)` reduced coefficients.
    pub fn coeffs(&self) -> Vec<Rational> {
        self.num
            .iter()
            .map(|c| Rational::new(c.clone(), self.den.clone()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().is_some_and(|r| r.is_one())
    }

    /// The value as a rational, if it lies in `Q`.
    pub fn as_rational(&self) -> Option<Rational> {
        self.num[1..]
            .iter()
            .all(Zero::is_zero)
            .then(|| Rational::new(self.num[0].clone(), self.den.clone()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let num = self.num.iter().map(|x| x * c.numer()).collect();
        let mut out = CycloElement { m: self.m, num, den: &self.den * c.denom() };
        out.normalize();
        out
    }

    /// Image under `ζ_M ↦ ζ_{M'}^{M'/M}`.
    pub fn embed(&self, target: u64) -> Result<Self> {
        if target % self.m != 0 {
            return Err(Error::NonDivisibleConductor { from: self.m, to: target });
        }
        if target == self.m {
            return Ok(self.clone());
        }
        let step = (target / self.m) as usize;
        let mut num = vec![BigInt::zero(); target as usize];
        for (i, c) in self.num.iter().enumerate() {
            num[i * step] = c.clone();
        }
        Ok(Self::from_parts(target, num, self.den.clone()))
    }

    /// The automorphism `ζ_M ↦ ζ_M^u`.
    pub fn galois_act(&self, u: i64) -> Result<Self> {
        let m = self.m as i64;
        if u.gcd(&m) != 1 {
            return Err(Error::NotCoprime { value: u, modulus: self.m });
        }
        Ok(self.substitute_power(u))
    }

    /// `ζ ↦ ζ^u` applied to the representative; a homomorphism only for units `u`.
    fn substitute_power(&self, u: i64) -> Self {
        let m = self.m as i64;
        let mut num = vec![BigInt::zero(); self.m as usize];
        for (i, c) in self.num.iter().enumerate() {
            let j = (i as i64 * u).rem_euclid(m) as usize;
            num[j] += c;
        }
        Self::from_parts(self.m, num, self.den.clone())
    }

    /// Field norm down to `Q`.
    pub fn norm(&self) -> Rational {
        let prod = self.conjugate_product();
        (self * &prod)
            .as_rational()
            .expect("norm of a cyclotomic element is rational")
    }

    fn conjugate_product(&self) -> Self {
        let m = self.m as i64;
        (2..m.max(2))
            .filter(|u| u.gcd(&m) == 1)
            .fold(Self::one(self.m), |acc, u| &acc * &self.substitute_power(u))
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero("cyclotomic inverse"));
        }
        let prod = self.conjugate_product();
        let n = (self * &prod)
            .as_rational()
            .expect("norm of a cyclotomic element is rational");
        Ok(prod.scale(&n.recip()))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one(self.m);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    /// Lifts both operands to the least common conductor.
    fn common(a: &Self, b: &Self) -> (Self, Self) {
        if a.m == b.m {
            return (a.clone(), b.clone());
        }
        let l = a.m.lcm(&b.m);
        (a.embed(l).unwrap(), b.embed(l).unwrap())
    }

    fn add_same(&self, other: &Self) -> Self {
        let num = self
            .num
            .iter()
            .zip(&other.num)
            .map(|(a, b)| a * &other.den + b * &self.den)
            .collect();
        let mut out = CycloElement { m: self.m, num, den: &self.den * &other.den };
        out.normalize();
        out
    }

    fn mul_same(&self, other: &Self) -> Self {
        let d = self.num.len();
        let mut prod = vec![BigInt::zero(); 2 * d - 1];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.num.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        Self::from_parts(self.m, prod, &self.den * &other.den)
    }
}

impl<'a> Add<&'a CycloElement> for &'a CycloElement {
    type Output = CycloElement;
    fn add(self, rhs: &CycloElement) -> CycloElement {
        if self.m == rhs.m {
            return self.add_same(rhs);
        }
        let (a, b) = CycloElement::common(self, rhs);
        a.add_same(&b)
    }
}

impl<'a> Sub<&'a CycloElement> for &'a CycloElement {
    type Output = CycloElement;
    fn sub(self, rhs: &CycloElement) -> CycloElement {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a CycloElement> for &'a CycloElement {
    type Output = CycloElement;
    fn mul(self, rhs: &CycloElement) -> CycloElement {
        if self.m == rhs.m {
            return self.mul_same(rhs);
        }
        let (a, b) = CycloElement::common(self, rhs);
        a.mul_same(&b)
    }
}

impl Neg for &CycloElement {
    type Output = CycloElement;
    fn neg(self) -> CycloElement {
        CycloElement {
            m: self.m,
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for CycloElement {
            type Output = CycloElement;
            fn $f(self, rhs: CycloElement) -> CycloElement {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for CycloElement {
    type Output = CycloElement;
    fn neg(self) -> CycloElement {
        -&self
    }
}

impl fmt::Display for CycloElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs()
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
}

impl fmt::Debug for CycloElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(z_{})[{}]", self.m, self)
    }
}

#[derive(Serialize, Deserialize)]
struct CycloRepr {
    #[serde(rename = "M")]
    m: u64,
    coeffs: Vec<String>,
}

impl Serialize for CycloElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CycloRepr {
            m: self.m,
            coeffs: self.coeffs().iter().map(format_rational).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycloElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = CycloRepr::deserialize(d)?;
        if repr.m == 0 {
            return Err(serde::de::Error::custom("conductor must be positive"));
        }
        let coeffs = repr
            .coeffs
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        Ok(CycloElement::from_coeffs(repr.m, &coeffs))
    }
}
