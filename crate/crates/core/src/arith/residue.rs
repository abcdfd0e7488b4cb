use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::Rational;
use crate::error::{Error, Result};

/// An element of `Z/mZ`, stored as its representative in `[0, m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Residue {
    modulus: u64,
    value: u64,
}

impl Residue {
    pub fn new(value: i64, modulus: u64) -> Self {
        assert!(modulus > 0, "modulus must be positive");
        let value = value.rem_euclid(modulus as i64) as u64;
        Residue { modulus, value }
    }

    pub fn from_bigint(value: &BigInt, modulus: u64) -> Self {
        let m = BigInt::from(modulus);
        let v = value.mod_floor(&m).to_u64().expect("reduced value fits in u64");
        Residue { modulus, value: v }
    }

    /// Reduces a rational whose denominator is a unit mod `modulus`.
    pub fn from_rational(x: &Rational, modulus: u64) -> Result<Self> {
        let den = Residue::from_bigint(x.denom(), modulus);
        let inv = den.inverse().ok_or_else(|| Error::NotIntegral {
            value: super::format_rational(x),
            prime: smallest_common_prime(x.denom(), modulus),
        })?;
        Ok(Residue::from_bigint(x.numer(), modulus) * inv)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.modulus == 1 {
            return Some(*self);
        }
        let e = (self.value as i64).extended_gcd(&(self.modulus as i64));
        (e.gcd == 1).then(|| Residue::new(e.x, self.modulus))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = *self;
        let mut acc = Residue::new(1, self.modulus);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

fn smallest_common_prime(den: &BigInt, modulus: u64) -> u64 {
    let g = BigInt::from(modulus).gcd(den).to_u64().unwrap_or(modulus);
    (2..=g).find(|p| g % p == 0).unwrap_or(g)
}

impl std::ops::Add for Residue {
    type Output = Residue;
    fn add(self, rhs: Residue) -> Residue {
        assert_eq!(self.modulus, rhs.modulus, "mismatched moduli");
        Residue {
            modulus: self.modulus,
            value: ((self.value as u128 + rhs.value as u128) % self.modulus as u128) as u64,
        }
    }
}

impl std::ops::Neg for Residue {
    type Output = Residue;
    fn neg(self) -> Residue {
        Residue {
            modulus: self.modulus,
            value: (self.modulus - self.value) % self.modulus,
        }
    }
}

impl std::ops::Sub for Residue {
    type Output = Residue;
    fn sub(self, rhs: Residue) -> Residue {
        self + (-rhs)
    }
}

impl std::ops::Mul for Residue {
    type Output = Residue;
    fn mul(self, rhs: Residue) -> Residue {
        assert_eq!(self.modulus, rhs.modulus, "mismatched moduli");
        Residue {
            modulus: self.modulus,
            value: ((self.value as u128 * rhs.value as u128) % self.modulus as u128) as u64,
        }
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}

/// `x mod m` for a possibly negative integer, as a `u64` in `[0, m)`.
pub fn mod_u64(x: i64, m: u64) -> u64 {
    x.rem_euclid(m as i64) as u64
}

pub fn is_zero_mod(x: &BigInt, m: u64) -> bool {
    (x % BigInt::from(m)).is_zero()
}
