//! Dense integer polynomials and cyclotomic polynomials.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Integer polynomial, coefficients from the constant term upward, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly(Vec<BigInt>);

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly(coeffs)
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.0.is_empty() || other.0.is_empty() {
            return IntPoly(Vec::new());
        }
        let mut out = vec![BigInt::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    /// Exact division by a monic polynomial; `None` if the remainder is nonzero.
    pub fn div_exact_monic(&self, divisor: &IntPoly) -> Option<IntPoly> {
        let dd = divisor.degree()?;
        assert!(divisor.0[dd].is_one(), "divisor must be monic");
        let mut rem = self.0.clone();
        if rem.len() <= dd {
            return rem.iter().all(Zero::is_zero).then(|| IntPoly(Vec::new()));
        }
        let mut quot = vec![BigInt::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = std::mem::take(&mut rem[i]);
            if c.is_zero() {
                continue;
            }
            for j in 0..dd {
                rem[i - dd + j] -= &c * &divisor.0[j];
            }
            quot[i - dd] = c;
        }
        rem.iter().all(Zero::is_zero).then(|| IntPoly::new(quot))
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match (i, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{a}*x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{a}*x^{i}")?,
            }
        }
        Ok(())
    }
}

/// The `m`-th cyclotomic polynomial, obtained by dividing `x^m - 1` by `Φ_d` for every proper divisor `d`.
pub fn cyclo_poly(m: u64) -> IntPoly {
    assert!(m >= 1, "cyclotomic index must be positive");
    let mut coeffs = vec![BigInt::zero(); m as usize + 1];
    coeffs[0] = BigInt::from(-1);
    coeffs[m as usize] = BigInt::one();
    let mut p = IntPoly::new(coeffs);
    for d in (1..m).filter(|d| m % d == 0) {
        p = p
            .div_exact_monic(&cyclo_poly_cached(d).as_int_poly())
            .expect("cyclotomic factors divide x^m - 1");
    }
    p
}

/// Cached `Φ_m` in machine integers, used by the reduction inner loops.
#[derive(Debug)]
pub(crate) struct CycloModulus {
    pub coeffs: Vec<i64>,
}

impl CycloModulus {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn as_int_poly(&self) -> IntPoly {
        IntPoly::from_i64(&self.coeffs)
    }

    /// Reduces `poly` (any length) modulo `Φ_m` in place, truncating to `deg Φ_m` entries.
    pub fn reduce(&self, poly: &mut Vec<BigInt>) {
        let d = self.degree();
        for i in (d..poly.len()).rev() {
            let c = std::mem::take(&mut poly[i]);
            if c.is_zero() {
                continue;
            }
            for (j, &pj) in self.coeffs[..d].iter().enumerate() {
                if pj != 0 {
                    poly[i - d + j] -= &c * pj;
                }
            }
        }
        poly.resize(d, BigInt::zero());
    }
}

pub(crate) fn cyclo_poly_cached(m: u64) -> Arc<CycloModulus> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<CycloModulus>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(hit) = cache.read().expect("cache lock").get(&m) {
        return hit.clone();
    }
    let poly = cyclo_poly(m);
    let coeffs = poly
        .coeffs()
        .iter()
        .map(|c| c.to_i64().expect("cyclotomic coefficients fit in i64"))
        .collect();
    let entry = Arc::new(CycloModulus { coeffs });
    cache.write().expect("cache lock").insert(m, entry.clone());
    entry
}

pub fn euler_phi(m: u64) -> u64 {
    (1..=m).filter(|k| k.gcd(&m) == 1).count() as u64
}
