//! Bernoulli polynomials and the `c`-smoothed second Bernoulli measure.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{binomial, frac, pow, Rational};
use crate::error::{Error, Result};
use crate::measure::{is_prime, Measure, Support, TorsorSpec};

/// A polynomial with rational coefficients, constant term first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BernoulliPolynomial {
    coeffs: Vec<Rational>,
}

impl BernoulliPolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }
}

/// All `B_0, …, B_k`, from `Σ_{j≤k} C(k+1, j) B_j(x) = (k+1) x^k`.
pub fn bernoulli_polys_upto(k: usize) -> Vec<BernoulliPolynomial> {
    let mut out: Vec<Vec<Rational>> = Vec::with_capacity(k + 1);
    for n in 0..=k {
        // (n+1) B_n = (n+1) x^n - Σ_{j<n} C(n+1, j) B_j
        let mut c = vec![Rational::zero(); n + 1];
        c[n] = Rational::from_integer(BigInt::from(n + 1));
        for (j, bj) in out.iter().enumerate() {
            let w = Rational::from_integer(binomial(n as u32 + 1, j as u32));
            for (i, a) in bj.iter().enumerate() {
                c[i] -= &w * a;
            }
        }
        let scale = Rational::from_integer(BigInt::from(n + 1)).recip();
        out.push(c.into_iter().map(|a| a * &scale).collect());
    }
    out.into_iter().map(|coeffs| BernoulliPolynomial { coeffs }).collect()
}

pub fn bernoulli_poly(k: usize) -> BernoulliPolynomial {
    bernoulli_polys_upto(k).pop().expect("nonempty")
}

/// `B_k({x})`.
pub fn bernoulli_frac(k: usize, x: &Rational) -> Rational {
    bernoulli_poly(k).eval(&frac(x))
}

fn b2(x: &Rational) -> Rational {
    let x = frac(x);
    &x * &x - &x + Rational::new(1.into(), 6.into())
}

/// `(M/2)(c² B₂({x/M}) − B₂({cx/M}))`.
pub fn smoothed_b2(level: u64, c: i64, x: i64) -> Rational {
    let m = Rational::from_integer(level.into());
    let xm = Rational::new(x.into(), level.into());
    let cc = Rational::from_integer((c * c).into());
    let cx = Rational::new((c * x).into(), level.into());
    &m / Rational::from_integer(2.into()) * (cc * b2(&xm) - b2(&cx))
}

/// Parameters `(ℓ, r, N, c, t)` of the smoothed measure on `Z/ℓ^rN ⟨t⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BernoulliMeasureSpec {
    pub ell: u64,
    pub r: u32,
    #[serde(rename = "N")]
    pub n: u64,
    pub c: i64,
    pub t: u64,
}

impl BernoulliMeasureSpec {
    pub fn new(ell: u64, r: u32, n: u64, c: i64, t: u64) -> Result<Self> {
        let s = BernoulliMeasureSpec { ell, r, n, c, t: t % n.max(1) };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.ell) {
            return Err(Error::Config(format!("{} is not prime", self.ell)));
        }
        let ln = (self.ell * self.n) as i64;
        if self.c.gcd(&ln) != 1 {
            return Err(Error::Config(format!(
                "gcd(c, ell*N) = gcd({}, {ln}) != 1",
                self.c
            )));
        }
        TorsorSpec::reduction(self.ell, self.r, self.n, vec![self.t]).map(|_| ())
    }

    /// Additionally require `gcd(c, 6) = 1`, as the elliptic units do.
    pub fn validate_for_units(&self) -> Result<()> {
        self.validate()?;
        if self.c.gcd(&6) != 1 {
            return Err(Error::Config(format!("gcd(c, 6) = gcd({}, 6) != 1", self.c)));
        }
        Ok(())
    }

    pub fn torsor(&self) -> TorsorSpec {
        TorsorSpec::reduction(self.ell, self.r, self.n, vec![self.t]).expect("validated")
    }

    pub fn at_level(&self, r: u32) -> Self {
        BernoulliMeasureSpec { r, ..self.clone() }
    }
}

/// The measure `x ↦ (M/2)(c²B₂({x/M}) − B₂({cx/M}))` on `Z/M ⟨t⟩`, `M = ℓ^rN`.
pub fn bernoulli_measure(spec: &BernoulliMeasureSpec) -> Measure {
    let torsor = spec.torsor();
    let m = torsor.modulus();
    Measure::from_fn(Support::Torsor(torsor), |x| smoothed_b2(m, spec.c, x[0] as i64))
}

/// The first value whose denominator is not 1, if any.
pub fn first_non_integral(mu: &Measure) -> Option<(Vec<u64>, Rational)> {
    mu.values()
        .iter()
        .find(|(_, v)| !v.is_integer())
        .map(|(x, v)| (x.clone(), v.clone()))
}

/// `Bp(x, y) = ℓ^{-r}·B_{2,c,r}(x)` on the rank-2 torsor over `(a, b)` (multiplication flavor).
pub fn bernoulli_measure_rank2(ell: u64, r: u32, n: u64, c: i64, t: (u64, u64)) -> Result<Measure> {
    let spec = TorsorSpec::multiplication(ell, r, n, vec![t.0, t.1])?;
    let m = spec.modulus();
    let lr = Rational::from_integer(spec.ell_power().into());
    Ok(Measure::from_fn(Support::Torsor(spec), |x| smoothed_b2(m, c, x[0] as i64) / &lr))
}

/// `N^{k+1}/(c^k (k+2)) · (c^{k+2} B_{k+2}({t/N}) − B_{k+2}({ct/N}))`.
pub fn bernoulli_moment_closed(k: u32, n: u64, c: i64, t: i64) -> Rational {
    let kk = k as usize + 2;
    let poly = bernoulli_poly(kk);
    let cr = Rational::from_integer(c.into());
    let nn = Rational::from_integer(n.into());
    let tn = frac(&Rational::new(t.into(), n.into()));
    let ctn = frac(&Rational::new((c * t).into(), n.into()));
    let lead = pow(&nn, k as i64 + 1) / (pow(&cr, k as i64) * Rational::from_integer(kk.into()));
    lead * (pow(&cr, kk as i64) * poly.eval(&tn) - poly.eval(&ctn))
}

/// Bernoulli number `B_k = B_k(0)`.
pub fn bernoulli_number(k: usize) -> Rational {
    bernoulli_poly(k).coeffs()[0].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::moments::torsor_moment_sum;

    #[test]
    fn polynomials() {
        assert_eq!(bernoulli_poly(0).coeffs(), &[int(1)]);
        assert_eq!(bernoulli_poly(2).coeffs(), &[rat(1, 6), int(-1), int(1)]);
        assert_eq!(bernoulli_poly(4).coeffs(), &[rat(-1, 30), int(0), int(1), int(-2), int(1)]);
        assert_eq!(bernoulli_number(4), rat(-1, 30));
        assert_eq!(bernoulli_frac(4, &rat(1, 3)), rat(13, 810));
    }

    #[test]
    fn polynomial_identities() {
        let polys = bernoulli_polys_upto(8);
        for (k, p) in polys.iter().enumerate().skip(1) {
            for x in [rat(0, 1), rat(1, 3), rat(-5, 7), rat(11, 4)] {
                let diff = p.eval(&(&x + int(1))) - p.eval(&x);
                assert_eq!(diff, int(k as i64) * pow(&x, k as i64 - 1));
                let sign = if k % 2 == 0 { int(1) } else { int(-1) };
                assert_eq!(p.eval(&(int(1) - &x)), sign * p.eval(&x));
            }
        }
    }

    #[test]
    fn measure_values() {
        let mu = bernoulli_measure(&BernoulliMeasureSpec::new(2, 1, 3, 5, 1).unwrap());
        assert_eq!(mu.get(&[1]), int(2));
        assert_eq!(mu.get(&[4]), int(-4));
        let nu = bernoulli_measure(&BernoulliMeasureSpec::new(5, 1, 3, 7, 1).unwrap());
        assert_eq!(nu.get(&[10]), int(-20));
        assert_eq!(torsor_moment_sum(&nu, 1), int(-181));
        let tw = bernoulli_measure(&BernoulliMeasureSpec::new(2, 2, 3, 5, 1).unwrap());
        assert_eq!(torsor_moment_sum(&tw, 1), int(-62));
    }

    #[test]
    fn closed_values() {
        assert_eq!(bernoulli_moment_closed(1, 3, 7, 1), rat(38, 7));
        assert_eq!(bernoulli_moment_closed(1, 3, 5, 1), rat(14, 5));
        assert_eq!(bernoulli_moment_closed(0, 5, 1, 2), int(0));
    }

    #[test]
    fn gcd_checks() {
        assert!(BernoulliMeasureSpec::new(2, 1, 3, 2, 1).is_err());
        assert!(BernoulliMeasureSpec::new(5, 1, 3, 3, 1).is_err());
        assert!(BernoulliMeasureSpec::new(5, 1, 2, 7, 1).unwrap().validate_for_units().is_ok());
        assert!(BernoulliMeasureSpec::new(7, 1, 2, 3, 1).unwrap().validate_for_units().is_err());
    }

    #[test]
    fn tower_traces() {
        for (ell, n, c) in [(2u64, 3u64, 5i64), (3, 4, 7), (5, 3, 7)] {
            for t in 0..n {
                for r in 0..3 {
                    let s = BernoulliMeasureSpec::new(ell, r + 1, n, c, t).unwrap();
                    let up = bernoulli_measure(&s);
                    assert_eq!(up.trace().unwrap(), bernoulli_measure(&s.at_level(r)));
                    assert!(first_non_integral(&up).is_none());
                }
            }
        }
    }
}
