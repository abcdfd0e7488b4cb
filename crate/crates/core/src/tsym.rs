//! The divided-power algebra `TSym^·` of symmetric tensors in rank 1 or 2.
//!
//! Elements are stored in the basis `e^{[n]} = e_1^{[n_1]}⋯e_d^{[n_d]}` with
//! `e^{[a]}·e^{[b]} = Π C(a_i + b_i, a_i) e^{[a+b]}`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{binomial, factorial, format_rational, parse_rational, Rational, Residue};
use crate::error::{Error, Result};

/// Coefficient ring of a [`TSymElement`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoeffRing {
    Integers,
    Rationals,
    Residues(u64),
}

impl CoeffRing {
    /// Brings a rational into canonical form for the ring.
    pub fn normalize(&self, x: &Rational) -> Result<Rational> {
        match self {
            CoeffRing::Rationals => Ok(x.clone()),
            CoeffRing::Integers => {
                if x.is_integer() {
                    Ok(x.clone())
                } else {
                    Err(Error::NotIntegral {
                        value: format_rational(x),
                        prime: smallest_prime_factor(x.denom()),
                    })
                }
            }
            CoeffRing::Residues(m) => {
                let r = Residue::from_rational(x, *m)?;
                Ok(Rational::from_integer(BigInt::from(r.value())))
            }
        }
    }

    pub fn tag(&self) -> String {
        match self {
            CoeffRing::Integers => "ZZ".into(),
            CoeffRing::Rationals => "QQ".into(),
            CoeffRing::Residues(m) => format!("Z/{m}"),
        }
    }

    pub fn from_tag(s: &str) -> Result<Self> {
        match s {
            "ZZ" => Ok(CoeffRing::Integers),
            "QQ" => Ok(CoeffRing::Rationals),
            _ => s
                .strip_prefix("Z/")
                .and_then(|m| m.parse::<u64>().ok())
                .filter(|&m| m > 0)
                .map(CoeffRing::Residues)
                .ok_or_else(|| Error::Parse(format!("unknown ring tag {s:?}"))),
        }
    }
}

fn smallest_prime_factor(n: &BigInt) -> u64 {
    let mut p = 2u64;
    loop {
        if (n % BigInt::from(p)).is_zero() {
            return p;
        }
        p += 1;
    }
}

/// Exponent tuples `n` with `|n| = k` in rank `d`, lexicographically decreasing in `n_1`.
pub fn exponents(d: usize, k: u32) -> Vec<Vec<u32>> {
    match d {
        0 => {
            if k == 0 {
                vec![vec![]]
            } else {
                vec![]
            }
        }
        1 => vec![vec![k]],
        _ => (0..=k)
            .rev()
            .flat_map(|a| {
                exponents(d - 1, k - a).into_iter().map(move |mut rest| {
                    rest.insert(0, a);
                    rest
                })
            })
            .collect(),
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct TSymElement {
    d: usize,
    ring: CoeffRing,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl TSymElement {
    pub fn zero(d: usize, ring: CoeffRing) -> Self {
        TSymElement { d, ring, terms: BTreeMap::new() }
    }

    pub fn one(d: usize, ring: CoeffRing) -> Self {
        Self::basis(d, ring, vec![0; d])
    }

    /// The basis element `e^{[n]}`.
    pub fn basis(d: usize, ring: CoeffRing, n: Vec<u32>) -> Self {
        assert_eq!(n.len(), d, "exponent tuple has the wrong rank");
        let mut out = Self::zero(d, ring);
        out.push(n, &Rational::one());
        out
    }

    pub fn from_terms(
        d: usize,
        ring: CoeffRing,
        terms: impl IntoIterator<Item = (Vec<u32>, Rational)>,
    ) -> Result<Self> {
        let mut out = Self::zero(d, ring);
        for (n, c) in terms {
            if n.len() != d {
                return Err(Error::Incompatible(format!("exponent {n:?} in rank {d}")));
            }
            let c = ring.normalize(&c)?;
            out.push(n, &c);
        }
        Ok(out)
    }

    /// The degree-1 element `Σ c_i e_i`.
    pub fn linear(ring: CoeffRing, coords: &[Rational]) -> Result<Self> {
        let d = coords.len();
        Self::from_terms(
            d,
            ring,
            coords.iter().enumerate().map(|(i, c)| {
                let mut n = vec![0; d];
                n[i] = 1;
                (n, c.clone())
            }),
        )
    }

    fn push(&mut self, n: Vec<u32>, c: &Rational) {
        let sum = self.terms.remove(&n).unwrap_or_else(Rational::zero) + c;
        let sum = self.ring.normalize(&sum).expect("ring-closed arithmetic");
        if !sum.is_zero() {
            self.terms.insert(n, sum);
        }
    }

    pub fn rank(&self) -> usize {
        self.d
    }

    pub fn ring(&self) -> CoeffRing {
        self.ring
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Rational> {
        &self.terms
    }

    pub fn coeff(&self, n: &[u32]) -> Rational {
        self.terms.get(n).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The degree-`k` homogeneous component.
    pub fn component(&self, k: u32) -> Self {
        TSymElement {
            d: self.d,
            ring: self.ring,
            terms: self
                .terms
                .iter()
                .filter(|(n, _)| n.iter().sum::<u32>() == k)
                .map(|(n, c)| (n.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn degrees(&self) -> Vec<u32> {
        let mut ks: Vec<u32> = self.terms.keys().map(|n| n.iter().sum()).collect();
        ks.sort_unstable();
        ks.dedup();
        ks
    }

    /// Drops every component of degree above `k_max`.
    pub fn truncate_degree(&self, k_max: u32) -> Self {
        TSymElement {
            d: self.d,
            ring: self.ring,
            terms: self
                .terms
                .iter()
                .filter(|(n, _)| n.iter().sum::<u32>() <= k_max)
                .map(|(n, c)| (n.clone(), c.clone()))
                .collect(),
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.d != other.d || self.ring != other.ring {
            return Err(Error::Incompatible(format!(
                "TSym rank/ring mismatch: ({}, {}) vs ({}, {})",
                self.d,
                self.ring.tag(),
                other.d,
                other.ring.tag()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (n, c) in &other.terms {
            out.push(n.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-Rational::one())?)
    }

    pub fn scale(&self, c: &Rational) -> Result<Self> {
        let c = self.ring.normalize(c)?;
        let mut out = Self::zero(self.d, self.ring);
        for (n, a) in &self.terms {
            out.push(n.clone(), &(a * &c));
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.d, self.ring);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let coef: BigInt = a.iter().zip(b).map(|(&i, &j)| binomial(i + j, i)).product();
                let n: Vec<u32> = a.iter().zip(b).map(|(i, j)| i + j).collect();
                out.push(n, &(x * y * Rational::from_integer(coef)));
            }
        }
        Ok(out)
    }

    /// Reduces coefficients into another ring (e.g. `Q → Z/ℓ^r`).
    pub fn base_change(&self, ring: CoeffRing) -> Result<Self> {
        Self::from_terms(self.d, ring, self.terms.clone())
    }

    /// Coordinates of a homogeneous degree-1 element.
    pub fn linear_coords(&self) -> Option<Vec<Rational>> {
        if self.terms.keys().any(|n| n.iter().sum::<u32>() != 1) {
            return None;
        }
        Some(
            (0..self.d)
                .map(|i| {
                    let mut n = vec![0; self.d];
                    n[i] = 1;
                    self.coeff(&n)
                })
                .collect(),
        )
    }

    /// `h^{[k]}` for `h` of pure degree 1.
    pub fn divided_power(&self, k: u32) -> Result<Self> {
        let coords = self
            .linear_coords()
            .ok_or_else(|| Error::Incompatible("divided power of a non-linear element".into()))?;
        Self::from_terms(
            self.d,
            self.ring,
            exponents(self.d, k).into_iter().map(|n| {
                let c: Rational = coords
                    .iter()
                    .zip(&n)
                    .map(|(ci, &ni)| num_traits::pow(ci.clone(), ni as usize))
                    .product();
                (n, c)
            }),
        )
    }

    /// Image of the symmetric monomial `e_1^{n_1}⋯e_d^{n_d}` under `Sym → TSym`.
    pub fn sym_to_tsym(ring: CoeffRing, n: &[u32]) -> Result<Self> {
        let c: BigInt = n.iter().map(|&k| factorial(k)).product();
        Self::from_terms(n.len(), ring, [(n.to_vec(), Rational::from_integer(c))])
    }

    /// `TSym(φ)` for an integer matrix `φ` with `φ(e_j) = Σ_i φ[i][j] e'_i`.
    pub fn map_matrix(&self, phi: &[Vec<i64>]) -> Result<Self> {
        let rows = phi.len();
        if rows == 0 || phi.iter().any(|row| row.len() != self.d) {
            return Err(Error::Incompatible(format!("matrix shape does not match rank {}", self.d)));
        }
        let images: Vec<Self> = (0..self.d)
            .map(|j| {
                let col: Vec<Rational> = phi.iter().map(|row| Rational::from_integer(row[j].into())).collect();
                Self::linear(self.ring, &col)
            })
            .collect::<Result<_>>()?;
        let mut out = Self::zero(rows, self.ring);
        for (n, c) in &self.terms {
            let mut term = Self::one(rows, self.ring);
            for (img, &nj) in images.iter().zip(n) {
                term = term.mul(&img.divided_power(nj)?)?;
            }
            out = out.add(&term.scale(c)?)?;
        }
        Ok(out)
    }

    /// `TSym([c])`: multiplication by `c^k` on degree `k`.
    pub fn map_scalar(&self, c: i64) -> Result<Self> {
        let mut out = Self::zero(self.d, self.ring);
        for (n, a) in &self.terms {
            let k: u32 = n.iter().sum();
            let f = Rational::from_integer(num_traits::pow(BigInt::from(c), k as usize));
            out.push(n.clone(), &self.ring.normalize(&(a * f))?);
        }
        Ok(out)
    }
}

impl fmt::Display for TSymElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(n, c)| {
                let basis: Vec<String> = n
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, k)| if self.d == 1 { format!("e^[{k}]") } else { format!("e{}^[{k}]", i + 1) })
                    .collect();
                if basis.is_empty() {
                    format!("{c}")
                } else {
                    format!("{c}*{}", basis.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for TSymElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TSym[{}; {}]({})", self.d, self.ring.tag(), self)
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    n: Vec<u32>,
    c: String,
}

#[derive(Serialize, Deserialize)]
struct ComponentRepr {
    k: u32,
    terms: Vec<TermRepr>,
}

#[derive(Serialize, Deserialize)]
struct TSymRepr {
    d: usize,
    ring: String,
    components: Vec<ComponentRepr>,
}

impl Serialize for TSymElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let components = self
            .degrees()
            .into_iter()
            .map(|k| ComponentRepr {
                k,
                terms: self
                    .component(k)
                    .terms
                    .iter()
                    .map(|(n, c)| TermRepr { n: n.clone(), c: format_rational(c) })
                    .collect(),
            })
            .collect();
        TSymRepr { d: self.d, ring: self.ring.tag(), components }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TSymElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = TSymRepr::deserialize(d)?;
        let ring = CoeffRing::from_tag(&r.ring).map_err(D::Error::custom)?;
        let mut terms = Vec::new();
        for comp in r.components {
            for t in comp.terms {
                if t.n.iter().sum::<u32>() != comp.k {
                    return Err(D::Error::custom(format!("exponent {:?} not of degree {}", t.n, comp.k)));
                }
                terms.push((t.n, parse_rational(&t.c).map_err(D::Error::custom)?));
            }
        }
        TSymElement::from_terms(r.d, ring, terms).map_err(D::Error::custom)
    }
}
