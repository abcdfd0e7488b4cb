//! Truncated Laurent–Puiseux series in `q^{1/M}` over `Q(ζ_M)`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{CycloElement, Rational};
use crate::error::{Error, Result};

/// `Σ_{n<T} a_n q^{n/M} + O(q^{T/M})`, coefficients in `Q(ζ_M)`.
#[derive(Clone, PartialEq, Eq)]
pub struct PuiseuxSeries {
    m: u64,
    trunc: i64,
    terms: BTreeMap<i64, CycloElement>,
}

impl PuiseuxSeries {
    /// Builds a series, dropping zero coefficients and exponents at or past `trunc`.
    /// Coefficients must already live in `Q(ζ_M)` (or a subfield, which is embedded).
    pub fn new(m: u64, trunc: i64, terms: impl IntoIterator<Item = (i64, CycloElement)>) -> Self {
        let mut out = PuiseuxSeries { m, trunc, terms: BTreeMap::new() };
        for (n, c) in terms {
            out.add_term(n, c);
        }
        out
    }

    fn add_term(&mut self, n: i64, c: CycloElement) {
        if n >= self.trunc || c.is_zero() {
            return;
        }
        let c = c.embed(self.m).expect("coefficient conductor divides the series denominator");
        match self.terms.remove(&n) {
            Some(old) => {
                let s = &old + &c;
                if !s.is_zero() {
                    self.terms.insert(n, s);
                }
            }
            None => {
                self.terms.insert(n, c);
            }
        }
    }

    pub fn zero(m: u64, trunc: i64) -> Self {
        PuiseuxSeries { m, trunc, terms: BTreeMap::new() }
    }

    pub fn constant(c: CycloElement, m: u64, trunc: i64) -> Self {
        Self::monomial(c, 0, m, trunc)
    }

    pub fn one(m: u64, trunc: i64) -> Self {
        Self::constant(CycloElement::one(m), m, trunc)
    }

    /// `c·q^{n/M}`.
    pub fn monomial(c: CycloElement, n: i64, m: u64, trunc: i64) -> Self {
        Self::new(m, trunc, [(n, c)])
    }

    pub fn denominator(&self) -> u64 {
        self.m
    }

    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &CycloElement)> {
        self.terms.iter().map(|(&n, c)| (n, c))
    }

    pub fn coeff(&self, n: i64) -> CycloElement {
        self.terms.get(&n).cloned().unwrap_or_else(|| CycloElement::zero(self.m))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Least exponent numerator with a nonzero coefficient.
    pub fn valuation_units(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// The valuation as the rational `n/M`.
    pub fn valuation(&self) -> Result<Rational> {
        self.valuation_units()
            .map(|n| Rational::new(n.into(), (self.m as i64).into()))
            .ok_or(Error::ZeroToTruncation { trunc: self.trunc, denominator: self.m })
    }

    /// Effective valuation for truncation bookkeeping: a zero series counts as `T`.
    fn window_valuation(&self) -> i64 {
        self.valuation_units().unwrap_or(self.trunc)
    }

    pub fn constant_term(&self) -> Result<CycloElement> {
        if self.trunc <= 0 {
            return Err(Error::TruncationTooSmall { requested: self.trunc, needed: 0 });
        }
        Ok(self.coeff(0))
    }

    pub fn truncate(&self, trunc: i64) -> Self {
        let trunc = trunc.min(self.trunc);
        PuiseuxSeries {
            m: self.m,
            trunc,
            terms: self.terms.range(..trunc).map(|(&n, c)| (n, c.clone())).collect(),
        }
    }

    /// Multiplies by `q^{e/M}` exactly.
    pub fn shift(&self, e: i64) -> Self {
        PuiseuxSeries {
            m: self.m,
            trunc: self.trunc + e,
            terms: self.terms.iter().map(|(&n, c)| (n + e, c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &CycloElement) -> Self {
        Self::new(self.m, self.trunc, self.terms.iter().map(|(&n, a)| (n, a * c)))
    }

    pub fn neg(&self) -> Self {
        PuiseuxSeries {
            m: self.m,
            trunc: self.trunc,
            terms: self.terms.iter().map(|(&n, c)| (n, -c)).collect(),
        }
    }

    /// Re-expresses the series in `q^{1/M'}` over `Q(ζ_{M'})`.
    pub fn rescale(&self, target: u64) -> Result<Self> {
        if target % self.m != 0 {
            return Err(Error::NonDivisibleConductor { from: self.m, to: target });
        }
        let s = (target / self.m) as i64;
        let terms = self
            .terms
            .iter()
            .map(|(&n, c)| Ok((n * s, c.embed(target)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(PuiseuxSeries { m: target, trunc: self.trunc * s, terms })
    }

    /// Substitutes `q^{1/M} ↦ ζ_M^j q^{1/M}`.
    pub fn rotate(&self, j: i64) -> Self {
        let m = self.m;
        Self::new(
            m,
            self.trunc,
            self.terms
                .iter()
                .map(|(&n, c)| (n, c * &CycloElement::zeta_pow(m, j * n))),
        )
    }

    fn common(a: &Self, b: &Self) -> (Self, Self) {
        if a.m == b.m {
            return (a.clone(), b.clone());
        }
        let l = num_integer::lcm(a.m, b.m);
        (a.rescale(l).unwrap(), b.rescale(l).unwrap())
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.m != other.m {
            let (a, b) = Self::common(self, other);
            return a.add(&b);
        }
        let trunc = self.trunc.min(other.trunc);
        let mut out = self.truncate(trunc);
        for (&n, c) in other.terms.range(..trunc) {
            out.add_term(n, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.m != other.m {
            let (a, b) = Self::common(self, other);
            return a.mul(&b);
        }
        let vf = self.window_valuation();
        let vg = other.window_valuation();
        let trunc = (self.trunc + vg).min(other.trunc + vf);
        let mut acc: BTreeMap<i64, CycloElement> = BTreeMap::new();
        for (&i, a) in &self.terms {
            if i + vg >= trunc {
                break;
            }
            for (&j, b) in &other.terms {
                if i + j >= trunc {
                    break;
                }
                let p = a * b;
                acc.entry(i + j)
                    .and_modify(|s| *s = &*s + &p)
                    .or_insert(p);
            }
        }
        acc.retain(|_, c| !c.is_zero());
        PuiseuxSeries { m: self.m, trunc, terms: acc }
    }

    /// Inverse of a series whose leading coefficient is known; the window shrinks from `T` to `T - 2v`.
    pub fn invert(&self) -> Result<Self> {
        let v = self
            .valuation_units()
            .ok_or(Error::ZeroToTruncation { trunc: self.trunc, denominator: self.m })?;
        let lead_inv = self.terms[&v].inv()?;
        let len = self.trunc - v;
        // b_n for the unit part, relative exponents 0..len
        let mut b: Vec<CycloElement> = Vec::with_capacity(len as usize);
        for n in 0..len {
            let mut s = if n == 0 { CycloElement::one(self.m) } else { CycloElement::zero(self.m) };
            for (&k, a) in self.terms.range(v + 1..) {
                let k = k - v;
                if k > n {
                    break;
                }
                s = &s - &(a * &b[(n - k) as usize]);
            }
            b.push(&s * &lead_inv);
        }
        let terms = b.into_iter().enumerate().map(|(n, c)| (n as i64 - v, c));
        Ok(Self::new(self.m, self.trunc - 2 * v, terms))
    }

    pub fn int_pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.invert()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        if e == 0 {
            return Ok(Self::one(self.m, base.trunc - base.window_valuation()));
        }
        let mut acc: Option<Self> = None;
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    Some(a) => a.mul(&sq),
                    None => sq.clone(),
                });
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc.expect("positive exponent"))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.invert()?))
    }

    /// Coefficientwise agreement on the common window `n < min(T_f, T_g)`.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let (a, b) = Self::common(self, other);
        let t = a.trunc.min(b.trunc);
        a.truncate(t).terms == b.truncate(t).terms
    }
}

impl fmt::Display for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, c) in &self.terms {
            write!(f, "({c})*q^({n}/{}) + ", self.m)?;
        }
        write!(f, "O(q^({}/{}))", self.trunc, self.m)
    }
}

impl fmt::Debug for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    n: i64,
    coeff: CycloElement,
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    #[serde(rename = "M")]
    m: u64,
    #[serde(rename = "T")]
    t: i64,
    terms: Vec<TermRepr>,
}

impl Serialize for PuiseuxSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesRepr {
            m: self.m,
            t: self.trunc,
            terms: self
                .terms
                .iter()
                .map(|(&n, c)| TermRepr { n, coeff: c.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PuiseuxSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = SeriesRepr::deserialize(d)?;
        if r.m == 0 {
            return Err(serde::de::Error::custom("denominator must be positive"));
        }
        if let Some(bad) = r.terms.iter().find(|t| r.m % t.coeff.conductor() != 0) {
            return Err(serde::de::Error::custom(format!(
                "coefficient conductor {} does not divide {}",
                bad.coeff.conductor(),
                r.m
            )));
        }
        Ok(PuiseuxSeries::new(r.m, r.t, r.terms.into_iter().map(|t| (t.n, t.coeff))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use proptest::prelude::*;

    fn c(m: u64, x: i64) -> CycloElement {
        CycloElement::from_int(m, x)
    }

    #[test]
    fn valuation_example() {
        let f = PuiseuxSeries::new(6, 12, [(1, c(6, 1)), (2, c(6, -1))]);
        assert_eq!(f.valuation().unwrap(), rat(1, 6));
        assert!(matches!(
            PuiseuxSeries::zero(6, 4).valuation(),
            Err(Error::ZeroToTruncation { .. })
        ));
    }

    #[test]
    fn geometric_inverse() {
        let f = PuiseuxSeries::new(1, 3, [(0, c(1, 1)), (1, c(1, -1))]);
        let g = f.invert().unwrap();
        assert_eq!(g, PuiseuxSeries::new(1, 3, [(0, c(1, 1)), (1, c(1, 1)), (2, c(1, 1))]));
        assert!(f.mul(&g).agrees_with(&PuiseuxSeries::one(1, 3)));
    }

    #[test]
    fn invert_shifts_window() {
        // q^2 (1 - q) + O(q^5) has inverse q^{-2}(1 + q + q^2) + O(q^1)
        let f = PuiseuxSeries::new(1, 5, [(2, c(1, 1)), (3, c(1, -1))]);
        let g = f.invert().unwrap();
        assert_eq!(g.trunc(), 1);
        assert_eq!(g, PuiseuxSeries::new(1, 1, [(-2, c(1, 1)), (-1, c(1, 1)), (0, c(1, 1))]));
    }

    #[test]
    fn rotate_half_power() {
        let f = PuiseuxSeries::monomial(c(2, 1), 1, 2, 4);
        assert_eq!(f.rotate(1), PuiseuxSeries::monomial(c(2, -1), 1, 2, 4));
    }

    #[test]
    fn truncation_window() {
        let f = PuiseuxSeries::new(1, 4, [(1, c(1, 1))]);
        let g = PuiseuxSeries::new(1, 10, [(0, c(1, 1))]);
        // min(4 + 0, 10 + 1)
        assert_eq!(f.mul(&g).trunc(), 4);
        assert_eq!(PuiseuxSeries::zero(1, 3).mul(&g).trunc(), 3);
    }

    #[test]
    fn constant_term_needs_window() {
        assert!(PuiseuxSeries::zero(3, 0).constant_term().is_err());
        let f = PuiseuxSeries::new(3, 2, [(0, CycloElement::zeta(3))]);
        assert_eq!(f.constant_term().unwrap(), CycloElement::zeta(3));
    }

    #[test]
    fn json_shape() {
        let f = PuiseuxSeries::new(2, 3, [(1, c(2, 3))]);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"M":2,"T":3,"terms":[{"n":1,"coeff":{"M":2,"coeffs":["3/1"]}}]}"#);
        let back: PuiseuxSeries = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }

    fn series() -> impl Strategy<Value = PuiseuxSeries> {
        (
            prop::collection::btree_map(-2i64..6, (-3i64..=3, 0i64..6), 1..5),
            6i64..12,
        )
            .prop_map(|(terms, t)| {
                PuiseuxSeries::new(
                    6,
                    t,
                    terms.into_iter().map(|(n, (a, j))| {
                        (n, CycloElement::zeta_pow(6, j).scale(&int(a)))
                    }),
                )
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn mul_ring_laws(f in series(), g in series(), h in series()) {
            prop_assert_eq!(f.mul(&g), g.mul(&f));
            let l = f.mul(&g).mul(&h);
            let r = f.mul(&g.mul(&h));
            prop_assert!(l.agrees_with(&r));
        }

        #[test]
        fn valuation_additive(f in series(), g in series()) {
            let p = f.mul(&g);
            if let (Ok(vf), Ok(vg), Ok(vp)) = (f.valuation(), g.valuation(), p.valuation()) {
                prop_assert_eq!(vp, vf + vg);
            }
            prop_assume!(!f.is_zero() && !g.is_zero());
            prop_assert!(!p.is_zero());
        }

        #[test]
        fn rescale_keeps_valuation(f in series(), k in 1u64..4) {
            prop_assume!(!f.is_zero());
            prop_assert_eq!(f.rescale(6 * k).unwrap().valuation().unwrap(), f.valuation().unwrap());
        }

        #[test]
        fn inverse_is_inverse(f in series()) {
            prop_assume!(!f.is_zero());
            let g = f.invert().unwrap();
            let p = f.mul(&g);
            prop_assert!(p.agrees_with(&PuiseuxSeries::one(6, p.trunc())));
        }
    }
}
