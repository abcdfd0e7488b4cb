//! Formal linear combinations of Eisenstein classes, elliptic Soulé elements and cyclotomic
//! Soulé symbols, with the rewrite rules relating them and the residue and `Dir` maps.
//!
//! Cyclotomic symbols are opaque: no relation among them is ever applied.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{factorial, frac, pow, serde_rational, Rational};
use crate::bernoulli::bernoulli_poly;
use crate::error::{Error, Result};

/// A basis symbol. `k` is always the Eisenstein weight, so `CycSoule { k, .. }` stands for the
/// cyclotomic element of twist `k + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ClassSymbol {
    Eis {
        k: u32,
        #[serde(rename = "N")]
        n: u64,
        t: (u64, u64),
    },
    SouleElliptic {
        k: u32,
        #[serde(rename = "N")]
        n: u64,
        c: i64,
        t: (u64, u64),
    },
    CycSoule {
        k: u32,
        #[serde(rename = "N")]
        n: u64,
        b: u64,
    },
}

fn reduce_point(n: u64, t: (u64, u64)) -> (u64, u64) {
    (t.0 % n, t.1 % n)
}

fn negate_point(n: u64, t: (u64, u64)) -> (u64, u64) {
    ((n - t.0 % n) % n, (n - t.1 % n) % n)
}

fn scale_point(n: u64, c: i64, t: (u64, u64)) -> (u64, u64) {
    let m = n as i64;
    let f = |a: u64| (c.rem_euclid(m) as u64 * a % n) as u64;
    (f(t.0), f(t.1))
}

fn parity_sign(k: u32) -> Rational {
    if k % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

impl ClassSymbol {
    pub fn eis(k: u32, n: u64, t: (u64, u64)) -> Result<Self> {
        let t = reduce_point(n, t);
        if t == (0, 0) {
            return Err(Error::Config("Eisenstein classes need t ≠ 0".into()));
        }
        Ok(ClassSymbol::Eis { k, n, t })
    }

    pub fn soule_elliptic(k: u32, n: u64, c: i64, t: (u64, u64)) -> Result<Self> {
        let t = reduce_point(n, t);
        if t == (0, 0) {
            return Err(Error::Config("elliptic Soulé elements need t ≠ 0".into()));
        }
        if c.gcd(&(n as i64)) != 1 {
            return Err(Error::NotCoprime { value: c, modulus: n });
        }
        Ok(ClassSymbol::SouleElliptic { k, n, c, t })
    }

    pub fn cyc_soule(k: u32, n: u64, b: u64) -> Result<Self> {
        let b = b % n;
        if b == 0 {
            return Err(Error::Config("cyclotomic symbols need b ≠ 0".into()));
        }
        Ok(ClassSymbol::CycSoule { k, n, b })
    }

    /// The ±-representative and the sign picked up, or `None` when the symbol is forced to vanish.
    fn canonical(&self) -> Option<(ClassSymbol, Rational)> {
        let flip = |k: u32, n: u64, t: (u64, u64)| {
            let t = reduce_point(n, t);
            let neg = negate_point(n, t);
            if t == neg && k % 2 == 1 {
                None
            } else if neg < t {
                Some((neg, parity_sign(k)))
            } else {
                Some((t, Rational::one()))
            }
        };
        match *self {
            ClassSymbol::Eis { k, n, t } => flip(k, n, t).map(|(t, s)| (ClassSymbol::Eis { k, n, t }, s)),
            ClassSymbol::SouleElliptic { k, n, c, t } => {
                flip(k, n, t).map(|(t, s)| (ClassSymbol::SouleElliptic { k, n, c, t }, s))
            }
            ClassSymbol::CycSoule { .. } => Some((self.clone(), Rational::one())),
        }
    }
}

impl fmt::Display for ClassSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassSymbol::Eis { k, n, t } => write!(f, "Eis^{k}_{n}({},{})", t.0, t.1),
            ClassSymbol::SouleElliptic { k, n, c, t } => write!(f, "{c}e_{k},{n}({},{})", t.0, t.1),
            ClassSymbol::CycSoule { k, n, b } => write!(f, "c_{}(zeta_{n}^{b})", k + 1),
        }
    }
}

/// A finite `Q`-linear combination of symbols, kept canonical.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FormalClass {
    terms: BTreeMap<ClassSymbol, Rational>,
}

impl FormalClass {
    pub fn zero() -> Self {
        FormalClass::default()
    }

    pub fn symbol(s: ClassSymbol) -> Self {
        FormalClass::from_terms([(s, Rational::one())])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (ClassSymbol, Rational)>) -> Self {
        let mut out = FormalClass::zero();
        for (s, c) in terms {
            out.push(s, c);
        }
        out
    }

    fn push(&mut self, s: ClassSymbol, c: Rational) {
        let Some((s, sign)) = s.canonical() else { return };
        let v = self.terms.remove(&s).unwrap_or_else(Rational::zero) + c * sign;
        if !v.is_zero() {
            self.terms.insert(s, v);
        }
    }

    pub fn terms(&self) -> &BTreeMap<ClassSymbol, Rational> {
        &self.terms
    }

    pub fn coeff(&self, s: &ClassSymbol) -> Rational {
        match s.canonical() {
            Some((s, sign)) => self.terms.get(&s).map_or_else(Rational::zero, |c| c * sign),
            None => Rational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.push(s.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        FormalClass::from_terms(self.terms.iter().map(|(s, v)| (s.clone(), v * c)))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }
}

impl fmt::Display for FormalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(s, c)| format!("({c})*{s}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    sym: ClassSymbol,
    #[serde(with = "serde_rational")]
    coeff: Rational,
}

impl Serialize for FormalClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<TermJson> = self
            .terms
            .iter()
            .map(|(sym, coeff)| TermJson { sym: sym.clone(), coeff: coeff.clone() })
            .collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FormalClass {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<TermJson>::deserialize(d)?;
        Ok(FormalClass::from_terms(v.into_iter().map(|t| (t.sym, t.coeff))))
    }
}

/// Rewrites the terms into canonical representatives (idempotent; construction already does this).
pub fn canonicalize(x: &FormalClass) -> FormalClass {
    FormalClass::from_terms(x.terms.iter().map(|(s, c)| (s.clone(), c.clone())))
}

/// Replaces `ce_k(t)` by `−N(c²·Eis^k(t) − c^{-k}·Eis^k(ct))`.
pub fn rewrite_soule(x: &FormalClass) -> FormalClass {
    let mut out = FormalClass::zero();
    for (s, v) in &x.terms {
        match *s {
            ClassSymbol::SouleElliptic { k, n, c, t } => {
                let cr = Rational::from_integer(c.into());
                let nn = Rational::from_integer(n.into());
                let lead = -&nn * v;
                out.push(ClassSymbol::Eis { k, n, t }, &lead * &cr * &cr);
                out.push(ClassSymbol::Eis { k, n, t: scale_point(n, c, t) }, -lead * pow(&cr, -(k as i64)));
            }
            _ => out.push(s.clone(), v.clone()),
        }
    }
    out
}

fn bernoulli_at(k: usize, a: u64, n: u64) -> Rational {
    bernoulli_poly(k).eval(&frac(&Rational::new(a.into(), n.into())))
}

fn fact(k: u32) -> Rational {
    Rational::from_integer(factorial(k))
}

fn int_pow(n: u64, k: u32) -> Rational {
    Rational::from_integer(num_traits::pow(BigInt::from(n), k as usize))
}

/// `−N^k/(k!(k+2)) · B_{k+2}({a/N})`.
pub fn residue_eis(k: u32, n: u64, t: (u64, u64)) -> Rational {
    let scale = -int_pow(n, k) / (fact(k) * Rational::from_integer((k + 2).into()));
    scale * bernoulli_at(k as usize + 2, t.0, n)
}

/// Linear extension of [`residue_eis`]; only Eisenstein symbols are allowed.
pub fn residue(x: &FormalClass) -> Result<Rational> {
    let mut acc = Rational::zero();
    for (s, v) in &x.terms {
        match *s {
            ClassSymbol::Eis { k, n, t } => acc += v * residue_eis(k, n, t),
            _ => return Err(Error::NotEisensteinSpan(s.to_string())),
        }
    }
    Ok(acc)
}

/// `N^{k+1}/(k!(k+2)) · (c²B_{k+2}({a/N}) − c^{-k}B_{k+2}({ca/N}))`.
pub fn residue_soule_closed(k: u32, n: u64, c: i64, t: (u64, u64)) -> Rational {
    let kk = k as usize + 2;
    let cr = Rational::from_integer(c.into());
    let ca = (c.rem_euclid(n as i64) as u64 * (t.0 % n)) % n;
    let lead = int_pow(n, k + 1) / (fact(k) * Rational::from_integer(kk.into()));
    lead * (&cr * &cr * bernoulli_at(kk, t.0, n) - pow(&cr, -(k as i64)) * bernoulli_at(kk, ca, n))
}

/// A weight `ψ: (Z/N)² ∖ {0} → Q` attached to Eisenstein weight `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightFunction {
    pub k: u32,
    pub n: u64,
    values: BTreeMap<(u64, u64), Rational>,
}

impl WeightFunction {
    pub fn new(k: u32, n: u64, values: impl IntoIterator<Item = ((u64, u64), Rational)>) -> Result<Self> {
        if n < 2 {
            return Err(Error::Config(format!("level N = {n} must be at least 2")));
        }
        let mut out = WeightFunction { k, n, values: BTreeMap::new() };
        for (t, v) in values {
            let t = reduce_point(n, t);
            if t == (0, 0) {
                return Err(Error::Config("ψ is not defined at (0,0)".into()));
            }
            let e = out.values.entry(t).or_insert_with(Rational::zero);
            *e += v;
        }
        out.values.retain(|_, v| !v.is_zero());
        Ok(out)
    }

    pub fn get(&self, t: (u64, u64)) -> Rational {
        self.values.get(&reduce_point(self.n, t)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn values(&self) -> &BTreeMap<(u64, u64), Rational> {
        &self.values
    }

    pub fn points(n: u64) -> impl Iterator<Item = (u64, u64)> {
        (0..n).flat_map(move |a| (0..n).map(move |b| (a, b))).filter(|&t| t != (0, 0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if (self.k, self.n) != (other.k, other.n) {
            return Err(Error::Incompatible("weights of different (k, N)".into()));
        }
        WeightFunction::new(self.k, self.n, self.values.iter().chain(&other.values).map(|(t, v)| (*t, v.clone())))
    }

    /// `Eis^k(ψ) = Σ ψ(t) Eis^k(t)`.
    pub fn eisenstein(&self) -> FormalClass {
        FormalClass::from_terms(
            self.values.iter().map(|(t, v)| (ClassSymbol::Eis { k: self.k, n: self.n, t: *t }, v.clone())),
        )
    }
}

#[derive(Serialize, Deserialize)]
struct WeightEntry {
    t: (u64, u64),
    #[serde(with = "serde_rational")]
    v: Rational,
}

#[derive(Serialize, Deserialize)]
struct WeightJson {
    k: u32,
    #[serde(rename = "N")]
    n: u64,
    values: Vec<WeightEntry>,
}

impl Serialize for WeightFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WeightJson {
            k: self.k,
            n: self.n,
            values: self.values.iter().map(|(t, v)| WeightEntry { t: *t, v: v.clone() }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = WeightJson::deserialize(d)?;
        WeightFunction::new(w.k, w.n, w.values.into_iter().map(|e| (e.t, e.v))).map_err(serde::de::Error::custom)
    }
}

/// `ψ_k(t) = (ψ(t) + (−1)^k ψ(−t))/2`.
pub fn parity_project(psi: &WeightFunction) -> WeightFunction {
    let half = Rational::new(1.into(), 2.into());
    let sign = parity_sign(psi.k);
    let values = WeightFunction::points(psi.n)
        .map(|t| (t, (psi.get(t) + &sign * psi.get(negate_point(psi.n, t))) * &half));
    WeightFunction::new(psi.k, psi.n, values).expect("valid domain")
}

fn require_zero_residue(psi: &WeightFunction) -> Result<()> {
    let res = residue(&psi.eisenstein())?;
    if res.is_zero() {
        Ok(())
    } else {
        Err(Error::NonzeroResidue(res))
    }
}

/// `−1/(N·k!) · Σ_{b≠0} ψ(0,b)·c_{k+1}(ζ_N^b)`, for `ψ` with vanishing residue.
pub fn dir(psi: &WeightFunction) -> Result<FormalClass> {
    require_zero_residue(psi)?;
    let scale = -(Rational::from_integer(psi.n.into()) * fact(psi.k)).recip();
    Ok(FormalClass::from_terms((1..psi.n).map(|b| {
        (ClassSymbol::CycSoule { k: psi.k, n: psi.n, b }, psi.get((0, b)) * &scale)
    })))
}

/// Evaluation at the cusp of `N^{-k}·ce_k((0,b))`, with `sign` in front of the `c^{-k}` term.
fn me_eval_signed(k: u32, n: u64, c: i64, b: u64, sign: i64) -> FormalClass {
    let cr = Rational::from_integer(c.into());
    let par = parity_sign(k);
    let cb = scale_point(n, c, (0, b)).1;
    let pair = |b: u64| {
        FormalClass::from_terms([
            (ClassSymbol::CycSoule { k, n, b }, Rational::one()),
            (ClassSymbol::CycSoule { k, n, b: negate_point(n, (0, b)).1 }, par.clone()),
        ])
    };
    let s = Rational::from_integer(sign.into());
    let inner = pair(b).scale(&(&cr * &cr)).add(&pair(cb).scale(&(s * pow(&cr, -(k as i64)))));
    inner.scale(&(Rational::from_integer(2.into()) * fact(k) * int_pow(n, k)).recip())
}

/// Cusp value of `N^{-k}·ce_k(t)`: zero unless `t = (0, b)`.
pub fn me_eval(k: u32, n: u64, c: i64, t: (u64, u64)) -> FormalClass {
    let t = reduce_point(n, t);
    if t.0 != 0 || t.1 == 0 {
        return FormalClass::zero();
    }
    me_eval_signed(k, n, c, t.1, -1)
}

fn check_auxiliary(n: u64, c: i64) -> Result<()> {
    if c.rem_euclid(n as i64) != 1 {
        return Err(Error::Config(format!("c = {c} is not 1 mod N = {n}")));
    }
    if c.gcd(&(6 * n as i64)) != 1 || c <= 1 {
        return Err(Error::Config(format!("c = {c} must exceed 1 and be prime to 6N")));
    }
    Ok(())
}

fn dir_via_me_signed(psi: &WeightFunction, c: i64, sign: i64) -> Result<FormalClass> {
    require_zero_residue(psi)?;
    check_auxiliary(psi.n, c)?;
    let (k, n) = (psi.k, psi.n);
    let projected = parity_project(psi);
    let mut cusp = FormalClass::zero();
    for (t, v) in projected.values() {
        if t.0 == 0 {
            cusp = cusp.add(&me_eval_signed(k, n, c, t.1, sign).scale(v));
        }
    }
    // N^{-k}·ce_k(t) = λ·Eis^k(t) for every t, read off from the rewrite rule.
    let probe = ClassSymbol::Eis { k, n, t: (0, 1) };
    let rewritten = rewrite_soule(&FormalClass::symbol(ClassSymbol::SouleElliptic { k, n, c, t: (0, 1) }));
    let lambda = rewritten.coeff(&probe) / int_pow(n, k);
    if lambda.is_zero() || rewritten.terms().len() != 1 {
        return Err(Error::Unsupported("rewrite did not collapse to a single class".into()));
    }
    Ok(cusp.scale(&lambda.recip()))
}

/// `Dir` through the cusp values of the elliptic Soulé elements, for auxiliary `c ≡ 1 mod N`.
pub fn dir_via_me(psi: &WeightFunction, c: i64) -> Result<FormalClass> {
    dir_via_me_signed(psi, c, -1)
}

/// A random weight of parity `(−1)^k` with vanishing residue and small integer values.
pub fn random_admissible_weight<R: Rng>(rng: &mut R, k: u32, n: u64) -> WeightFunction {
    let sign = parity_sign(k);
    let mut values = BTreeMap::new();
    for t in WeightFunction::points(n) {
        let neg = negate_point(n, t);
        if values.contains_key(&neg) {
            continue;
        }
        let v = if t == neg && k % 2 == 1 { 0 } else { rng.gen_range(-9i64..=9) };
        values.insert(t, Rational::from_integer(v.into()));
        if t != neg {
            values.insert(neg, Rational::from_integer(v.into()) * &sign);
        }
    }
    let psi = WeightFunction::new(k, n, values.clone()).expect("valid domain");
    let res = residue(&psi.eisenstein()).expect("Eisenstein span");
    if res.is_zero() {
        return psi;
    }
    // cancel the residue on a pair ±t with a ≠ 0 and nonzero Bernoulli value
    let fix = WeightFunction::points(n)
        .find(|&t| t != negate_point(n, t) && !residue_eis(k, n, t).is_zero())
        .expect("some class has nonzero residue");
    let per_pair = residue_eis(k, n, fix) * Rational::from_integer(2.into());
    let delta = -res / per_pair;
    *values.get_mut(&fix).expect("present") += &delta;
    *values.get_mut(&negate_point(n, fix)).expect("present") += delta * &sign;
    WeightFunction::new(k, n, values).expect("valid domain")
}
