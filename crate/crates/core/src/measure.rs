//! Finitely supported measures on finite groups `(Z/m)^d` and on the torsors `H_r⟨t⟩`.
//!
//! A torsor is the fiber over `t ∈ (Z/N)^d` of a surjection `q_r: (Z/ℓ^rN)^d → (Z/N)^d`
//! whose kernel `H_r` is the subgroup of multiples of `N`, identified with `(Z/ℓ^r)^d`
//! by dividing representatives by `N`.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{format_rational, parse_rational, Rational, Residue};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FiniteGroup {
    pub moduli: Vec<u64>,
}

impl FiniteGroup {
    pub fn cyclic(m: u64) -> Self {
        FiniteGroup { moduli: vec![m] }
    }

    pub fn uniform(m: u64, d: usize) -> Self {
        FiniteGroup { moduli: vec![m; d] }
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn order(&self) -> u64 {
        self.moduli.iter().product()
    }

    pub fn contains(&self, x: &[u64]) -> bool {
        x.len() == self.moduli.len() && x.iter().zip(&self.moduli).all(|(a, m)| a < m)
    }

    pub fn reduce(&self, x: &[i64]) -> Vec<u64> {
        x.iter()
            .zip(&self.moduli)
            .map(|(&a, &m)| a.rem_euclid(m as i64) as u64)
            .collect()
    }

    /// All elements in lexicographic order.
    pub fn elements(&self) -> Vec<Vec<u64>> {
        let mut out = vec![Vec::new()];
        for &m in &self.moduli {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (0..m).map(move |a| {
                        let mut q = p.clone();
                        q.push(a);
                        q
                    })
                })
                .collect();
        }
        out
    }
}

/// Which surjection `(Z/ℓ^rN)^d → (Z/N)^d` cuts out the torsor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    /// `x ↦ x mod N`.
    Reduction,
    /// `x ↦ ℓ^r·x`, landing in the `N`-torsion `ℓ^r·(Z/ℓ^rN) ≅ Z/N`.
    Multiplication,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TorsorSpec {
    pub ell: u64,
    pub r: u32,
    #[serde(rename = "N")]
    pub n: u64,
    pub d: usize,
    pub flavor: Flavor,
    pub t: Vec<u64>,
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|i| i * i <= p).all(|i| p % i != 0)
}

impl TorsorSpec {
    pub fn new(ell: u64, r: u32, n: u64, flavor: Flavor, t: Vec<u64>) -> Result<Self> {
        if !is_prime(ell) {
            return Err(Error::Config(format!("{ell} is not prime")));
        }
        if n < 2 {
            return Err(Error::Config(format!("level N = {n} must be at least 2")));
        }
        if ell.gcd(&n) != 1 {
            return Err(Error::Config(format!("gcd(ell, N) = gcd({ell}, {n}) != 1")));
        }
        if t.is_empty() || t.len() > 2 {
            return Err(Error::Config(format!("rank {} not in {{1, 2}}", t.len())));
        }
        let t = t.into_iter().map(|a| a % n).collect::<Vec<_>>();
        Ok(TorsorSpec { ell, r, n, d: t.len(), flavor, t })
    }

    pub fn reduction(ell: u64, r: u32, n: u64, t: Vec<u64>) -> Result<Self> {
        Self::new(ell, r, n, Flavor::Reduction, t)
    }

    pub fn multiplication(ell: u64, r: u32, n: u64, t: Vec<u64>) -> Result<Self> {
        Self::new(ell, r, n, Flavor::Multiplication, t)
    }

    /// `ℓ^r`.
    pub fn ell_power(&self) -> u64 {
        self.ell.pow(self.r)
    }

    /// `ℓ^r·N`, the modulus of the ambient group.
    pub fn modulus(&self) -> u64 {
        self.ell_power() * self.n
    }

    pub fn group(&self) -> FiniteGroup {
        FiniteGroup::uniform(self.modulus(), self.d)
    }

    /// The kernel `H_r` in its `(Z/ℓ^r)^d` coordinates.
    pub fn kernel(&self) -> FiniteGroup {
        FiniteGroup::uniform(self.ell_power(), self.d)
    }

    /// `q_r(x)`, evaluated literally for the flavor.
    pub fn project(&self, x: &[u64]) -> Vec<u64> {
        let m = self.modulus();
        let lr = self.ell_power();
        x.iter()
            .map(|&a| match self.flavor {
                Flavor::Reduction => a % self.n,
                Flavor::Multiplication => {
                    let image = (a as u128 * lr as u128 % m as u128) as u64;
                    (image / lr) % self.n
                }
            })
            .collect()
    }

    pub fn contains(&self, x: &[u64]) -> bool {
        self.group().contains(x) && self.project(x) == self.t
    }

    /// The fiber `q_r^{-1}(t)`, listed as `t + N·h` for `h ∈ (Z/ℓ^r)^d`.
    pub fn elements(&self) -> Vec<Vec<u64>> {
        let n = self.n;
        let out: Vec<Vec<u64>> = self
            .kernel()
            .elements()
            .into_iter()
            .map(|h| h.iter().zip(&self.t).map(|(&a, &t)| t + n * a).collect())
            .collect();
        debug_assert!(out.iter().all(|x| self.contains(x)));
        out
    }

    /// The same datum one level down; `None` at level 0.
    pub fn lower(&self) -> Option<Self> {
        (self.r > 0).then(|| TorsorSpec { r: self.r - 1, ..self.clone() })
    }

    pub fn with_level(&self, r: u32) -> Self {
        TorsorSpec { r, ..self.clone() }
    }
}

/// Where a measure lives.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Support {
    Torsor(TorsorSpec),
    Group(FiniteGroup),
}

impl Support {
    pub fn contains(&self, x: &[u64]) -> bool {
        match self {
            Support::Group(g) => g.contains(x),
            Support::Torsor(s) => s.contains(x),
        }
    }

    pub fn elements(&self) -> Vec<Vec<u64>> {
        match self {
            Support::Group(g) => g.elements(),
            Support::Torsor(s) => s.elements(),
        }
    }

    pub fn ambient(&self) -> FiniteGroup {
        match self {
            Support::Group(g) => g.clone(),
            Support::Torsor(s) => s.group(),
        }
    }
}

/// Maps between supports along which measures are pushed forward.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupMap {
    Identity,
    /// `x ↦ c·x`.
    Multiply(i64),
    Negate,
    /// Level `r` to `r - 1` on a torsor: reduction mod `ℓ^{r-1}N`.
    ReduceLevel,
    /// Componentwise reduction of a group onto the given moduli.
    ReduceModuli(Vec<u64>),
    /// Rank 2 to rank 1, keeping coordinate `i`.
    Project(usize),
    /// Re-declare a torsor at level `m·N` via `x ↦ m·x`.
    Inflate(u64),
    /// Applied left to right.
    Compose(Vec<GroupMap>),
}

impl GroupMap {
    /// The support of `φ_!μ` for `μ` on `src`.
    pub fn target(&self, src: &Support) -> Result<Support> {
        use GroupMap::*;
        Ok(match (self, src) {
            (Identity, s) => s.clone(),
            (Negate, s) => Multiply(-1).target(s)?,
            (Multiply(_), Support::Group(g)) => Support::Group(g.clone()),
            (Multiply(c), Support::Torsor(s)) => {
                let t = s.t.iter().map(|&a| (c * a as i64).rem_euclid(s.n as i64) as u64).collect();
                Support::Torsor(TorsorSpec { t, ..s.clone() })
            }
            (ReduceLevel, Support::Torsor(s)) => Support::Torsor(s.lower().ok_or(Error::LevelZero)?),
            (ReduceModuli(target), Support::Group(g)) => {
                let ok = target.len() == g.rank()
                    && g.moduli.iter().zip(target).all(|(m, t)| *t > 0 && m % t == 0);
                if !ok {
                    return Err(Error::Incompatible(format!(
                        "cannot reduce moduli {:?} onto {target:?}",
                        g.moduli
                    )));
                }
                Support::Group(FiniteGroup { moduli: target.clone() })
            }
            (Project(i), Support::Group(g)) if *i < g.rank() => {
                Support::Group(FiniteGroup::cyclic(g.moduli[*i]))
            }
            (Project(i), Support::Torsor(s)) if *i < s.d => Support::Torsor(TorsorSpec {
                d: 1,
                t: vec![s.t[*i]],
                ..s.clone()
            }),
            (Inflate(m), Support::Torsor(s)) => {
                if *m == 0 || m.gcd(&s.ell) != 1 {
                    return Err(Error::Incompatible(format!("inflation by {m} at ell = {}", s.ell)));
                }
                let n = s.n * m;
                let t = s.t.iter().map(|&a| a * m % n).collect();
                Support::Torsor(TorsorSpec { n, t, ..s.clone() })
            }
            (Compose(maps), s) => {
                let mut cur = s.clone();
                for f in maps {
                    cur = f.target(&cur)?;
                }
                cur
            }
            (f, s) => {
                return Err(Error::Incompatible(format!("{f:?} does not act on {s:?}")));
            }
        })
    }

    /// The image of a single point; assumes `target` succeeded.
    pub fn apply(&self, src: &Support, x: &[u64]) -> Result<Vec<u64>> {
        use GroupMap::*;
        let tgt = self.target(src)?;
        let amb = tgt.ambient();
        Ok(match self {
            Identity => x.to_vec(),
            Negate => amb.reduce(&x.iter().map(|&a| -(a as i64)).collect::<Vec<_>>()),
            Multiply(c) => amb.reduce(&x.iter().map(|&a| c * a as i64).collect::<Vec<_>>()),
            ReduceLevel | ReduceModuli(_) => x.iter().zip(&amb.moduli).map(|(&a, &m)| a % m).collect(),
            Project(i) => vec![x[*i]],
            Inflate(m) => x.iter().zip(&amb.moduli).map(|(&a, &q)| a * m % q).collect(),
            Compose(maps) => {
                let mut cur = x.to_vec();
                let mut sup = src.clone();
                for f in maps {
                    cur = f.apply(&sup, &cur)?;
                    sup = f.target(&sup)?;
                }
                cur
            }
        })
    }
}

/// A finitely supported `Q`-valued measure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Measure {
    support: Support,
    values: BTreeMap<Vec<u64>, Rational>,
}

impl Measure {
    pub fn zero(support: Support) -> Self {
        Measure { support, values: BTreeMap::new() }
    }

    pub fn from_values(
        support: Support,
        values: impl IntoIterator<Item = (Vec<u64>, Rational)>,
    ) -> Result<Self> {
        let mut out = Measure::zero(support);
        for (x, v) in values {
            out.add_mass(x, v)?;
        }
        Ok(out)
    }

    /// Builds a measure by evaluating `f` on every point of the support.
    pub fn from_fn(support: Support, f: impl Fn(&[u64]) -> Rational) -> Self {
        let values = support
            .elements()
            .into_iter()
            .map(|x| {
                let v = f(&x);
                (x, v)
            })
            .filter(|(_, v)| !v.is_zero())
            .collect();
        Measure { support, values }
    }

    pub fn dirac(support: Support, x: Vec<u64>) -> Result<Self> {
        Self::from_values(support, [(x, Rational::one())])
    }

    fn add_mass(&mut self, x: Vec<u64>, v: Rational) -> Result<()> {
        if !self.support.contains(&x) {
            return Err(Error::OutsideFiber(x));
        }
        let sum = self.values.remove(&x).unwrap_or_else(Rational::zero) + v;
        if !sum.is_zero() {
            self.values.insert(x, sum);
        }
        Ok(())
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn values(&self) -> &BTreeMap<Vec<u64>, Rational> {
        &self.values
    }

    pub fn get(&self, x: &[u64]) -> Rational {
        self.values.get(x).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total_mass(&self) -> Rational {
        self.values.values().sum()
    }

    pub fn integrate(&self, f: impl Fn(&[u64]) -> Rational) -> Rational {
        self.values.iter().map(|(x, v)| v * f(x)).sum()
    }

    pub fn add(&self, other: &Measure) -> Result<Measure> {
        if self.support != other.support {
            return Err(Error::Incompatible("measures on different supports".into()));
        }
        let mut out = self.clone();
        for (x, v) in &other.values {
            out.add_mass(x.clone(), v.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Measure {
        if c.is_zero() {
            return Measure::zero(self.support.clone());
        }
        Measure {
            support: self.support.clone(),
            values: self.values.iter().map(|(x, v)| (x.clone(), v * c)).collect(),
        }
    }

    pub fn sub(&self, other: &Measure) -> Result<Measure> {
        self.add(&other.scale(&-Rational::one()))
    }

    /// `(φ_!μ)(y) = Σ_{φ(x) = y} μ(x)`.
    pub fn pushforward(&self, phi: &GroupMap) -> Result<Measure> {
        let target = phi.target(&self.support)?;
        let mut out = Measure::zero(target);
        for (x, v) in &self.values {
            let y = phi.apply(&self.support, x)?;
            if !out.support.contains(&y) {
                return Err(Error::Incompatible(format!(
                    "{phi:?} sends {x:?} to {y:?}, outside the target fiber"
                )));
            }
            out.add_mass(y, v.clone())?;
        }
        Ok(out)
    }

    /// Pushforward along reduction from level `r + 1` to level `r`.
    pub fn trace(&self) -> Result<Measure> {
        match &self.support {
            Support::Torsor(_) => self.pushforward(&GroupMap::ReduceLevel),
            Support::Group(_) => Err(Error::Incompatible("trace needs a torsor".into())),
        }
    }

    /// Convolution of two group measures, or the action of a measure on the kernel
    /// `(Z/ℓ^r)^d` on a torsor measure via `x + N·h`.
    pub fn convolve(&self, other: &Measure) -> Result<Measure> {
        match (&self.support, &other.support) {
            (Support::Group(g), Support::Group(h)) if g == h => {
                let mut out = Measure::zero(self.support.clone());
                for (x, a) in &self.values {
                    for (y, b) in &other.values {
                        let z = x.iter().zip(y).zip(&g.moduli).map(|((p, q), m)| (p + q) % m).collect();
                        out.add_mass(z, a * b)?;
                    }
                }
                Ok(out)
            }
            (Support::Torsor(s), Support::Group(g)) => {
                if *g != s.kernel() {
                    return Err(Error::Incompatible(format!(
                        "group {:?} is not the kernel of the torsor",
                        g.moduli
                    )));
                }
                let m = s.modulus();
                let mut out = Measure::zero(self.support.clone());
                for (x, a) in &self.values {
                    for (h, b) in &other.values {
                        let z = x.iter().zip(h).map(|(p, q)| (p + s.n * q) % m).collect();
                        out.add_mass(z, a * b)?;
                    }
                }
                Ok(out)
            }
            (Support::Group(_), Support::Torsor(_)) => other.convolve(self),
            _ => Err(Error::Incompatible("convolution needs a common group".into())),
        }
    }

    /// Values reduced modulo `modulus`; fails on a denominator sharing a factor with it.
    pub fn reduce_mod(&self, modulus: u64) -> Result<BTreeMap<Vec<u64>, Residue>> {
        self.values
            .iter()
            .map(|(x, v)| Ok((x.clone(), Residue::from_rational(v, modulus)?)))
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct ValueRepr {
    x: Vec<u64>,
    v: String,
}

#[derive(Serialize, Deserialize)]
struct MeasureRepr {
    spec: Support,
    values: Vec<ValueRepr>,
}

impl Serialize for Measure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MeasureRepr {
            spec: self.support.clone(),
            values: self
                .values
                .iter()
                .map(|(x, v)| ValueRepr { x: x.clone(), v: format_rational(v) })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Measure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = MeasureRepr::deserialize(d)?;
        let values = r
            .values
            .into_iter()
            .map(|e| parse_rational(&e.v).map(|v| (e.x, v)))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        Measure::from_values(r.spec, values).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn g(m: u64) -> Support {
        Support::Group(FiniteGroup::cyclic(m))
    }

    fn d(m: u64, x: u64) -> Measure {
        Measure::dirac(g(m), vec![x]).unwrap()
    }

    #[test]
    fn fibers() {
        let red = TorsorSpec::reduction(2, 1, 3, vec![1]).unwrap();
        assert_eq!(red.elements(), vec![vec![1], vec![4]]);
        let mult = TorsorSpec::multiplication(2, 1, 3, vec![1]).unwrap();
        let brute: Vec<_> = mult.group().elements().into_iter().filter(|x| mult.contains(x)).collect();
        assert_eq!(brute, vec![vec![1], vec![4]]);
        assert_eq!(mult.elements(), brute);
        let rank2 = TorsorSpec::multiplication(2, 1, 3, vec![1, 0]).unwrap();
        assert_eq!(rank2.elements().len(), 4);
        assert!(TorsorSpec::reduction(2, 1, 4, vec![1]).is_err());
        assert!(TorsorSpec::reduction(4, 1, 3, vec![1]).is_err());
    }

    #[test]
    fn fibers_match_brute_force() {
        for flavor in [Flavor::Reduction, Flavor::Multiplication] {
            for (ell, r, n) in [(2, 2, 3), (3, 1, 4), (5, 1, 2)] {
                for t in 0..n {
                    let s = TorsorSpec::new(ell, r, n, flavor, vec![t, (t + 1) % n]).unwrap();
                    let brute: Vec<_> = s.group().elements().into_iter().filter(|x| s.contains(x)).collect();
                    let mut listed = s.elements();
                    listed.sort();
                    assert_eq!(listed, brute);
                    assert_eq!(brute.len() as u64, s.ell_power().pow(2));
                }
            }
        }
    }

    #[test]
    fn dirac_and_pushforward() {
        assert_eq!(d(6, 1).integrate(|x| int(x[0] as i64 * 10)), int(10));
        assert_eq!(d(6, 3).total_mass(), int(1));
        assert_eq!(d(6, 2).pushforward(&GroupMap::Negate).unwrap(), d(6, 4));
        let spec = TorsorSpec::reduction(2, 1, 3, vec![1]).unwrap();
        assert!(matches!(
            Measure::dirac(Support::Torsor(spec), vec![2]),
            Err(Error::OutsideFiber(_))
        ));
    }

    #[test]
    fn projection_counts_fibers() {
        let s = TorsorSpec::multiplication(2, 1, 3, vec![1, 0]).unwrap();
        let mu = Measure::from_fn(Support::Torsor(s), |_| int(1));
        let p = mu.pushforward(&GroupMap::Project(0)).unwrap();
        assert_eq!(p.values().len(), 2);
        assert!(p.values().values().all(|v| *v == int(2)));
        assert_eq!(p.total_mass(), mu.total_mass());
    }

    #[test]
    fn convolution_examples() {
        assert_eq!(d(6, 1).convolve(&d(6, 2)).unwrap(), d(6, 3));
        let mu = d(6, 5).add(&d(6, 2).scale(&int(3))).unwrap();
        assert_eq!(mu.convolve(&d(6, 0)).unwrap(), mu);
        let aug = d(8, 1).sub(&d(8, 0)).unwrap();
        let sq = aug.convolve(&aug).unwrap();
        let expect = d(8, 2).sub(&d(8, 1).scale(&int(2))).unwrap().add(&d(8, 0)).unwrap();
        assert_eq!(sq, expect);
    }

    #[test]
    fn trace_and_reduction() {
        let s = TorsorSpec::reduction(2, 2, 3, vec![1]).unwrap();
        let mu = Measure::dirac(Support::Torsor(s.clone()), vec![10]).unwrap();
        let tr = mu.trace().unwrap();
        assert_eq!(tr, Measure::dirac(Support::Torsor(s.lower().unwrap()), vec![4]).unwrap());
        let base = Measure::dirac(Support::Torsor(s.with_level(0)), vec![1]).unwrap();
        assert!(matches!(base.trace(), Err(Error::LevelZero)));
        let v = Measure::from_values(g(3), [(vec![0], crate::arith::rat(14, 5))]).unwrap();
        assert_eq!(v.reduce_mod(4).unwrap()[&vec![0]].value(), 2);
        let half = Measure::from_values(g(3), [(vec![0], crate::arith::rat(1, 2))]).unwrap();
        assert!(half.reduce_mod(2).is_err());
    }

    #[test]
    fn json_shape() {
        let s = TorsorSpec::reduction(2, 1, 3, vec![1]).unwrap();
        let mu = Measure::from_values(Support::Torsor(s), [(vec![4], int(-4))]).unwrap();
        let js = serde_json::to_string(&mu).unwrap();
        assert_eq!(
            js,
            r#"{"spec":{"ell":2,"r":1,"N":3,"d":1,"flavor":"reduction","t":[1]},"values":[{"x":[4],"v":"-4/1"}]}"#
        );
        let back: Measure = serde_json::from_str(&js).unwrap();
        assert_eq!(back, mu);
    }
}
