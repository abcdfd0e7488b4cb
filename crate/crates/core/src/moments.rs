//! Moment maps from measures to divided powers.
//!
//! On a group `(Z/m)^d` the degree-`k` moment is `Σ_h μ(h) h^{[k]}` over `Z/m`.
//! On a torsor `H_r⟨t⟩` a point `x` is first sent to `N·x ∈ H_r`, whose coordinate in
//! `(Z/ℓ^r)^d` is `N·x / N`, i.e. `x mod ℓ^r`.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::arith::{factorial, Rational, Residue};
use crate::error::{Error, Result};
use crate::measure::{GroupMap, Measure, Support};
use crate::tsym::{CoeffRing, TSymElement};

fn coords_to_tsym(ring: CoeffRing, coords: &[u64], k: u32) -> Result<TSymElement> {
    let h: Vec<Rational> = coords.iter().map(|&a| Rational::from_integer(a.into())).collect();
    TSymElement::linear(ring, &h)?.divided_power(k)
}

fn weighted_sum(
    ring: CoeffRing,
    d: usize,
    mu: &Measure,
    k: u32,
    coord: impl Fn(&[u64]) -> Vec<u64>,
) -> Result<TSymElement> {
    let mut acc = TSymElement::zero(d, ring);
    for (x, v) in mu.values() {
        let term = coords_to_tsym(CoeffRing::Rationals, &coord(x), k)?.scale(v)?;
        acc = acc.add(&term.base_change(ring)?)?;
    }
    Ok(acc)
}

/// Degree-`k` moment of a measure on a group whose components share one modulus `m`,
/// with values in `TSym^k` over `Z/m`.
pub fn moment(mu: &Measure, k: u32) -> Result<TSymElement> {
    let g = match mu.support() {
        Support::Group(g) => g,
        Support::Torsor(_) => return moment_torsor(mu, k),
    };
    let m = g.moduli[0];
    if g.moduli.iter().any(|&q| q != m) {
        return Err(Error::Incompatible(format!("moduli {:?} are not uniform", g.moduli)));
    }
    weighted_sum(CoeffRing::Residues(m), g.rank(), mu, k, |x| x.to_vec())
}

/// Degree-`k` torsor moment over `Z/ℓ^r`.
pub fn moment_torsor(mu: &Measure, k: u32) -> Result<TSymElement> {
    let s = match mu.support() {
        Support::Torsor(s) => s.clone(),
        Support::Group(_) => return moment(mu, k),
    };
    let m = s.modulus();
    let n = s.n;
    weighted_sum(CoeffRing::Residues(s.ell_power()), s.d, mu, k, |x| {
        x.iter().map(|&a| (n as u128 * a as u128 % m as u128) as u64 / n).collect()
    })
}

/// The torsor moment over `Q` with each point lifted to its representative in `[0, ℓ^rN)`.
pub fn moment_torsor_lifted(mu: &Measure, k: u32) -> Result<TSymElement> {
    let d = mu.support().ambient().rank();
    weighted_sum(CoeffRing::Rationals, d, mu, k, |x| x.to_vec())
}

/// Rank-1 lifted sum `Σ_x μ(x)·x^k`.
pub fn torsor_moment_sum(mu: &Measure, k: u32) -> Rational {
    mu.integrate(|x| num_traits::pow(Rational::from_integer(x[0].into()), k as usize))
}

/// Modified moment: `N^{-k}` times the lifted moment, read back in the `Sym^k` basis
/// (coefficient of `e^{[n]}` divided by `Π n_i!`).
pub fn modified_moment(mu: &Measure, k: u32) -> Result<BTreeMap<Vec<u32>, Rational>> {
    let n = match mu.support() {
        Support::Torsor(s) => s.n,
        Support::Group(_) => return Err(Error::Incompatible("modified moments need a torsor".into())),
    };
    let nk = Rational::from_integer(num_traits::pow(BigInt::from(n), k as usize));
    let lifted = moment_torsor_lifted(mu, k)?;
    Ok(lifted
        .terms()
        .iter()
        .map(|(e, c)| {
            let fact: BigInt = e.iter().map(|&i| factorial(i)).product();
            (e.clone(), c / (&nk * Rational::from_integer(fact)))
        })
        .collect())
}

/// Modified moment reduced mod `ℓ^r`; non-integral values are reported.
pub fn modified_moment_mod(mu: &Measure, k: u32) -> Result<BTreeMap<Vec<u32>, Residue>> {
    let lr = match mu.support() {
        Support::Torsor(s) => s.ell_power(),
        Support::Group(_) => return Err(Error::Incompatible("modified moments need a torsor".into())),
    };
    modified_moment(mu, k)?
        .into_iter()
        .map(|(e, c)| Ok((e, Residue::from_rational(&c, lr)?)))
        .collect()
}

/// `TSym(φ)` for the linear map underlying a [`GroupMap`], acting on moments over `src`.
pub fn tsym_of_map(phi: &GroupMap, src: &Support, a: &TSymElement) -> Result<TSymElement> {
    use GroupMap::*;
    let target_ring = |s: &Support| -> CoeffRing {
        match s {
            Support::Torsor(t) => CoeffRing::Residues(t.ell_power()),
            Support::Group(g) => CoeffRing::Residues(g.moduli[0]),
        }
    };
    match phi {
        Identity => Ok(a.clone()),
        Multiply(c) => a.map_scalar(*c),
        Negate => a.map_scalar(-1),
        Inflate(m) => a.map_scalar(*m as i64),
        ReduceLevel | ReduceModuli(_) => a.base_change(target_ring(&phi.target(src)?)),
        Project(i) => {
            let mut row = vec![0; a.rank()];
            row[*i] = 1;
            a.map_matrix(&[row])
        }
        Compose(maps) => {
            let mut cur = a.clone();
            let mut sup = src.clone();
            for f in maps {
                cur = tsym_of_map(f, &sup, &cur)?;
                sup = f.target(&sup)?;
            }
            Ok(cur)
        }
    }
}

/// Outcome of a compatibility check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatReport {
    pub pass: bool,
    /// The first level (or, for functoriality, `0`) at which the identity failed.
    pub failed_level: Option<u32>,
    pub detail: String,
}

impl CompatReport {
    fn ok() -> Self {
        CompatReport { pass: true, failed_level: None, detail: String::new() }
    }

    fn fail(level: u32, detail: String) -> Self {
        CompatReport { pass: false, failed_level: Some(level), detail }
    }
}

/// Checks `moment_torsor(μ_{r+1}) mod ℓ^r = moment_torsor(μ_r) = moment_torsor(trace μ_{r+1})`
/// along a tower listed by increasing level.
pub fn check_trace_compat(tower: &[Measure], k: u32) -> Result<CompatReport> {
    for pair in tower.windows(2) {
        let (lo, hi) = (&pair[0], &pair[1]);
        let level = match hi.support() {
            Support::Torsor(s) => s.r,
            Support::Group(_) => return Err(Error::Incompatible("tower of group measures".into())),
        };
        let ring = match lo.support() {
            Support::Torsor(s) => CoeffRing::Residues(s.ell_power()),
            Support::Group(_) => return Err(Error::Incompatible("tower of group measures".into())),
        };
        let reduced = moment_torsor(hi, k)?.base_change(ring)?;
        let direct = moment_torsor(lo, k)?;
        let traced = moment_torsor(&hi.trace()?, k)?;
        if reduced != direct || reduced != traced {
            return Ok(CompatReport::fail(
                level,
                format!("level {level}: reduced {reduced}, lower {direct}, traced {traced}"),
            ));
        }
    }
    Ok(CompatReport::ok())
}

/// Checks `moment(φ_!μ, k) = TSym(φ)(moment(μ, k))`.
pub fn check_functoriality(phi: &GroupMap, mu: &Measure, k: u32) -> Result<CompatReport> {
    let lhs = moment(&mu.pushforward(phi)?, k)?;
    let rhs = tsym_of_map(phi, mu.support(), &moment(mu, k)?)?;
    if lhs == rhs {
        Ok(CompatReport::ok())
    } else {
        Ok(CompatReport::fail(0, format!("pushforward moment {lhs} != mapped moment {rhs}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;
    use crate::measure::{FiniteGroup, TorsorSpec};

    fn group(m: u64, d: usize) -> Support {
        Support::Group(FiniteGroup::uniform(m, d))
    }

    #[test]
    fn dirac_examples() {
        let mu = Measure::dirac(group(8, 2), vec![1, 2]).unwrap();
        let m = moment(&mu, 2).unwrap();
        let r = CoeffRing::Residues(8);
        let expect = TSymElement::from_terms(2, r, [(vec![2, 0], int(1)), (vec![1, 1], int(2)), (vec![0, 2], int(4))]).unwrap();
        assert_eq!(m, expect);
    }

    #[test]
    fn augmentation_square() {
        let d = |x| Measure::dirac(group(8, 1), vec![x]).unwrap();
        let a = d(1).sub(&d(0)).unwrap();
        let sq = a.convolve(&a).unwrap();
        let m = moment(&sq, 2).unwrap();
        let e1 = TSymElement::basis(1, CoeffRing::Residues(8), vec![1]);
        assert_eq!(m, e1.mul(&e1).unwrap());
        assert_eq!(m.coeff(&[2]), int(2));
        assert!(moment(&sq, 1).unwrap().is_zero());
        assert!(moment(&sq, 0).unwrap().is_zero());
    }

    #[test]
    fn torsor_moment_of_dirac() {
        let s = TorsorSpec::reduction(2, 2, 3, vec![1]).unwrap();
        let mu = Measure::dirac(Support::Torsor(s), vec![7]).unwrap();
        assert_eq!(moment_torsor(&mu, 0).unwrap(), TSymElement::one(1, CoeffRing::Residues(4)));
        // 7 ≡ 3 mod 4
        assert_eq!(moment_torsor(&mu, 1).unwrap().coeff(&[1]), int(3));
        assert_eq!(modified_moment(&mu, 0).unwrap()[&vec![0]], int(1));
    }

    #[test]
    fn corrupted_tower_is_caught() {
        let spec = |r| TorsorSpec::reduction(3, r, 2, vec![1]).unwrap();
        let uniform = |r: u32| Measure::from_fn(Support::Torsor(spec(r)), |_| int(3i64.pow(3 - r)));
        let tower: Vec<Measure> = (0..=3).map(uniform).collect();
        assert!(check_trace_compat(&tower, 2).unwrap().pass);
        let mut bad = tower.clone();
        bad[2] = bad[2].add(&Measure::dirac(Support::Torsor(spec(2)), vec![1]).unwrap()).unwrap();
        let rep = check_trace_compat(&bad, 1).unwrap();
        assert!(!rep.pass);
        assert_eq!(rep.failed_level, Some(2));
    }

    #[test]
    fn multiplication_scales_by_c_power() {
        let s = TorsorSpec::reduction(2, 4, 3, vec![1]).unwrap();
        let mu = Measure::dirac(Support::Torsor(s), vec![1]).unwrap();
        let rep = check_functoriality(&GroupMap::Multiply(5), &mu, 3).unwrap();
        assert!(rep.pass, "{}", rep.detail);
        let pushed = moment_torsor(&mu.pushforward(&GroupMap::Multiply(5)).unwrap(), 3).unwrap();
        assert_eq!(pushed.coeff(&[3]), int(13));
    }
}
