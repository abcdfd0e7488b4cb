//! The monomial `η` with the Bernoulli valuation, the unit `ε = θ/η`, and its value at `q = 0`.

use crate::arith::{CycloElement, PuiseuxSeries};
use crate::bernoulli::smoothed_b2;
use crate::error::{Error, Result};

use super::theta::{theta_qexp, ThetaSpec, TorsionPoint};
use super::xi::xi_c;

fn bernoulli_units(spec: &ThetaSpec, x: u64) -> i64 {
    let v = smoothed_b2(spec.level(), spec.c, x as i64);
    debug_assert!(v.is_integer());
    i64::try_from(v.to_integer()).expect("small exponent")
}

/// `q^{B(x₀)/M}` for a point whose first coordinate is `x₀`, truncated at the spec's window.
pub fn eta_qexp(spec: &ThetaSpec, x: &[u64]) -> PuiseuxSeries {
    let m = spec.level();
    let b = bernoulli_units(spec, x[0] % m);
    PuiseuxSeries::monomial(CycloElement::one(m), b, m, spec.trunc)
}

/// `θ · η^{-1}` at `p`. The spec's truncation refers to `θ`; the result is valid below
/// `q^{(T − B)/M}`.
pub fn epsilon_qexp(spec: &ThetaSpec, p: TorsionPoint) -> Result<PuiseuxSeries> {
    let b = bernoulli_units(spec, p.x);
    Ok(theta_qexp(spec, p)?.shift(-b))
}

/// `(−β)^{(c−c²)/2} (1 − β)^{c²} / (1 − β^c)` for `β = ζ_M^y`.
pub fn cusp_value_closed(m: u64, c: i64, y: u64) -> Result<CycloElement> {
    let beta = CycloElement::zeta_pow(m, y as i64);
    let one = CycloElement::one(m);
    let e = (c - c * c) / 2;
    let lead = (-&beta).pow(e)?;
    let num = (&one - &beta).pow(c * c)?;
    let den = &one - &beta.pow(c)?;
    (&lead * &num).div(&den)
}

/// The two computations of `ε` at the cusp for a point `(0, y)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CuspValue {
    pub series_constant: CycloElement,
    pub closed: CycloElement,
}

/// Constant term of [`epsilon_qexp`] at `(0, y)`, checked against [`cusp_value_closed`].
pub fn epsilon_cusp_eval(spec: &ThetaSpec, y: u64) -> Result<CuspValue> {
    let m = spec.level();
    let p = TorsionPoint::new(m, 0, y as i64)?;
    let eps = epsilon_qexp(&spec.with_trunc(spec.trunc.max(bernoulli_units(spec, 0) + 1)), p)?;
    if eps.valuation_units() != Some(0) {
        return Err(Error::Mismatch(format!("ε at (0, {y}) has valuation {:?}", eps.valuation_units())));
    }
    let series_constant = eps.constant_term()?;
    let closed = cusp_value_closed(m, spec.c, p.y)?;
    if series_constant != closed {
        return Err(Error::Mismatch(format!("ε(0, {y}): series {series_constant}, closed {closed}")));
    }
    Ok(CuspValue { series_constant, closed })
}

/// Checks `value² = cΞ(β)·cΞ(β^{-1})`.
pub fn squaring_identity(m: u64, c: i64, y: u64, value: &CycloElement) -> Result<bool> {
    let f = xi_c(c as u64)?;
    let beta = CycloElement::zeta_pow(m, y as i64);
    let rhs = &f.eval(&beta)? * &f.eval(&beta.inv()?)?;
    Ok(&(value * value) == &rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernoulli::bernoulli_measure_rank2;
    use crate::measure::{GroupMap, Support};
    use crate::units::theta::theta_valuation;

    #[test]
    fn eta_example() {
        let spec = ThetaSpec::new(2, 1, 3, 5, 12).unwrap();
        let eta = eta_qexp(&spec, &[1, 0]);
        assert_eq!(eta.valuation_units(), Some(2));
    }

    #[test]
    fn epsilon_is_a_unit_on_the_fiber() {
        let spec = ThetaSpec::new(2, 1, 3, 5, 60).unwrap();
        let m = spec.level();
        for x in 0..m {
            for y in 0..m {
                let Ok(p) = TorsionPoint::new(m, x as i64, y as i64) else { continue };
                assert_eq!(epsilon_qexp(&spec, p).unwrap().valuation_units(), Some(0));
                assert_eq!(theta_valuation(m, 5, p).unwrap(), eta_qexp(&spec, &[x, y]).valuation_units().unwrap());
            }
        }
    }

    #[test]
    fn cusp_values() {
        for r in [1, 2] {
            let spec = ThetaSpec::new(2, r, 3, 5, 1).unwrap();
            let m = spec.level();
            for y in 1..m {
                let v = epsilon_cusp_eval(&spec, y).unwrap();
                assert!(squaring_identity(m, 5, y, &v.closed).unwrap());
            }
        }
    }

    #[test]
    fn bp_tower() {
        for r in 0..3 {
            for t in [(1, 0), (0, 1), (2, 1)] {
                let up = bernoulli_measure_rank2(2, r + 1, 3, 5, t).unwrap();
                let down = bernoulli_measure_rank2(2, r, 3, 5, t).unwrap();
                assert_eq!(up.pushforward(&GroupMap::ReduceLevel).unwrap(), down);
                assert!(matches!(down.support(), Support::Torsor(_)));
            }
        }
    }
}
