//! q-expansions of the `c`-smoothed theta function at torsion points of the Tate curve.
//!
//! For a point `z = xτ/M + y/M` write `u = q^{x/M} ζ_M^y`. The expansion is
//!
//! ```text
//! q^{(c²−1)/12} (−u)^{(c−c²)/2} (1−u)^{c²} / (1−u^c) · γ(u)^{c²} / γ(u^c),
//! γ(u) = Π_{n≥1} (1 − qⁿu)(1 − qⁿu⁻¹),
//! ```
//!
//! with `u^c = q^{cx/M} ζ_M^{cy}` taken literally (the exponent `cx` is not reduced mod `M`).

use num_integer::Integer;

use crate::arith::{CycloElement, PuiseuxSeries, Rational};
use crate::bernoulli::smoothed_b2;
use crate::error::{Error, Result};

/// `(ℓ, r, N, c)` together with a truncation order in units of `q^{1/ℓ^rN}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaSpec {
    pub ell: u64,
    pub r: u32,
    pub n: u64,
    pub c: i64,
    pub trunc: i64,
}

impl ThetaSpec {
    pub fn new(ell: u64, r: u32, n: u64, c: i64, trunc: i64) -> Result<Self> {
        let s = ThetaSpec { ell, r, n, c, trunc };
        crate::bernoulli::BernoulliMeasureSpec::new(ell, r, n, c, 0)?.validate_for_units()?;
        if c <= 1 {
            return Err(Error::Config(format!("c = {c} must exceed 1")));
        }
        Ok(s)
    }

    /// `M = ℓ^r·N`.
    pub fn level(&self) -> u64 {
        self.ell.pow(self.r) * self.n
    }

    pub fn ell_power(&self) -> u64 {
        self.ell.pow(self.r)
    }

    pub fn with_trunc(&self, trunc: i64) -> Self {
        ThetaSpec { trunc, ..self.clone() }
    }
}

/// A point `(x, y)` of `(Z/M)²`, nonzero, stored by its representatives in `[0, M)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorsionPoint {
    pub level: u64,
    pub x: u64,
    pub y: u64,
}

impl TorsionPoint {
    pub fn new(level: u64, x: i64, y: i64) -> Result<Self> {
        let m = level as i64;
        let p = TorsionPoint { level, x: x.rem_euclid(m) as u64, y: y.rem_euclid(m) as u64 };
        if p.x == 0 && p.y == 0 {
            return Err(Error::Config("the torsion point must be nonzero".into()));
        }
        Ok(p)
    }
}

/// `1 − ζ^w q^{e/M}` for `e ≥ 0`, as a truncated series.
fn one_minus(m: u64, e: i64, w: i64, trunc: i64) -> PuiseuxSeries {
    debug_assert!(e >= 0);
    let one = PuiseuxSeries::one(m, trunc);
    one.sub(&PuiseuxSeries::monomial(CycloElement::zeta_pow(m, w), e, m, trunc))
}

/// A factor `1 − ζ^w q^{e/M}` split as `coeff · q^{shift/M} · unit`, with `unit` of valuation 0.
struct Factor {
    coeff: CycloElement,
    shift: i64,
    unit: PuiseuxSeries,
}

fn factor(m: u64, e: i64, w: i64, trunc: i64) -> Factor {
    if e >= 0 {
        Factor { coeff: CycloElement::one(m), shift: 0, unit: one_minus(m, e, w, trunc) }
    } else {
        // 1 − ζ^w q^e = −ζ^w q^e (1 − ζ^{−w} q^{−e})
        Factor {
            coeff: -CycloElement::zeta_pow(m, w),
            shift: e,
            unit: one_minus(m, -e, -w, trunc),
        }
    }
}

/// Accumulates `coeff · q^{shift/M} · Π unitᵢ^{powᵢ}` at a fixed unit window.
struct Assembly {
    coeff: CycloElement,
    shift: i64,
    units: PuiseuxSeries,
}

impl Assembly {
    fn new(m: u64, window: i64) -> Self {
        Assembly {
            coeff: CycloElement::one(m),
            shift: 0,
            units: PuiseuxSeries::one(m, window),
        }
    }

    fn times(&mut self, f: Factor, power: i64) -> Result<()> {
        self.coeff = &self.coeff * &f.coeff.pow(power)?;
        self.shift += f.shift * power;
        self.units = self.units.mul(&f.unit.int_pow(power)?);
        Ok(())
    }
}

/// `(exponent numerator, ζ-power, multiplicity)` for every factor `1 − ζ^w q^{e/M}` that is not
/// `≡ 1` below the window.
fn factor_list(m: u64, c: i64, x: i64, y: i64, window: i64) -> Vec<(i64, i64, i64)> {
    let mm = m as i64;
    let mut out = Vec::new();
    let mut push = |e: i64, w: i64, mult: i64| {
        if e < window {
            out.push((e, w, mult));
        }
    };
    for (e, w, mult) in [(x, y, c * c), (c * x, c * y, -1)] {
        push(e, w, mult);
        let mut n = 1;
        while n * mm - e < window {
            push(n * mm + e, w, mult);
            push(n * mm - e, -w, mult);
            n += 1;
        }
    }
    out
}

/// Sum of the exact shifts picked up from factors with negative exponent.
fn negative_shift(m: u64, c: i64, x: i64) -> i64 {
    let mm = m as i64;
    let cx = c * x;
    // 1/γ(u^c) contributes +f for each n with nM − cx = −f < 0
    (1..)
        .map(|n| n * mm - cx)
        .take_while(|&e| e < 0)
        .map(|e| -e)
        .sum()
}

/// The exact `q`-exponent, in units of `1/M`, of all monomial prefactors.
pub fn theta_shift(m: u64, c: i64, x: u64) -> i64 {
    let mm = m as i64;
    let x = x as i64;
    mm * (c * c - 1) / 12 + x * (c - c * c) / 2 + negative_shift(m, c, x)
}

/// The truncated expansion at `(x, y)` over `Q(ζ_M)`, valid below `q^{trunc/M}`.
pub fn theta_series(m: u64, c: i64, p: TorsionPoint, trunc: i64) -> Result<PuiseuxSeries> {
    if p.level != m {
        return Err(Error::Incompatible(format!("point of level {} used at level {m}", p.level)));
    }
    if c % 2 == 0 || c.gcd(&3) != 1 || c.gcd(&(m as i64)) != 1 {
        return Err(Error::Config(format!("c = {c} must be prime to 6 and to {m}")));
    }
    let (x, y) = (p.x as i64, p.y as i64);
    let shift = theta_shift(m, c, p.x);
    let window = trunc - shift;
    if window <= 0 {
        return Err(Error::TruncationTooSmall { requested: trunc, needed: shift });
    }
    let mut acc = Assembly::new(m, window);
    // q^{(c²−1)/12}
    acc.shift += m as i64 * (c * c - 1) / 12;
    // (−u)^{(c−c²)/2}
    let e = (c - c * c) / 2;
    let sign = if e % 2 == 0 { 1 } else { -1 };
    acc.coeff = &acc.coeff * &CycloElement::zeta_pow(m, y * e).scale(&Rational::from_integer(sign.into()));
    acc.shift += x * e;
    for (ex, w, mult) in factor_list(m, c, x, y, window) {
        acc.times(factor(m, ex, w, window), mult)?;
    }
    debug_assert_eq!(acc.shift, shift);
    Ok(acc.units.scale(&acc.coeff).shift(acc.shift))
}

/// Expansion for a spec's own level and truncation.
pub fn theta_qexp(spec: &ThetaSpec, p: TorsionPoint) -> Result<PuiseuxSeries> {
    theta_series(spec.level(), spec.c, p, spec.trunc)
}

/// Valuation (in units of `1/M`) read off an actual expansion, doubling the window until
/// the leading term is visible.
pub fn theta_valuation(m: u64, c: i64, p: TorsionPoint) -> Result<i64> {
    let mut trunc = m as i64;
    loop {
        match theta_series(m, c, p, trunc) {
            Ok(s) => {
                if let Some(v) = s.valuation_units() {
                    return Ok(v);
                }
            }
            Err(Error::TruncationTooSmall { .. }) => {}
            Err(e) => return Err(e),
        }
        trunc *= 2;
    }
}

/// `M·ord` predicted by the second Bernoulli polynomial.
pub fn predicted_valuation(m: u64, c: i64, x: u64) -> Rational {
    smoothed_b2(m, c, x as i64)
}
