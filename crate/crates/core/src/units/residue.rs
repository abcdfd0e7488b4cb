//! Residues at the cusp read off from q-expansion valuations, and the norm relation of theta.

use crate::arith::{PuiseuxSeries, Rational};
use crate::error::{Error, Result};
use crate::measure::{Measure, Support, TorsorSpec};

use super::theta::{theta_series, theta_valuation, ThetaSpec, TorsionPoint};

/// The rank-1 measure `x ↦ ℓ^{-r} Σ_{y ≡ b (N)} M·ord(θ(x, y))` on `Z/M ⟨a⟩`, for `t = (a, b) ≠ 0`.
///
/// Every summand is the valuation of an actual expansion.
pub fn residue_elliptic_soule(spec: &ThetaSpec, t: (u64, u64)) -> Result<Measure> {
    let n = spec.n;
    let (a, b) = (t.0 % n, t.1 % n);
    if a == 0 && b == 0 {
        return Err(Error::Config("t must be a nonzero N-torsion point".into()));
    }
    let m = spec.level();
    let torsor = TorsorSpec::reduction(spec.ell, spec.r, n, vec![a])?;
    let lr = Rational::from_integer(spec.ell_power().into());
    let mut values = Vec::new();
    for x in torsor.elements() {
        let mut sum = Rational::from_integer(0.into());
        for j in 0..spec.ell_power() {
            let y = b + n * j;
            let p = TorsionPoint::new(m, x[0] as i64, y as i64)?;
            sum += Rational::from_integer(theta_valuation(m, spec.c, p)?.into());
        }
        values.push((x, sum / &lr));
    }
    Measure::from_values(Support::Torsor(torsor), values)
}

/// Per-fiber valuations `ord(θ(x, y))` for fixed `x`, to exhibit independence of `y`.
pub fn fiber_valuations(spec: &ThetaSpec, x: u64, b: u64) -> Result<Vec<i64>> {
    let m = spec.level();
    (0..spec.ell_power())
        .map(|j| theta_valuation(m, spec.c, TorsionPoint::new(m, x as i64, (b + spec.n * j) as i64)?))
        .collect()
}

/// Outcome of comparing the pushforward product with the rescaled base expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormReport {
    pub pass: bool,
    /// Exponents `n < window` (units of `q^{1/dM}`) were compared.
    pub window: i64,
    pub first_mismatch: Option<i64>,
}

/// The `d²` preimages `(x + iM, y + jM)` on level `dM` with their valuations.
fn preimages(m: u64, c: i64, d: u64, p: TorsionPoint) -> Result<Vec<(TorsionPoint, i64)>> {
    let dm = m * d;
    (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .map(|(i, j)| {
            let q = TorsionPoint::new(dm, (p.x + i * m) as i64, (p.y + j * m) as i64)?;
            Ok((q, theta_valuation(dm, c, q)?))
        })
        .collect()
}

/// The expansions at all preimages, each truncated so that the product is valid below
/// `q^{window/dM}`.
pub fn norm_factors(m: u64, c: i64, d: u64, p: TorsionPoint, window: i64) -> Result<Vec<PuiseuxSeries>> {
    let pts = preimages(m, c, d, p)?;
    let total: i64 = pts.iter().map(|(_, v)| v).sum();
    pts.iter()
        .map(|(q, v)| theta_series(m * d, c, *q, window - (total - v)))
        .collect()
}

/// Compares two expansions below `window`; `None` if they agree.
pub fn first_difference(a: &PuiseuxSeries, b: &PuiseuxSeries, window: i64) -> Result<Option<i64>> {
    if a.trunc() < window || b.trunc() < window {
        return Err(Error::TruncationTooSmall {
            requested: window,
            needed: a.trunc().min(b.trunc()),
        });
    }
    let lo = a.valuation_units().into_iter().chain(b.valuation_units()).min();
    Ok(lo.and_then(|lo| (lo..window).find(|&n| a.coeff(n) != b.coeff(n))))
}

/// Checks `Π_{[d]Q = P} θ_{dM}(Q) = θ_M(P)` below `q^{window/dM}`. When the product vanishes to
/// order at least `window`, the window is widened to one full power of `q` past the leading term,
/// so that at least one nonzero coefficient is compared.
pub fn norm_check_theta(spec: &ThetaSpec, d: u64, p: TorsionPoint, window: i64) -> Result<NormReport> {
    let m = spec.level();
    if d == 0 || num_integer::gcd(d as i64, spec.c) != 1 {
        return Err(Error::Config(format!("d = {d} must be prime to c = {}", spec.c)));
    }
    let total: i64 = preimages(m, spec.c, d, p)?.iter().map(|(_, v)| v).sum();
    let window = if total >= window { total + (m * d) as i64 } else { window };
    let product = norm_factors(m, spec.c, d, p, window)?
        .iter()
        .fold(None::<PuiseuxSeries>, |acc, f| Some(acc.map_or_else(|| f.clone(), |a| a.mul(f))))
        .expect("d ≥ 1");
    let base_window = (window + d as i64 - 1) / d as i64;
    let base = theta_series(m, spec.c, p, base_window)?.rescale(m * d)?;
    compare_norm(&product, &base, window)
}

/// Runs the comparison of [`norm_check_theta`] on precomputed series.
pub fn compare_norm(product: &PuiseuxSeries, base: &PuiseuxSeries, window: i64) -> Result<NormReport> {
    let first_mismatch = first_difference(product, base, window)?;
    Ok(NormReport { pass: first_mismatch.is_none(), window, first_mismatch })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::CycloElement;
    use crate::bernoulli::{bernoulli_measure, BernoulliMeasureSpec};

    #[test]
    fn residue_matches_bernoulli() {
        let spec = ThetaSpec::new(2, 1, 3, 5, 0).unwrap();
        let res = residue_elliptic_soule(&spec, (1, 0)).unwrap();
        let b = bernoulli_measure(&BernoulliMeasureSpec::new(2, 1, 3, 5, 1).unwrap());
        assert_eq!(res, b);
        assert_eq!(res.get(&[1]), Rational::from_integer(2.into()));
        assert_eq!(res.get(&[4]), Rational::from_integer((-4).into()));
    }

    #[test]
    fn level_zero_residue() {
        let spec = ThetaSpec::new(2, 0, 5, 7, 0).unwrap();
        for a in 0..5 {
            let res = residue_elliptic_soule(&spec, (a, 1)).unwrap();
            let b = bernoulli_measure(&BernoulliMeasureSpec::new(2, 0, 5, 7, a).unwrap());
            assert_eq!(res, b);
        }
    }

    #[test]
    fn valuation_independent_of_y() {
        let spec = ThetaSpec::new(2, 2, 3, 5, 0).unwrap();
        for x in [1, 4, 7, 10] {
            let v = fiber_valuations(&spec, x, 2).unwrap();
            assert!(v.iter().all(|&a| a == v[0]));
        }
    }

    #[test]
    fn norm_relation_small() {
        let spec = ThetaSpec::new(2, 0, 3, 5, 0).unwrap();
        let p = TorsionPoint::new(3, 1, 1).unwrap();
        assert!(norm_check_theta(&spec, 2, p, 12).unwrap().pass);
        assert!(norm_check_theta(&spec, 1, p, 6).unwrap().pass);
    }

    #[test]
    fn corrupted_product_fails() {
        let p = TorsionPoint::new(3, 1, 1).unwrap();
        let base = theta_series(3, 5, p, 6).unwrap().rescale(6).unwrap();
        let mut terms: Vec<_> = base.terms().map(|(n, c)| (n, c.clone())).collect();
        terms[1].1 = &terms[1].1 + &CycloElement::one(6);
        let bad = PuiseuxSeries::new(6, base.trunc(), terms.clone());
        let rep = compare_norm(&bad, &base, 12).unwrap();
        assert!(!rep.pass);
        assert_eq!(rep.first_mismatch, Some(terms[1].0));
    }
}
