//! Grid-driven verification suites producing deterministic reports.

use std::fmt::Display;
use std::str::FromStr;

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{binomial, format_rational, Rational, Residue};
use crate::bernoulli::{bernoulli_measure, bernoulli_measure_rank2, bernoulli_moment_closed, BernoulliMeasureSpec};
use crate::error::{Error, Result};
use crate::ledger::{
    dir, dir_via_me, random_admissible_weight, residue, residue_soule_closed, rewrite_soule, ClassSymbol,
    FormalClass, WeightFunction,
};
use crate::measure::{is_prime, FiniteGroup, GroupMap, Measure, Support, TorsorSpec};
use crate::moments::{check_functoriality, check_trace_compat, modified_moment, moment, moment_torsor, torsor_moment_sum};
use crate::tsym::{exponents, CoeffRing, TSymElement};
use crate::units::{
    cusp_value_closed, epsilon_cusp_eval, norm_check_theta, norm_under_power, predicted_valuation,
    residue_elliptic_soule, squaring_identity, theta_valuation, xi, xi_c, ThetaSpec, TorsionPoint,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Tsym,
    Measures,
    Moments,
    Bernoulli,
    Units,
    Residues,
    Dir,
    All,
}

impl Suite {
    pub const PARTS: [Suite; 7] = [
        Suite::Tsym,
        Suite::Measures,
        Suite::Moments,
        Suite::Bernoulli,
        Suite::Units,
        Suite::Residues,
        Suite::Dir,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Tsym => "tsym",
            Suite::Measures => "measures",
            Suite::Moments => "moments",
            Suite::Bernoulli => "bernoulli",
            Suite::Units => "units",
            Suite::Residues => "residues",
            Suite::Dir => "dir",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::PARTS
            .iter()
            .chain([&Suite::All])
            .find(|p| p.name() == s)
            .copied()
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

/// Parameters shared by all suites.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub ell: u64,
    #[serde(rename = "N")]
    pub n: u64,
    pub c: i64,
    pub rmax: u32,
    pub kmax: u32,
    pub trunc: i64,
    pub seed: u64,
}

impl Default for Grid {
    fn default() -> Self {
        Grid { ell: 2, n: 3, c: 5, rmax: 2, kmax: 4, trunc: 24, seed: 0 }
    }
}

impl Grid {
    fn check_base(&self) -> Result<()> {
        if !is_prime(self.ell) {
            return Err(Error::Config(format!("ell = {} is not prime", self.ell)));
        }
        if self.n < 2 || self.n.gcd(&self.ell) != 1 {
            return Err(Error::Config(format!("N = {} must be at least 2 and prime to ell", self.n)));
        }
        Ok(())
    }

    fn bernoulli_spec(&self, r: u32, t: u64) -> Result<BernoulliMeasureSpec> {
        BernoulliMeasureSpec::new(self.ell, r, self.n, self.c, t)
    }

    fn theta_spec(&self, r: u32) -> Result<ThetaSpec> {
        ThetaSpec::new(self.ell, r, self.n, self.c, self.trunc)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseResult {
    pub suite: String,
    pub case: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

/// One row of the Bernoulli moment congruence table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentRow {
    pub ell: u64,
    pub r: u32,
    #[serde(rename = "N")]
    pub n: u64,
    pub c: i64,
    pub t: u64,
    pub k: u32,
    pub finite_sum: String,
    pub closed_value: String,
    pub congruent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub grid: Grid,
    pub cases: Vec<CaseResult>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub moment_rows: Vec<MomentRow>,
    pub summary: Summary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }
}

struct Cases {
    suite: &'static str,
    out: Vec<CaseResult>,
}

impl Cases {
    fn check<T: PartialEq + Display>(&mut self, case: String, expected: &T, actual: &T) {
        self.record(case, expected.to_string(), actual.to_string(), expected == actual);
    }

    fn record(&mut self, case: String, expected: String, actual: String, pass: bool) {
        self.out.push(CaseResult { suite: self.suite.into(), case, expected, actual, pass });
    }

    fn flag(&mut self, case: String, pass: bool, detail: impl Display) {
        self.record(case, "pass".into(), if pass { "pass".into() } else { detail.to_string() }, pass);
    }
}

fn r(x: i64) -> Rational {
    Rational::from_integer(x.into())
}

fn random_linear<R: Rng>(rng: &mut R, ring: CoeffRing) -> Result<TSymElement> {
    TSymElement::linear(ring, &[r(rng.gen_range(-20..=20)), r(rng.gen_range(-20..=20))])
}

fn random_tsym<R: Rng>(rng: &mut R, ring: CoeffRing, kmax: u32) -> Result<TSymElement> {
    let terms: Vec<(Vec<u32>, Rational)> = (0..=kmax)
        .flat_map(|k| exponents(2, k))
        .filter_map(|n| rng.gen_bool(0.5).then(|| (n, r(rng.gen_range(-9..=9)))))
        .collect();
    TSymElement::from_terms(2, ring, terms)
}

fn random_measure<R: Rng>(rng: &mut R, support: Support) -> Result<Measure> {
    let values: Vec<(Vec<u64>, Rational)> = support
        .elements()
        .into_iter()
        .filter_map(|x| rng.gen_bool(0.4).then(|| (x, r(rng.gen_range(-5..=5)))))
        .collect();
    Measure::from_values(support, values)
}

fn tsym_suite(g: &Grid, rng: &mut ChaCha8Rng) -> Result<Vec<CaseResult>> {
    g.check_base()?;
    let mut cs = Cases { suite: "tsym", out: Vec::new() };
    let lr = g.ell.pow(g.rmax.max(1));
    let kmax = g.kmax.min(6);
    for ring in [CoeffRing::Rationals, CoeffRing::Residues(lr)] {
        for k in 0..=kmax {
            let (a, b) = (random_linear(rng, ring)?, random_linear(rng, ring)?);
            let lhs = a.add(&b)?.divided_power(k)?;
            let mut rhs = TSymElement::zero(2, ring);
            for i in 0..=k {
                rhs = rhs.add(&a.divided_power(i)?.mul(&b.divided_power(k - i)?)?)?;
            }
            cs.check(format!("{} (g+h)^[{k}]", ring.tag()), &lhs, &rhs);
            for m in 0..=k {
                let prod = a.divided_power(m)?.mul(&a.divided_power(k - m)?)?;
                let expect = a.divided_power(k)?.scale(&Rational::from_integer(binomial(k, m)))?;
                cs.check(format!("{} h^[{m}] h^[{}]", ring.tag(), k - m), &expect, &prod);
            }
        }
    }
    for trial in 0..10 {
        let (a, b) = (random_tsym(rng, CoeffRing::Rationals, 3)?, random_tsym(rng, CoeffRing::Rationals, 3)?);
        let target = CoeffRing::Residues(lr);
        let lhs = a.mul(&b)?.base_change(target)?;
        let rhs = a.base_change(target)?.mul(&b.base_change(target)?)?;
        cs.check(format!("base change #{trial}"), &lhs, &rhs);
    }
    for k in 0..=kmax {
        cs.check(format!("dim TSym^{k} rank 2"), &(k as usize + 1), &exponents(2, k).len());
    }
    Ok(cs.out)
}

fn measures_suite(g: &Grid, rng: &mut ChaCha8Rng) -> Result<Vec<CaseResult>> {
    g.check_base()?;
    let mut cs = Cases { suite: "measures", out: Vec::new() };
    for rr in 0..=g.rmax {
        let m = g.ell.pow(rr) * g.n;
        let grp = Support::Group(FiniteGroup::uniform(m, 2));
        let (a, b, c) = (
            random_measure(rng, grp.clone())?,
            random_measure(rng, grp.clone())?,
            random_measure(rng, grp.clone())?,
        );
        let ab = a.convolve(&b)?;
        cs.flag(format!("m={m} commutative"), ab == b.convolve(&a)?, "convolution not commutative");
        cs.flag(format!("m={m} associative"), ab.convolve(&c)? == a.convolve(&b.convolve(&c)?)?, "not associative");
        cs.check(format!("m={m} mass"), &(a.total_mass() * b.total_mass()), &ab.total_mass());
        let phi = GroupMap::Multiply(g.c);
        let lhs = ab.pushforward(&phi)?;
        let rhs = a.pushforward(&phi)?.convolve(&b.pushforward(&phi)?)?;
        cs.flag(format!("m={m} [c] is a homomorphism"), lhs == rhs, "pushforward does not respect convolution");
        let composite = GroupMap::Compose(vec![GroupMap::Multiply(g.c), GroupMap::Negate]);
        let stepwise = a.pushforward(&GroupMap::Multiply(g.c))?.pushforward(&GroupMap::Negate)?;
        cs.flag(format!("m={m} functoriality"), a.pushforward(&composite)? == stepwise, "composite differs");
        let (x, y) = (vec![rng.gen_range(0..m), rng.gen_range(0..m)], vec![rng.gen_range(0..m), rng.gen_range(0..m)]);
        let sum = vec![(x[0] + y[0]) % m, (x[1] + y[1]) % m];
        let dd = Measure::dirac(grp.clone(), x)?.convolve(&Measure::dirac(grp.clone(), y)?)?;
        cs.flag(format!("m={m} dirac"), dd == Measure::dirac(grp, sum)?, "δ_x * δ_y ≠ δ_(x+y)");
        if rr >= 1 {
            for t in 0..g.n {
                let s = g.bernoulli_spec(rr, t)?;
                let up = bernoulli_measure(&s).trace()?;
                cs.flag(format!("r={rr} t={t} Bernoulli trace"), up == bernoulli_measure(&s.at_level(rr - 1)), "trace differs");
            }
        }
    }
    Ok(cs.out)
}

fn moments_suite(g: &Grid, rng: &mut ChaCha8Rng) -> Result<Vec<CaseResult>> {
    g.check_base()?;
    let mut cs = Cases { suite: "moments", out: Vec::new() };
    let kmax = g.kmax;
    for rr in 1..=g.rmax.max(1) {
        let lr = g.ell.pow(rr);
        let grp = Support::Group(FiniteGroup::uniform(lr, 2));
        let ring = CoeffRing::Residues(lr);
        for k in 0..=kmax {
            let x = vec![rng.gen_range(0..lr), rng.gen_range(0..lr)];
            let coords: Vec<Rational> = x.iter().map(|&a| r(a as i64)).collect();
            let expect = TSymElement::linear(ring, &coords)?.divided_power(k)?;
            cs.check(format!("r={rr} k={k} dirac {x:?}"), &expect, &moment(&Measure::dirac(grp.clone(), x)?, k)?);
            let (a, b) = (random_measure(rng, grp.clone())?, random_measure(rng, grp.clone())?);
            let mut graded = TSymElement::zero(2, ring);
            for i in 0..=k {
                graded = graded.add(&moment(&a, i)?.mul(&moment(&b, k - i)?)?)?;
            }
            cs.check(format!("r={rr} k={k} convolution"), &graded, &moment(&a.convolve(&b)?, k)?);
            // a product of k+1 augmentation elements has no moments below degree k+1
            let mut aug = Measure::dirac(grp.clone(), vec![0, 0])?;
            for _ in 0..=k {
                let h = vec![rng.gen_range(0..lr), rng.gen_range(0..lr)];
                let gen = Measure::dirac(grp.clone(), h)?.sub(&Measure::dirac(grp.clone(), vec![0, 0])?)?;
                aug = aug.convolve(&gen)?;
            }
            let low = (0..=k).all(|j| moment(&aug, j).map(|m| m.is_zero()).unwrap_or(false));
            cs.flag(format!("r={rr} k={k} augmentation"), low, "nonzero low-degree moment");
        }
    }
    for t in 0..g.n {
        let tower: Vec<Measure> = (0..=g.rmax.max(1))
            .map(|rr| g.bernoulli_spec(rr, t).map(|s| bernoulli_measure(&s)))
            .collect::<Result<_>>()?;
        for k in 0..=kmax {
            let rep = check_trace_compat(&tower, k)?;
            cs.flag(format!("t={t} k={k} tower"), rep.pass, rep.detail);
        }
    }
    let infl = (2..).find(|m: &u64| m.gcd(&g.ell) == 1).expect("exists");
    for rr in 0..=g.rmax {
        for t in [vec![1u64, 0], vec![0, 1], vec![1, 2 % g.n]] {
            let s = TorsorSpec::reduction(g.ell, rr, g.n, t.clone())?;
            let mu = random_measure(rng, Support::Torsor(s))?;
            for k in 0..=kmax {
                let rep = check_functoriality(&GroupMap::Negate, &mu, k)?;
                cs.flag(format!("r={rr} t={t:?} k={k} negation"), rep.pass, rep.detail);
                let inflated = modified_moment(&mu.pushforward(&GroupMap::Inflate(infl))?, k)?;
                let same = inflated == modified_moment(&mu, k)?;
                cs.flag(format!("r={rr} t={t:?} k={k} N-independence"), same, "modified moment changed");
            }
        }
    }
    Ok(cs.out)
}

/// Congruence rows `Σ μ(x)·x^k ≡ closed value mod ℓ^r` for the grid's `(ℓ, N, c)`.
pub fn moment_rows(g: &Grid) -> Result<Vec<MomentRow>> {
    g.check_base()?;
    let mut rows = Vec::new();
    for rr in 0..=g.rmax {
        for t in 0..g.n {
            let mu = bernoulli_measure(&g.bernoulli_spec(rr, t)?);
            let lr = g.ell.pow(rr);
            for k in 0..=g.kmax {
                let finite = torsor_moment_sum(&mu, k);
                let closed = bernoulli_moment_closed(k, g.n, g.c, t as i64);
                let diff = &finite - &closed;
                let congruent = Residue::from_rational(&diff, lr).is_ok_and(|x| x.is_zero());
                rows.push(MomentRow {
                    ell: g.ell,
                    r: rr,
                    n: g.n,
                    c: g.c,
                    t,
                    k,
                    finite_sum: format_rational(&finite),
                    closed_value: format_rational(&closed),
                    congruent,
                });
            }
        }
    }
    Ok(rows)
}

fn bernoulli_suite(g: &Grid) -> Result<(Vec<CaseResult>, Vec<MomentRow>)> {
    let rows = moment_rows(g)?;
    let mut cs = Cases { suite: "bernoulli", out: Vec::new() };
    for row in &rows {
        cs.record(
            format!("r={} t={} k={}", row.r, row.t, row.k),
            row.closed_value.clone(),
            row.finite_sum.clone(),
            row.congruent,
        );
    }
    for rr in 1..=g.rmax {
        let lr = g.ell.pow(rr);
        for t in 0..g.n {
            let mu = bernoulli_measure(&g.bernoulli_spec(rr, t)?);
            for k in 0..=g.kmax {
                let tsym = moment_torsor(&mu, k)?;
                let closed = Residue::from_rational(&bernoulli_moment_closed(k, g.n, g.c, t as i64), lr)?;
                let got = Residue::from_rational(&tsym.coeff(&[k]), lr)?;
                cs.check(format!("r={rr} t={t} k={k} TSym moment"), &closed, &got);
            }
        }
    }
    Ok((cs.out, rows))
}

fn units_suite(g: &Grid) -> Result<Vec<CaseResult>> {
    let mut cs = Cases { suite: "units", out: Vec::new() };
    let rmax = g.rmax.min(2);
    for rr in 0..=rmax {
        let spec = g.theta_spec(rr)?;
        let m = spec.level();
        for x in 0..m {
            for y in 0..m {
                let Ok(p) = TorsionPoint::new(m, x as i64, y as i64) else { continue };
                let v = theta_valuation(m, g.c, p)?;
                cs.check(format!("M={m} ord({x},{y})"), &predicted_valuation(m, g.c, x), &r(v));
            }
        }
        if rr >= 1 {
            for y in 1..m {
                let case = format!("M={m} cusp (0,{y})");
                match epsilon_cusp_eval(&spec, y) {
                    Ok(v) => {
                        cs.check(case, &v.closed, &v.series_constant);
                        let sq = squaring_identity(m, g.c, y, &v.closed)?;
                        cs.flag(format!("M={m} square (0,{y})"), sq, "squaring identity fails");
                    }
                    Err(Error::Mismatch(d)) => cs.record(case, cusp_value_closed(m, g.c, y)?.to_string(), d, false),
                    Err(e) => return Err(e),
                }
            }
        }
    }
    let base = g.theta_spec(0)?;
    for d in [2u64, 3] {
        if d.gcd(&(g.c as u64)) != 1 || d * g.n > 24 {
            continue;
        }
        let window = g.trunc.max(1) * d as i64 / 2;
        for x in 0..g.n {
            for y in 0..g.n {
                let Ok(p) = TorsionPoint::new(g.n, x as i64, y as i64) else { continue };
                let rep = norm_check_theta(&base, d, p, window)?;
                cs.flag(
                    format!("d={d} norm at ({x},{y}) below {window}/{}", d * g.n),
                    rep.pass,
                    format!("first mismatch at {:?}", rep.first_mismatch),
                );
            }
        }
    }
    for d in [2, 3, 5] {
        cs.check(format!("Xi norm d={d}"), &xi(), &norm_under_power(&xi(), d)?);
    }
    let f = xi_c(g.c as u64)?;
    for d in [2u64, 3] {
        if d.gcd(&(g.c as u64)) == 1 {
            cs.check(format!("cXi norm d={d}"), &f, &norm_under_power(&f, d)?);
        }
    }
    for rr in 0..rmax {
        for t in [(1, 0), (0, 1), (1, 1)] {
            let up = bernoulli_measure_rank2(g.ell, rr + 1, g.n, g.c, t)?;
            let down = bernoulli_measure_rank2(g.ell, rr, g.n, g.c, t)?;
            cs.flag(format!("r={rr} t={t:?} Bp tower"), up.pushforward(&GroupMap::ReduceLevel)? == down, "Bp pushforward differs");
        }
    }
    Ok(cs.out)
}

fn residues_suite(g: &Grid) -> Result<Vec<CaseResult>> {
    let mut cs = Cases { suite: "residues", out: Vec::new() };
    for rr in 0..=g.rmax {
        let spec = g.theta_spec(rr)?;
        for t in WeightFunction::points(g.n) {
            let res = residue_elliptic_soule(&spec, t)?;
            let expect = bernoulli_measure(&g.bernoulli_spec(rr, t.0)?);
            let show = |m: &Measure| serde_json::to_string(m).expect("serializable");
            cs.record(format!("r={rr} t={t:?}"), show(&expect), show(&res), res == expect);
        }
    }
    Ok(cs.out)
}

fn dir_suite(g: &Grid, rng: &mut ChaCha8Rng) -> Result<Vec<CaseResult>> {
    let mut cs = Cases { suite: "dir", out: Vec::new() };
    let n = g.n;
    let aux: Vec<i64> = (1..).map(|j| 1 + j * n as i64).filter(|c| c.gcd(&(6 * (g.ell * n) as i64)) == 1).take(2).collect();
    for k in 1..=g.kmax.max(1) {
        for trial in 0..10 {
            let psi = random_admissible_weight(rng, k, n);
            let closed = dir(&psi)?;
            for &c in &aux {
                cs.check(format!("k={k} #{trial} c={c}"), &closed, &dir_via_me(&psi, c)?);
            }
        }
    }
    for k in 0..=g.kmax {
        for c in [5i64, 7, 11, 13] {
            if c.gcd(&(n as i64)) != 1 {
                continue;
            }
            for t in WeightFunction::points(n) {
                let e = FormalClass::symbol(ClassSymbol::soule_elliptic(k, n, c, t)?);
                cs.check(format!("k={k} c={c} t={t:?} residue"), &residue_soule_closed(k, n, c, t), &residue(&rewrite_soule(&e))?);
            }
        }
    }
    Ok(cs.out)
}

/// Runs a suite; constraint violations surface as [`Error::Config`].
pub fn run(suite: Suite, grid: &Grid) -> Result<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(grid.seed);
    let mut cases = Vec::new();
    let mut rows = Vec::new();
    let parts: Vec<Suite> = if suite == Suite::All { Suite::PARTS.to_vec() } else { vec![suite] };
    for part in parts {
        match part {
            Suite::Tsym => cases.extend(tsym_suite(grid, &mut rng)?),
            Suite::Measures => cases.extend(measures_suite(grid, &mut rng)?),
            Suite::Moments => cases.extend(moments_suite(grid, &mut rng)?),
            Suite::Bernoulli => {
                let (c, r) = bernoulli_suite(grid)?;
                cases.extend(c);
                rows.extend(r);
            }
            Suite::Units => cases.extend(units_suite(grid)?),
            Suite::Residues => cases.extend(residues_suite(grid)?),
            Suite::Dir => cases.extend(dir_suite(grid, &mut rng)?),
            Suite::All => unreachable!(),
        }
    }
    let passed = cases.iter().filter(|c| c.pass).count();
    Ok(VerifyReport {
        suite,
        grid: grid.clone(),
        summary: Summary { total: cases.len(), passed, failed: cases.len() - passed },
        cases,
        moment_rows: rows,
        wall_time_ms: None,
    })
}
