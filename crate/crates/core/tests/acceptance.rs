//! Acceptance criteria, one PASS/FAIL line each, with wall-clock budgets.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use iwasawa_eis::arith::{binomial, int, rat, Rational, Residue};
use iwasawa_eis::bernoulli::{bernoulli_measure, bernoulli_moment_closed, BernoulliMeasureSpec};
use iwasawa_eis::ledger::{
    dir, dir_via_me, random_admissible_weight, residue, residue_soule_closed, rewrite_soule, ClassSymbol,
    FormalClass, WeightFunction,
};
use iwasawa_eis::measure::{FiniteGroup, GroupMap, Measure, Support, TorsorSpec};
use iwasawa_eis::moments::{check_functoriality, check_trace_compat, modified_moment, moment, moment_torsor, torsor_moment_sum};
use iwasawa_eis::tsym::{exponents, CoeffRing, TSymElement};
use iwasawa_eis::units::{
    cusp_value_closed, epsilon_cusp_eval, norm_check_theta, residue_elliptic_soule, squaring_identity, ThetaSpec,
    TorsionPoint,
};
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

fn bernoulli_congruences() -> Outcome {
    let mut n_cases = 0;
    for ell in [2u64, 3, 5] {
        for n in [3u64, 4] {
            if n.gcd(&ell) != 1 {
                continue;
            }
            for c in [5i64, 7, 11] {
                if c.gcd(&((ell * n) as i64)) != 1 {
                    continue;
                }
                for r in 0..=3 {
                    let lr = ell.pow(r);
                    for t in 0..n {
                        let mu = bernoulli_measure(&BernoulliMeasureSpec::new(ell, r, n, c, t).map_err(e)?);
                        for k in 0..=4 {
                            let got = Residue::from_rational(&moment_torsor(&mu, k).map_err(e)?.coeff(&[k]), lr).map_err(e)?;
                            let want = Residue::from_rational(&bernoulli_moment_closed(k, n, c, t as i64), lr).map_err(e)?;
                            ensure(got == want, || format!("ell={ell} r={r} N={n} c={c} t={t} k={k}: {got} vs {want}"))?;
                            n_cases += 1;
                        }
                    }
                }
            }
        }
    }
    let mu = bernoulli_measure(&BernoulliMeasureSpec::new(5, 1, 3, 7, 1).map_err(e)?);
    let sum = torsor_moment_sum(&mu, 1);
    ensure(sum == int(-181), || format!("spot sum {sum}"))?;
    let closed = bernoulli_moment_closed(1, 3, 7, 1);
    ensure(closed == rat(38, 7), || format!("spot closed {closed}"))?;
    let (a, b) = (Residue::from_rational(&sum, 5).map_err(e)?, Residue::from_rational(&closed, 5).map_err(e)?);
    ensure(a == b && a.value() == 4, || format!("spot residues {a} {b}"))?;
    Ok(format!("{n_cases} congruences"))
}

fn residue_theorem() -> Outcome {
    let mut n_cases = 0;
    for (ell, r, n) in [(2u64, 1u32, 3u64), (2, 2, 3), (3, 1, 4)] {
        let spec = ThetaSpec::new(ell, r, n, 5, 0).map_err(e)?;
        for t in WeightFunction::points(n) {
            let res = residue_elliptic_soule(&spec, t).map_err(e)?;
            let want = bernoulli_measure(&BernoulliMeasureSpec::new(ell, r, n, 5, t.0).map_err(e)?);
            ensure(res == want, || format!("ell={ell} r={r} N={n} t={t:?}"))?;
            n_cases += 1;
        }
    }
    Ok(format!("{n_cases} measures"))
}

fn theta_norm() -> Outcome {
    let mut n_cases = 0;
    for (r, window) in [(1u32, 24i64), (0, 12)] {
        let spec = ThetaSpec::new(2, r, 3, 5, 0).map_err(e)?;
        let m = spec.level();
        for x in 0..m {
            for y in 0..m {
                let Ok(p) = TorsionPoint::new(m, x as i64, y as i64) else { continue };
                let rep = norm_check_theta(&spec, 2, p, window).map_err(e)?;
                ensure(rep.pass, || format!("M={m} P=({x},{y}) first mismatch {:?}", rep.first_mismatch))?;
                n_cases += 1;
            }
        }
    }
    Ok(format!("{n_cases} points"))
}

fn cusp_evaluation() -> Outcome {
    let mut n_cases = 0;
    for r in [1u32, 2] {
        let spec = ThetaSpec::new(2, r, 3, 5, 1).map_err(e)?;
        let m = spec.level();
        for y in 1..m {
            let v = epsilon_cusp_eval(&spec, y).map_err(e)?;
            ensure(v.series_constant == cusp_value_closed(m, 5, y).map_err(e)?, || format!("M={m} y={y}"))?;
            ensure(squaring_identity(m, 5, y, &v.closed).map_err(e)?, || format!("square M={m} y={y}"))?;
            n_cases += 1;
        }
    }
    Ok(format!("{n_cases} cusp values"))
}

fn two_route_dir() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut n_cases = 0;
    for n in [3u64, 4, 5] {
        let aux: Vec<i64> = (1..).map(|j| 1 + j * n as i64).filter(|c| c.gcd(&(12 * n as i64)) == 1).take(2).collect();
        for k in 1..=5 {
            for _ in 0..50 {
                let psi = random_admissible_weight(&mut rng, k, n);
                let closed = dir(&psi).map_err(e)?;
                for &c in &aux {
                    let me = dir_via_me(&psi, c).map_err(e)?;
                    ensure(me == closed, || format!("N={n} k={k} c={c}: {me} vs {closed}"))?;
                    n_cases += 1;
                }
            }
        }
    }
    Ok(format!("{n_cases} comparisons"))
}

fn closed_residues() -> Outcome {
    let mut n_cases = 0;
    for k in 0..=6 {
        for n in 2..=5u64 {
            for c in [5i64, 7, 11, 13] {
                if c.gcd(&(n as i64)) != 1 {
                    continue;
                }
                for t in WeightFunction::points(n) {
                    let sym = ClassSymbol::soule_elliptic(k, n, c, t).map_err(e)?;
                    let lhs = residue(&rewrite_soule(&FormalClass::symbol(sym))).map_err(e)?;
                    let rhs = residue_soule_closed(k, n, c, t);
                    ensure(lhs == rhs, || format!("k={k} N={n} c={c} t={t:?}: {lhs} vs {rhs}"))?;
                    n_cases += 1;
                }
            }
        }
    }
    let spot = residue(&FormalClass::symbol(ClassSymbol::eis(2, 3, (1, 0)).map_err(e)?)).map_err(e)?;
    ensure(spot == rat(-13, 720), || format!("spot {spot}"))?;
    Ok(format!("{n_cases} identities"))
}

fn rand_measure(rng: &mut ChaCha8Rng, s: Support) -> Measure {
    let vals: Vec<_> = s
        .elements()
        .into_iter()
        .filter_map(|x| rng.gen_bool(0.4).then(|| (x, int(rng.gen_range(-5..=5)))))
        .collect();
    Measure::from_values(s, vals).expect("in support")
}

fn moment_algebra() -> Outcome {
    const CASES: usize = 100;
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for i in 0..CASES {
        let (ell, r) = [(2u64, 3u32), (3, 2), (5, 1)][i % 3];
        let lr = ell.pow(r);
        let n = [3u64, 4, 7][i % 3];
        let k = (i % 5) as u32;
        let grp = Support::Group(FiniteGroup::uniform(lr, 2));
        let ring = CoeffRing::Residues(lr);

        let x = vec![rng.gen_range(0..lr), rng.gen_range(0..lr)];
        let coords: Vec<Rational> = x.iter().map(|&a| int(a as i64)).collect();
        let want = TSymElement::linear(ring, &coords).map_err(e)?.divided_power(k).map_err(e)?;
        let got = moment(&Measure::dirac(grp.clone(), x.clone()).map_err(e)?, k).map_err(e)?;
        ensure(got == want, || format!("dirac #{i}"))?;

        let (a, b) = (rand_measure(&mut rng, grp.clone()), rand_measure(&mut rng, grp.clone()));
        let mut graded = TSymElement::zero(2, ring);
        for j in 0..=k {
            graded = graded
                .add(&moment(&a, j).map_err(e)?.mul(&moment(&b, k - j).map_err(e)?).map_err(e)?)
                .map_err(e)?;
        }
        ensure(graded == moment(&a.convolve(&b).map_err(e)?, k).map_err(e)?, || format!("convolution #{i}"))?;

        let zero = Measure::dirac(grp.clone(), vec![0, 0]).map_err(e)?;
        let mut aug = zero.clone();
        for _ in 0..=k {
            let h = vec![rng.gen_range(0..lr), rng.gen_range(0..lr)];
            aug = aug.convolve(&Measure::dirac(grp.clone(), h).map_err(e)?.sub(&zero).map_err(e)?).map_err(e)?;
        }
        for j in 0..=k {
            ensure(moment(&aug, j).map_err(e)?.is_zero(), || format!("augmentation #{i} degree {j}"))?;
        }

        let c = [5i64, 7, 11][i % 3];
        if c.gcd(&((ell * n) as i64)) == 1 {
            let t = rng.gen_range(0..n);
            let tower: Vec<Measure> = (0..=r)
                .map(|rr| BernoulliMeasureSpec::new(ell, rr, n, c, t).map(|s| bernoulli_measure(&s)))
                .collect::<Result<_, _>>()
                .map_err(e)?;
            let rep = check_trace_compat(&tower, k).map_err(e)?;
            ensure(rep.pass, || format!("tower #{i}: {}", rep.detail))?;
        }

        let t = vec![rng.gen_range(0..n), rng.gen_range(0..n)];
        let mu = rand_measure(&mut rng, Support::Torsor(TorsorSpec::reduction(ell, r, n, t).map_err(e)?));
        let rep = check_functoriality(&GroupMap::Negate, &mu, k).map_err(e)?;
        ensure(rep.pass, || format!("negation #{i}: {}", rep.detail))?;
        let infl = [2u64, 5, 7, 11].into_iter().find(|m| m.gcd(&ell) == 1).expect("exists");
        let pushed = mu.pushforward(&GroupMap::Inflate(infl)).map_err(e)?;
        ensure(modified_moment(&pushed, k).map_err(e)? == modified_moment(&mu, k).map_err(e)?, || {
            format!("N-independence #{i}")
        })?;
    }
    Ok(format!("{CASES} cases per law"))
}

fn rand_linear(rng: &mut ChaCha8Rng, ring: CoeffRing) -> Result<TSymElement, String> {
    TSymElement::linear(ring, &[int(rng.gen_range(-30..=30)), int(rng.gen_range(-30..=30))]).map_err(e)
}

fn tsym_ring() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut n_cases = 0;
    for ring in [CoeffRing::Rationals, CoeffRing::Integers, CoeffRing::Residues(27)] {
        for k in 0..=6u32 {
            for _ in 0..5 {
                let (g, h) = (rand_linear(&mut rng, ring)?, rand_linear(&mut rng, ring)?);
                let lhs = g.add(&h).map_err(e)?.divided_power(k).map_err(e)?;
                let mut rhs = TSymElement::zero(2, ring);
                for i in 0..=k {
                    let term = g.divided_power(i).map_err(e)?.mul(&h.divided_power(k - i).map_err(e)?).map_err(e)?;
                    rhs = rhs.add(&term).map_err(e)?;
                }
                ensure(lhs == rhs, || format!("addition law k={k} {}", ring.tag()))?;
                for m in 0..=k {
                    let p = g.divided_power(m).map_err(e)?.mul(&g.divided_power(k - m).map_err(e)?).map_err(e)?;
                    let q = g.divided_power(k).map_err(e)?.scale(&Rational::from_integer(binomial(k, m))).map_err(e)?;
                    ensure(p == q, || format!("product law {m}+{} {}", k - m, ring.tag()))?;
                }
                let target = CoeffRing::Residues(9);
                let prod = g.mul(&h).map_err(e)?.base_change(target).map_err(e)?;
                let prod2 = g.base_change(target).map_err(e)?.mul(&h.base_change(target).map_err(e)?).map_err(e)?;
                ensure(prod == prod2, || format!("base change k={k} {}", ring.tag()))?;
                let pw = lhs.base_change(target).map_err(e)?;
                let pw2 = g.add(&h).map_err(e)?.base_change(target).map_err(e)?.divided_power(k).map_err(e)?;
                ensure(pw == pw2, || format!("base change of divided power k={k}"))?;
                n_cases += 1;
            }
        }
    }
    for k in 0..=6 {
        ensure(exponents(2, k).len() == k as usize + 1, || format!("dimension in degree {k}"))?;
    }
    Ok(format!("{n_cases} random pairs"))
}

fn main() -> ExitCode {
    let criteria: [(&str, u64, fn() -> Outcome); 8] = [
        ("Bernoulli moment congruence", 10, bernoulli_congruences),
        ("residue of elliptic Soule measures", 60, residue_theorem),
        ("norm compatibility of theta", 60, theta_norm),
        ("cusp evaluation and squaring identity", 10, cusp_evaluation),
        ("two-route Dir agreement", 5, two_route_dir),
        ("closed residue consistency", 1, closed_residues),
        ("moment-map algebra", 10, moment_algebra),
        ("TSym ring laws", 5, tsym_ring),
    ];
    let mut failed = 0;
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let within = elapsed <= Duration::from_secs(*budget);
        let (verdict, detail) = match (&outcome, within) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("{d}; over budget")),
            (Err(d), _) => ("FAIL", d.clone()),
        };
        if verdict == "FAIL" {
            failed += 1;
        }
        println!(
            "{verdict} criterion {}: {name} ({:.2}s of {budget}s) {detail}",
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
