use iwasawa_eis::arith::int;
use iwasawa_eis::bernoulli::{bernoulli_measure, first_non_integral, BernoulliMeasureSpec};
use iwasawa_eis::measure::{FiniteGroup, GroupMap, Measure, Support, TorsorSpec};
use proptest::prelude::*;

fn group_measure(m: u64) -> impl Strategy<Value = Measure> {
    prop::collection::vec(-4i64..=4, (m * m) as usize).prop_map(move |vals| {
        let g = Support::Group(FiniteGroup::uniform(m, 2));
        let pts = g.elements();
        Measure::from_values(g, pts.into_iter().zip(vals).map(|(x, v)| (x, int(v)))).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn convolution_is_commutative_and_associative(a in group_measure(6), b in group_measure(6), c in group_measure(6)) {
        prop_assert_eq!(a.convolve(&b).unwrap(), b.convolve(&a).unwrap());
        let left = a.convolve(&b).unwrap().convolve(&c).unwrap();
        let right = a.convolve(&b.convolve(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn mass_is_multiplicative(a in group_measure(4), b in group_measure(4)) {
        prop_assert_eq!(a.convolve(&b).unwrap().total_mass(), a.total_mass() * b.total_mass());
    }

    #[test]
    fn multiplication_is_a_ring_map(a in group_measure(5), b in group_measure(5), c in 1i64..5) {
        let phi = GroupMap::Multiply(c);
        let lhs = a.convolve(&b).unwrap().pushforward(&phi).unwrap();
        let rhs = a.pushforward(&phi).unwrap().convolve(&b.pushforward(&phi).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn pushforward_composes(a in group_measure(6), c in -5i64..5) {
        let steps = [GroupMap::Multiply(c), GroupMap::ReduceModuli(vec![3, 2]), GroupMap::Project(1)];
        let mut stepwise = a.clone();
        for f in &steps {
            stepwise = stepwise.pushforward(f).unwrap();
        }
        prop_assert_eq!(a.pushforward(&GroupMap::Compose(steps.to_vec())).unwrap(), stepwise);
    }

    #[test]
    fn torsor_action_preserves_mass(t in 0u64..3, vals in prop::collection::vec(-3i64..=3, 4)) {
        let s = TorsorSpec::reduction(2, 2, 3, vec![t]).unwrap();
        let mu = Measure::from_fn(Support::Torsor(s.clone()), |x| int(x[0] as i64 % 5));
        let k = Support::Group(s.kernel());
        let nu = Measure::from_values(k.clone(), k.elements().into_iter().zip(vals).map(|(h, v)| (h, int(v)))).unwrap();
        let acted = mu.convolve(&nu).unwrap();
        prop_assert_eq!(acted.total_mass(), mu.total_mass() * nu.total_mass());
        prop_assert_eq!(acted.support(), mu.support());
    }
}

#[test]
fn bernoulli_measures_are_integral_and_trace_compatible() {
    for (ell, n, c) in [(2u64, 3u64, 5i64), (3, 4, 5), (5, 3, 7), (5, 4, 11)] {
        for t in 0..n {
            for r in 1..=3 {
                let s = BernoulliMeasureSpec::new(ell, r, n, c, t).unwrap();
                let mu = bernoulli_measure(&s);
                assert!(first_non_integral(&mu).is_none());
                assert_eq!(mu.trace().unwrap(), bernoulli_measure(&s.at_level(r - 1)));
            }
        }
    }
}

#[test]
fn dirac_convolution_adds_points() {
    let g = Support::Group(FiniteGroup::uniform(7, 2));
    let d = |x: Vec<u64>| Measure::dirac(g.clone(), x).unwrap();
    assert_eq!(d(vec![3, 5]).convolve(&d(vec![6, 4])).unwrap(), d(vec![2, 2]));
}

#[test]
fn json_round_trip() {
    let s = TorsorSpec::multiplication(3, 1, 2, vec![1, 0]).unwrap();
    let mu = Measure::from_fn(Support::Torsor(s), |x| int(x[0] as i64 - x[1] as i64));
    let js = serde_json::to_string(&mu).unwrap();
    assert_eq!(serde_json::from_str::<Measure>(&js).unwrap(), mu);
}
