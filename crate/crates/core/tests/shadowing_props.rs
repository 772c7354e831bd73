use ballexp::numerics::dist;
use ballexp::shadowing::{gen_pseudo_orbit, h_shadowing_test, shadow_search, sup_distance, PseudoOrbit};
use ballexp::{Caps, NetSpace, Rational, SystemDef};
use proptest::prelude::*;

fn system(k: usize) -> (SystemDef, u32) {
    match k {
        0 => (SystemDef::tent(), 6),
        1 => (SystemDef::doubling(), 6),
        2 => (SystemDef::ex21(6), 1),
        3 => (SystemDef::shift(6), 1),
        _ => (SystemDef::ex22(3), 6),
    }
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 32, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn generated_orbits_respect_delta(k in 0usize..5, e in 0i32..7, len in 1usize..30, seed in any::<u64>()) {
        let (sys, r) = system(k);
        let net = NetSpace::build(&sys.space, r).unwrap();
        let delta = Rational::pow2(-e);
        let o = gen_pseudo_orbit(&sys, &net, &delta, len, seed).unwrap();
        prop_assert_eq!(o.len(), len);
        prop_assert!(o.validate(&sys).is_ok());
        for w in o.points.windows(2) {
            prop_assert!(dist(&sys.eval(&w[0]).unwrap(), &w[1]) <= delta);
        }
        prop_assert_eq!(&o, &gen_pseudo_orbit(&sys, &net, &delta, len, seed).unwrap());
    }

    #[test]
    fn shadows_persist_for_larger_eps(k in 0usize..5, len in 2usize..8, seed in any::<u64>(), e in 1i32..6, bump in 0i32..4) {
        let (sys, r) = system(k);
        let net = NetSpace::build(&sys.space, r).unwrap();
        let o = gen_pseudo_orbit(&sys, &net, &Rational::pow2(-4), len, seed).unwrap();
        let eps = Rational::pow2(-e);
        let wider = Rational::pow2(-e + bump);
        let a = shadow_search(&sys, &net, &o, &eps).unwrap();
        if let Some(x) = a.shadow() {
            prop_assert!(sup_distance(&sys, x, &o.points).unwrap() <= eps);
            let b = shadow_search(&sys, &net, &o, &wider).unwrap();
            prop_assert_eq!(b.shadow(), Some(x));
        }
    }

    #[test]
    fn tampered_orbits_fail_validation(seed in any::<u64>(), at in 1usize..10) {
        let sys = SystemDef::tent();
        let net = NetSpace::build(&sys.space, 6).unwrap();
        let mut o = gen_pseudo_orbit(&sys, &net, &Rational::pow2(-6), 10, seed).unwrap();
        let target = sys.eval(&o.points[at - 1]).unwrap();
        // the farthest point from the true image is at least 1/2 away
        let far = net.points.iter().max_by_key(|p| dist(p, &target)).unwrap().clone();
        o.points[at] = far;
        prop_assert!(o.validate(&sys).is_err());
        prop_assert!(PseudoOrbit::new(&sys, o.delta.clone(), o.points.clone(), None).is_err());
    }
}

/// Every endpoint-exact shadow is also an ordinary ε-shadow of its chain.
#[test]
fn h_shadows_are_shadows() {
    for (sys, eps, delta) in [
        (SystemDef::ex21(6), Rational::pow2(-2), Rational::pow2(-6)),
        (SystemDef::shift(4), Rational::pow2(-1), Rational::pow2(-3)),
    ] {
        let net = NetSpace::build(&sys.space, 1).unwrap();
        let rep = h_shadowing_test(&sys, &net, &eps, &delta, 3, &Caps::default()).unwrap();
        assert!(!rep.trials.is_empty());
        for t in rep.trials.iter().filter(|t| t.pass) {
            let chain = t.chain.as_ref().unwrap();
            let x = t.shadow_point.as_ref().unwrap();
            let deep = sys.deepened(3).unwrap();
            assert!(sup_distance(&deep, x, chain).unwrap() <= eps);
            let mut end = x.clone();
            for _ in 1..chain.len() {
                end = deep.eval(&end).unwrap();
            }
            assert!(dist(&end, chain.last().unwrap()).is_zero());
        }
    }
}

/// A completed pullback whose start reaches `C` puts the start in `C`'s
/// chain component.
#[test]
fn completed_pullbacks_land_in_the_component_of_c() {
    use ballexp::chaingraph::{ChainAnalysis, TransitionGraph};
    use ballexp::shadowing::{default_slack, pullback_trace, ShadowingParams};
    use ballexp::{q, Point};

    let sys = SystemDef::tent().iterate(2).unwrap();
    let net = NetSpace::build(&sys.space, 8).unwrap();
    let params = ShadowingParams::new(q("1/3"), Rational::pow2(-6)).unwrap();
    let zero = net.index_of(&Point::real(Rational::zero())).unwrap();
    let g = TransitionGraph::build(&sys, &net, &params.delta0).unwrap();
    let an = ChainAnalysis::of(&g);
    for k in 1..=4 {
        let x = Point::real(Rational::new(k, 256));
        let r = pullback_trace(&sys, &net, &[zero], &x, &params, 6, &default_slack(&net)).unwrap();
        assert!(r.completed && r.failure.is_none(), "x={x}");
        let xi = net.index_of(&x).unwrap();
        let reaches = sys.orbit(&x, 16).unwrap().contains(&Point::real(Rational::zero()));
        assert!(reaches);
        assert_eq!(an.component_of(xi), an.component_of(zero), "x={x}");
    }
}
