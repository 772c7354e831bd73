use ballexp::expanding::{ball_expanding_check, local_injectivity_check, metric_expanding_check, BallWitness, CoverMode};
use ballexp::{q, NetSpace, Point, Rational, SpaceSpec, SystemDef};
use proptest::prelude::*;

fn tent(x: &Rational) -> Rational {
    let one = Rational::one();
    &one - (&one - x * Rational::integer(2)).abs()
}

fn logistic(x: &Rational) -> Rational {
    Rational::integer(4) * x * (Rational::one() - x)
}

fn real(p: &Point) -> &Rational {
    p.scalar().unwrap()
}

/// All failing `(x, δ, y)` triples on `[0, 1]` nets by direct enumeration,
/// in `(x, δ, y)` order.
fn failing_triples(
    f: fn(&Rational) -> Rational,
    target: &NetSpace,
    cand: &NetSpace,
    l: &Rational,
    samples: &[Rational],
    eta: &Rational,
) -> Vec<(Rational, Rational, Rational, Rational)> {
    let mut out = Vec::new();
    let mut samples = samples.to_vec();
    samples.sort();
    samples.dedup();
    for x in cand.points.iter().map(real) {
        let fx = f(x);
        for d in &samples {
            let r = l * d;
            for y in target.points.iter().map(real) {
                if (&fx - y).abs() > *d {
                    continue;
                }
                let gap = cand
                    .points
                    .iter()
                    .map(real)
                    .filter(|z| (*z - x).abs() <= r)
                    .map(|z| (f(z) - y).abs())
                    .min()
                    .unwrap();
                if gap > *eta {
                    out.push((x.clone(), d.clone(), y.clone(), gap));
                }
            }
        }
    }
    out
}

fn as_tuple(w: &BallWitness) -> (Rational, Rational, Rational, Rational) {
    (real(&w.x).clone(), w.delta.clone(), real(&w.y).clone(), w.gap.clone())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn witnesses_match_direct_enumeration(
        use_tent in any::<bool>(),
        tr in 2u32..5,
        extra in 0u32..3,
        l in prop::sample::select(vec!["1/4", "1/2", "3/4"]),
        picks in prop::collection::vec(1i32..6, 1..4),
        slack in any::<bool>(),
    ) {
        let (sys, f): (SystemDef, fn(&Rational) -> Rational) =
            if use_tent { (SystemDef::tent(), tent) } else { (SystemDef::logistic(), logistic) };
        let target = NetSpace::build(&sys.space, tr).unwrap();
        let cand = NetSpace::build(&sys.space, tr + extra).unwrap();
        let l = q(l);
        let samples: Vec<Rational> = picks.iter().map(|&e| Rational::pow2(-e)).collect();
        let delta0 = samples.iter().max().unwrap().clone();
        let eta = if slack { Rational::pow2(-12) } else { Rational::zero() };
        let mode = if slack { CoverMode::Slack { eta: eta.clone() } } else { CoverMode::Exact };
        let cert = ball_expanding_check(&sys, &target, &cand, &l, &delta0, &samples, &mode).unwrap();
        let fails = failing_triples(f, &target, &cand, &l, &samples, &eta);
        prop_assert_eq!(cert.pass, fails.is_empty());
        if let (Some(w), Some(first)) = (&cert.witness, &cert.first_witness) {
            prop_assert_eq!(as_tuple(first), fails[0].clone());
            let top = fails.iter().map(|t| &t.3).max().unwrap();
            prop_assert_eq!(&w.gap, top);
            prop_assert!(w.reverify(&sys, &cand, &l, &eta).unwrap());
            prop_assert!(first.reverify(&sys, &cand, &l, &eta).unwrap());
        }
    }
}

/// Metric expansion with local injectivity should never coexist with a
/// failed ball-expanding check.
#[test]
fn side_conditions_are_consistent_on_the_corpus() {
    let half = q("1/2");
    let cases = [
        (SystemDef::doubling(), 7, 9, q("1/4"), true),
        (SystemDef::tent(), 6, 8, q("1/4"), false),
        (SystemDef::logistic(), 5, 7, q("1/8"), false),
    ];
    for (sys, tr, cr, delta0, expect_side) in cases {
        let target = NetSpace::build(&sys.space, tr).unwrap();
        let cand = NetSpace::build(&sys.space, cr).unwrap();
        let metric = metric_expanding_check(&sys, &target, &half, &delta0).unwrap().pass;
        let inj = local_injectivity_check(&sys, &target, &delta0).unwrap().pass;
        let samples: Vec<Rational> = (2..=tr as i32).map(|e| Rational::pow2(-e)).filter(|d| *d <= delta0).collect();
        let ball = ball_expanding_check(&sys, &target, &cand, &half, &delta0, &samples, &CoverMode::Slack { eta: Rational::pow2(-12) })
            .unwrap()
            .pass;
        assert_eq!((metric, inj), (expect_side, expect_side), "{}", sys.name);
        assert!(!(metric && inj) || ball, "{} passes both side checks but not the ball check", sys.name);
        if sys.name == "tent" {
            assert!(ball);
        }
    }
}

#[test]
fn certificates_pass_to_iterates() {
    let tent = SystemDef::tent();
    let samples: Vec<Rational> = (2..=5).map(|e| Rational::pow2(-e)).collect();
    let t = NetSpace::build(&tent.space, 5).unwrap();
    let c1 = NetSpace::build(&tent.space, 6).unwrap();
    let c2 = NetSpace::build(&tent.space, 7).unwrap();
    assert!(ball_expanding_check(&tent, &t, &c1, &half(), &q("1/4"), &samples, &CoverMode::Exact).unwrap().pass);
    let tent2 = tent.iterate(2).unwrap();
    assert!(ball_expanding_check(&tent2, &t, &c2, &q("1/4"), &q("1/4"), &samples, &CoverMode::Exact).unwrap().pass);

    let shift = SystemDef::shift(6);
    let ws = |m| NetSpace::build(&SpaceSpec::binary_words(m), 1).unwrap();
    let samples: Vec<Rational> = (1..=6).map(|e| Rational::pow2(-e)).collect();
    assert!(ball_expanding_check(&shift, &ws(6), &ws(7), &half(), &half(), &samples, &CoverMode::Exact).unwrap().pass);
    let shift2 = shift.iterate(2).unwrap();
    assert!(ball_expanding_check(&shift2, &ws(6), &ws(8), &q("1/4"), &half(), &samples, &CoverMode::Exact).unwrap().pass);
}

fn half() -> Rational {
    q("1/2")
}
