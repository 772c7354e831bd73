use ballexp::chaingraph::{cr_hitting_time, terminal_margins, ChainAnalysis, TransitionGraph};
use ballexp::globalprops::{entropy_estimate, leo_check, mixing_check, separated_count, EntropyBands, EntropyVerdict, Region};
use ballexp::{q, NetSpace, Point, Rational, SystemDef};
use proptest::prelude::*;

fn entropy_system(k: usize) -> (SystemDef, u32) {
    match k {
        0 => (SystemDef::tent(), 6),
        1 => (SystemDef::doubling(), 6),
        2 => (SystemDef::shift(6), 1),
        3 => (SystemDef::ex21(6), 1),
        _ => (SystemDef::ex22(3), 6),
    }
}

/// `[a, a + w]` with dyadic endpoints of depth 6 inside `[0, 1]`.
fn interval() -> impl Strategy<Value = (Rational, Rational)> {
    (0i64..64, 1i64..16).prop_map(|(a, w)| (Rational::new(a, 64), Rational::new((a + w).min(64), 64)))
}

fn cylinder() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(0i64..2, 1..6).prop_map(|w| w.into_iter().map(Rational::integer).collect())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn separated_counts_grow_with_n_and_shrink_with_eps(k in 0usize..5, n in 1usize..5, e in 2i32..6) {
        let (sys, r) = entropy_system(k);
        let net = NetSpace::build(&sys.space, r).unwrap();
        let eps = Rational::pow2(-e);
        let s = separated_count(&sys, &net, n, &eps).unwrap().count;
        prop_assert!(separated_count(&sys, &net, n + 1, &eps).unwrap().count >= s);
        prop_assert!(separated_count(&sys, &net, n, &(&eps * Rational::integer(2))).unwrap().count <= s);
    }

    #[test]
    fn leo_implies_mixing_on_intervals(circle in any::<bool>(), u in interval(), v in interval(), len in 0usize..8) {
        let sys = if circle { SystemDef::doubling() } else { SystemDef::tent() };
        let (u, v) = (Region::Intervals(vec![u]), Region::Intervals(vec![v]));
        let leo = leo_check(&sys, &u, 32).unwrap();
        let i = leo.covering_index.unwrap();
        prop_assert!(mixing_check(&sys, &u, &v, i, i + len).unwrap().pass);
    }

    #[test]
    fn leo_implies_mixing_on_cylinders(u in cylinder(), v in cylinder(), len in 0usize..8) {
        let sys = SystemDef::shift(8);
        let (u, v) = (Region::Cylinders(vec![u]), Region::Cylinders(vec![v]));
        let i = leo_check(&sys, &u, 32).unwrap().covering_index.unwrap();
        prop_assert!(mixing_check(&sys, &u, &v, i, i + len).unwrap().pass);
    }
}

/// Perfect spaces are read before the net saturates; isolated-point spaces
/// after the transient in which orbits drain towards the fixed points.
#[test]
fn entropy_separates_perfect_from_isolated_spaces() {
    let eps = Rational::pow2(-4);
    for k in 0..5 {
        let (sys, r) = entropy_system(k);
        let net = NetSpace::build(&sys.space, r).unwrap();
        let (lo, hi) = if sys.space.is_perfect() { (1, 3) } else { (8, 14) };
        let e = entropy_estimate(&sys, &net, &eps, lo, hi, EntropyBands::default()).unwrap();
        let expected = if sys.space.is_perfect() { EntropyVerdict::Positive } else { EntropyVerdict::ZeroConsistent };
        assert_eq!(e.verdict, expected, "{} {:?}", sys.name, e.counts);
    }
}

#[test]
fn ex22_terminal_class_is_clopen_with_margin_three_halves() {
    let sys = SystemDef::ex22(4);
    let net = NetSpace::build(&sys.space, 8).unwrap();
    let g = TransitionGraph::build(&sys, &net, &Rational::pow2(-6)).unwrap();
    let an = ChainAnalysis::of(&g);
    let margins = terminal_margins(&g, &an);
    assert_eq!(margins.len(), 1);
    assert_eq!(an.components[margins[0].component], [net.index_of(&Point::real(q("2"))).unwrap()]);
    assert_eq!(margins[0].margin, Some(q("3/2")));
}

/// The start `(1, 1/2, 1/4, …)` needs `m − 1` steps to reach the recurrent
/// set, which grows without bound in `m`.
#[test]
fn product_hitting_time_grows_with_m() {
    for m in 2..=4usize {
        let sys = SystemDef::ex21_product(m, 5);
        let net = NetSpace::build(&sys.space, 1).unwrap();
        let delta = Rational::pow2(-((m + 5 + 1) as i32));
        let g = TransitionGraph::build(&sys, &net, &delta).unwrap();
        let an = ChainAnalysis::of(&g);
        let x = Point::word((0..m).map(|j| Rational::pow2(-(j as i32))).collect());
        let t = cr_hitting_time(&g, &an, net.index_of(&x).unwrap(), None).unwrap();
        assert_eq!(t, Some(m - 1), "m={m}");
    }
}
