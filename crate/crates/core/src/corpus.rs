//! The acceptance suite: thirteen pinned checks over the built-in systems.
//!
//! Each criterion fixes its system, nets, constants and tolerance, runs the
//! library operations, and reports a verdict with a short explanation. A
//! criterion passes only if its verdict holds and it finishes within its
//! time budget.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::chaingraph::{
    chain_mixing_check, cr_hitting_time, cr_over_grid, dyadic_grid, factorized_product_analysis,
    periodic_points_affine, periodic_points_exact, terminal_margins, ChainAnalysis, TransitionGraph,
};
use crate::error::{Caps, Error, Result};
use crate::expanding::{ball_expanding_check, CoverMode};
use crate::globalprops::{entropy_estimate, entropy_trichotomy, leo_check, mixing_check, EntropyBands, Region};
use crate::numerics::{q, Point, Rational};
use crate::shadowing::{h_shadowing_test, lipschitz_shadowing_test, ShadowingParams};
use crate::systems::{NetSpace, SpaceSpec, SystemDef};

/// One criterion's verdict before timing is applied.
#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Outcome {
        Outcome { pass, detail: detail.into() }
    }
}

pub struct Criterion {
    pub id: &'static str,
    pub title: &'static str,
    pub budget: Duration,
    run: fn(&Caps) -> Result<Outcome>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: &'static str,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed_ms: u128,
    pub budget_ms: u128,
    /// Set when the run stopped on an error instead of a verdict.
    pub error: Option<String>,
    pub capped: bool,
}

impl Criterion {
    pub fn run(&self, caps: &Caps) -> CriterionResult {
        let start = Instant::now();
        let res = (self.run)(caps);
        let elapsed = start.elapsed();
        let over = elapsed > self.budget;
        let (pass, mut detail, error, capped) = match res {
            Ok(o) => (o.pass && !over, o.detail, None, false),
            Err(e) => (false, String::new(), Some(e.to_string()), e.is_resource()),
        };
        if over {
            detail.push_str(&format!(" [over budget: {:.1}s]", elapsed.as_secs_f64()));
        }
        CriterionResult {
            id: self.id,
            title: self.title,
            pass,
            detail,
            elapsed_ms: elapsed.as_millis(),
            budget_ms: self.budget.as_millis(),
            error,
            capped,
        }
    }
}

pub fn criteria() -> Vec<Criterion> {
    let c = |id, title, secs, run| Criterion { id, title, budget: Duration::from_secs(secs), run };
    vec![
        c("A1", "tent ball-expanding certificate", 10, a1),
        c("A2", "shift ball-expanding certificate", 20, a2),
        c("A3", "logistic refutation", 60, a3),
        c("A4", "ex21 chain structure", 60, a4),
        c("A5", "ex22 structure and trichotomy", 60, a5),
        c("A6", "tent entropy", 60, a6),
        c("A7", "locally eventually onto and mixing", 60, a7),
        c("A8", "Lipschitz shadowing", 120, a8),
        c("A9", "h-shadowing", 60, a9),
        c("A10", "periodic density", 60, a10),
        c("A11", "chain mixing", 60, a11),
        c("A12", "product contrast", 120, a12),
        c("A13", "iterate laws", 60, a13),
    ]
}

/// Runs the criteria whose ids are in `only` (all when `None`), in order.
pub fn run_criteria(only: Option<&[String]>, caps: &Caps) -> Result<Vec<CriterionResult>> {
    let all = criteria();
    if let Some(ids) = only {
        if let Some(bad) = ids.iter().find(|id| !all.iter().any(|c| c.id.eq_ignore_ascii_case(id))) {
            return Err(Error::Precondition(format!("unknown criterion {bad}")));
        }
    }
    Ok(all
        .iter()
        .filter(|c| only.is_none_or(|ids| ids.iter().any(|id| c.id.eq_ignore_ascii_case(id))))
        .map(|c| c.run(caps))
        .collect())
}

fn real(s: &str) -> Point {
    Point::Real(q(s))
}

fn show(points: &[Point]) -> String {
    let v: Vec<String> = points.iter().map(|p| p.to_string()).collect();
    format!("{{{}}}", v.join(", "))
}

fn a1(caps: &Caps) -> Result<Outcome> {
    let sys = SystemDef::tent();
    let t = NetSpace::build_capped(&sys.space, 6, caps)?;
    let c = NetSpace::build_capped(&sys.space, 8, caps)?;
    let cert = ball_expanding_check(&sys, &t, &c, &q("1/2"), &q("1/2"), &dyadic_grid(2, 6), &CoverMode::Exact)?;
    Ok(Outcome::new(cert.pass, format!("{} triples checked, witness {:?}", cert.checks, cert.witness.map(|w| (w.x, w.delta, w.y)))))
}

fn a2(caps: &Caps) -> Result<Outcome> {
    let sys = SystemDef::shift(8);
    let t = NetSpace::build_capped(&sys.space, 1, caps)?;
    let c = NetSpace::build_capped(&SpaceSpec::binary_words(9), 1, caps)?;
    let cert = ball_expanding_check(&sys, &t, &c, &q("1/2"), &q("1/2"), &dyadic_grid(1, 8), &CoverMode::Exact)?;
    Ok(Outcome::new(cert.pass, format!("{} triples checked, witness {:?}", cert.checks, cert.witness.map(|w| (w.x, w.delta, w.y)))))
}

fn a3(caps: &Caps) -> Result<Outcome> {
    let sys = SystemDef::logistic();
    let t = NetSpace::build_capped(&sys.space, 6, caps)?;
    let c = NetSpace::build_capped(&sys.space, 8, caps)?;
    let eta = Rational::pow2(-12);
    let mode = CoverMode::Slack { eta: eta.clone() };
    let mut notes = Vec::new();
    let mut pass = true;
    for l in ["1/4", "1/2", "3/4"] {
        let cert = ball_expanding_check(&sys, &t, &c, &q(l), &q("1/8"), &[q("1/8")], &mode)?;
        let Some(w) = cert.witness else {
            pass = false;
            notes.push(format!("L={l}: no witness"));
            continue;
        };
        let ok = w.x == real("1/2")
            && w.delta == q("1/8")
            && w.y == real("7/8")
            && w.gap >= q("1/16") - &eta
            && w.reverify(&sys, &c, &q(l), &eta)?;
        pass &= ok;
        notes.push(format!("L={l}: witness ({}, {}, {}) gap {}", w.x, w.delta, w.y, w.gap));
    }
    Ok(Outcome::new(pass, notes.join("; ")))
}

fn a4(caps: &Caps) -> Result<Outcome> {
    let sys = SystemDef::ex21(16);
    let net = NetSpace::build_capped(&sys.space, 1, caps)?;
    let grid = cr_over_grid(&sys, &net, &dyadic_grid(6, 18), caps)?;
    let per = periodic_points_exact(&sys, &net, net.len())?.points();
    let endpoints = vec![real("0"), real("1")];
    let g = TransitionGraph::build_capped(&sys, &net, &Rational::pow2(-10), caps)?;
    let a = ChainAnalysis::of(&g);
    let terminal = a.terminal_points(&g);
    let zero = a.component_of(net.index_of(&real("0")).unwrap());
    let one = a.component_of(net.index_of(&real("1")).unwrap());
    let precedes = matches!((zero, one), (Some(z), Some(o)) if z != o && a.precedes(z, o));
    let pass = grid.intersection == endpoints && per == endpoints && terminal == vec![vec![real("1")]] && precedes;
    Ok(Outcome::new(
        pass,
        format!(
            "∩CR = {}, Per = {}, terminal at 2^-10 = {:?}, 0-component precedes: {precedes}",
            show(&grid.intersection),
            show(&per),
            terminal
        ),
    ))
}

fn a5(caps: &Caps) -> Result<Outcome> {
    let sys = SystemDef::ex22(4);
    let net = NetSpace::build_capped(&sys.space, 8, caps)?;
    let grid = dyadic_grid(3, 8);
    let g = TransitionGraph::build_capped(&sys, &net, &Rational::pow2(-8), caps)?;
    let a = ChainAnalysis::of(&g);
    let terminal = a.terminal_points(&g);
    let margins = terminal_margins(&g, &a);
    let tri = entropy_trichotomy(&sys, &net, &grid, &Rational::pow2(-6), (4, 12), caps)?;
    let cr = vec![real("0"), real("2")];
    let pass = tri.stable_cr == cr
        && a.components.len() == 2
        && terminal == vec![vec![real("2")]]
        && margins.len() == 1
        && margins[0].margin == Some(q("3/2"))
        && tri.zero_entropy
        && tri.finite_cr
        && tri.bijective_on_cr
        && tri.consistent;
    Ok(Outcome::new(
        pass,
        format!(
            "stable CR = {}, {} components, terminal {:?} with margin {:?}, trichotomy ({}, {}, {}) consistent={}",
            show(&tri.stable_cr),
            a.components.len(),
            terminal,
            margins.first().and_then(|m| m.margin.clone()),
            tri.zero_entropy,
            tri.finite_cr,
            tri.bijective_on_cr,
            tri.consistent
        ),
    ))
}

fn a6(caps: &Caps) -> Result<Outcome> {
    let sys = SystemDef::tent();
    let net = NetSpace::build_capped(&sys.space, 8, caps)?;
    let e = entropy_estimate(&sys, &net, &Rational::pow2(-6), 4, 12, EntropyBands::default())?;
    let pass = (0.60..=0.75).contains(&e.slope);
    let counts: Vec<String> = e.counts.iter().map(|(n, c)| format!("{n}:{c}")).collect();
    Ok(Outcome::new(
        pass,
        format!("slope {:.4}, counts [{}], saturated={} (net size {})", e.slope, counts.join(" "), e.saturated, net.len()),
    ))
}

fn a7(_caps: &Caps) -> Result<Outcome> {
    let iv = |a: &str, b: &str| Region::Intervals(vec![(q(a), q(b))]);
    let cyl = |w: &[&str]| Region::Cylinders(vec![w.iter().map(|s| q(s)).collect()]);
    let cases = [
        ("tent", SystemDef::tent(), iv("0", "1/64"), iv("1/2", "9/16"), 6),
        ("doubling", SystemDef::doubling(), iv("0", "1/64"), iv("1/4", "5/16"), 6),
        ("shift", SystemDef::shift(8), cyl(&["1", "0", "1", "1", "0"]), cyl(&["0", "1", "1"]), 5),
    ];
    let mut pass = true;
    let mut notes = Vec::new();
    for (name, sys, u, v, expected) in cases {
        let leo = leo_check(&sys, &u, 64)?;
        let i = leo.covering_index;
        let mixes = match i {
            Some(i) => mixing_check(&sys, &u, &v, i, i + 10)?.pass,
            None => false,
        };
        pass &= i == Some(expected) && mixes;
        notes.push(format!("{name}: covers at {i:?}, mixing on [i, i+10]: {mixes}"));
    }
    Ok(Outcome::new(pass, notes.join("; ")))
}

fn a8(caps: &Caps) -> Result<Outcome> {
    let delta = Rational::pow2(-6);
    let slack = Rational::pow2(-7);
    let params = ShadowingParams::new(q("1/2"), q("1/2"))?;
    let mut pass = true;
    let mut notes = Vec::new();
    for i in [1u32, 2] {
        let sys = SystemDef::tent().iterate(i)?;
        let net = NetSpace::build_capped(&sys.space, 8, caps)?;
        let rep = lipschitz_shadowing_test(&sys, &net, &params, &delta, 100, 40, &slack)?;
        let worst = rep.worst.as_ref().and_then(|w| w.sup_dist.clone());
        pass &= rep.all_pass && rep.trials.len() == 100;
        notes.push(format!(
            "{}: M={} ε={} all shadowed={} worst sup {:?}",
            sys.name,
            params.m_i(i),
            rep.eps,
            rep.all_pass,
            worst
        ));
    }
    Ok(Outcome::new(pass, notes.join("; ")))
}

fn a9(caps: &Caps) -> Result<Outcome> {
    let sys = SystemDef::ex21(8);
    let net = NetSpace::build_capped(&sys.space, 1, caps)?;
    let rep = h_shadowing_test(&sys, &net, &q("1/4"), &Rational::pow2(-6), 4, caps)?;
    let failures = rep.trials.iter().filter(|t| !t.pass).count();
    Ok(Outcome::new(
        rep.all_pass,
        format!("{} chains, {failures} without an endpoint-exact 1/4-shadow", rep.trials.len()),
    ))
}

fn a10(caps: &Caps) -> Result<Outcome> {
    let tent = periodic_points_affine(&SystemDef::tent(), 6)?.points();
    let xs: Vec<Rational> = tent.iter().map(|p| p.scalar().unwrap().clone()).collect();
    let eighth = q("1/8");
    let dense = !xs.is_empty()
        && xs[0] <= eighth
        && Rational::one() - xs.last().unwrap() <= eighth
        && xs.windows(2).all(|w| &w[1] - &w[0] <= q("1/4"));

    let ex21 = SystemDef::ex21(16);
    let net21 = NetSpace::build_capped(&ex21.space, 1, caps)?;
    let per21 = periodic_points_exact(&ex21, &net21, net21.len())?.points();
    let cr21 = cr_over_grid(&ex21, &net21, &dyadic_grid(6, 18), caps)?.intersection;

    let ex22 = SystemDef::ex22(4);
    let net22 = NetSpace::build_capped(&ex22.space, 8, caps)?;
    let per22 = periodic_points_exact(&ex22, &net22, net22.len())?.points();
    let grid22 = cr_over_grid(&ex22, &net22, &dyadic_grid(3, 8), caps)?;
    let cr22 = grid22.levels.last().unwrap().recurrent.clone();

    let pass = dense && per21 == cr21 && per22 == cr22;
    Ok(Outcome::new(
        pass,
        format!(
            "tent: {} periodic points of period ≤ 6, 1/8-dense={dense}; ex21 Per={} CR={}; ex22 Per={} CR={}",
            xs.len(),
            show(&per21),
            show(&cr21),
            show(&per22),
            show(&cr22)
        ),
    ))
}

fn a11(caps: &Caps) -> Result<Outcome> {
    let tent = SystemDef::tent();
    let tnet = NetSpace::build_capped(&tent.space, 6, caps)?;
    let tv = chain_mixing_check(&TransitionGraph::build_capped(&tent, &tnet, &Rational::pow2(-4), caps)?);
    let ex21 = SystemDef::ex21(8);
    let enet = NetSpace::build_capped(&ex21.space, 1, caps)?;
    let ev = chain_mixing_check(&TransitionGraph::build_capped(&ex21, &enet, &Rational::pow2(-6), caps)?);
    Ok(Outcome::new(
        tv.pass && !ev.strongly_connected,
        format!(
            "tent primitive={} (period {:?}); ex21 strongly connected={}",
            tv.pass, tv.period, ev.strongly_connected
        ),
    ))
}

fn a12(caps: &Caps) -> Result<Outcome> {
    let n = 6u32;
    let mut pass = true;
    let mut times = Vec::new();
    for m in 3..=5usize {
        let sys = SystemDef::ex21_product(m, n);
        let net = NetSpace::build_capped(&sys.space, 1, caps)?;
        let delta = Rational::pow2(-((m as i32) + n as i32 + 1));
        let g = TransitionGraph::build_capped(&sys, &net, &delta, caps)?;
        let a = ChainAnalysis::of(&g);
        let x = Point::Word((1..=m).map(|j| Rational::pow2(1 - j as i32)).collect());
        let t = cr_hitting_time(&g, &a, net.index_of(&x).unwrap(), None)?;
        pass &= t == Some(m - 1);
        times.push(format!("m={m}: {t:?}"));
    }
    let prod = SystemDef::ex21_product(6, n);
    let mut counts = Vec::new();
    for delta in dyadic_grid(3, 9) {
        counts.push(factorized_product_analysis(&prod, &delta)?.component_count);
    }
    let nondecreasing = counts.windows(2).all(|w| w[0] <= w[1]);
    pass &= nondecreasing;
    Ok(Outcome::new(
        pass,
        format!("hitting times {}; m=6 component counts over 2^-3..2^-9: {counts:?}", times.join(", ")),
    ))
}

fn a13(caps: &Caps) -> Result<Outcome> {
    let mut pass = true;
    let mut notes = Vec::new();
    for (sys, r) in [(SystemDef::ex21(8), 1), (SystemDef::ex22(4), 8)] {
        let net = NetSpace::build_capped(&sys.space, r, caps)?;
        let base = ChainAnalysis::of(&TransitionGraph::build_capped(&sys, &net, &Rational::zero(), caps)?);
        let c1 = base.components.len();
        let mut counts = vec![c1];
        for i in 2..=3u32 {
            let it = sys.iterate(i)?;
            let a = ChainAnalysis::of(&TransitionGraph::build_capped(&it, &net, &Rational::zero(), caps)?);
            pass &= a.recurrent == base.recurrent;
            let ci = a.components.len();
            pass &= 1 <= ci && ci <= i as usize * c1;
            counts.push(ci);
        }
        notes.push(format!("{}: CR at δ=0 {} for f, f², f³; component counts {counts:?}", sys.name, show(&net_points(&net, &base.recurrent))));
    }
    Ok(Outcome::new(pass, notes.join("; ")))
}

fn net_points(net: &NetSpace, nodes: &[usize]) -> Vec<Point> {
    nodes.iter().map(|&v| net.point(v).clone()).collect()
}
