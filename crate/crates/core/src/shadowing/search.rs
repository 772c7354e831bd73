//! Best shadow of a finite pseudo orbit.
//!
//! For piecewise-affine maps on `[0, 1]` the search is exact over the whole
//! interval: the set of starting points whose first `n` iterates stay within
//! a bound of the pseudo orbit is a finite union of intervals on each of
//! which every iterate is affine, so the sup-distance is a convex
//! piecewise-linear function there and its minimum is found in closed form.
//! Other systems are scanned exhaustively over the net.

use serde::Serialize;

use super::orbit::PseudoOrbit;
use crate::error::Result;
use crate::numerics::{dist, Point, Rational};
use crate::systems::{Branch, NetSpace, SpaceKind, SystemDef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMethod {
    /// Exact minimisation over the whole interval.
    ExactAffine,
    /// Exhaustive scan of the net points.
    NetScan,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShadowResult {
    pub eps: Rational,
    /// Whether the best sup-distance is within `eps`.
    pub found: bool,
    /// The minimiser (leftmost / canonically smallest among ties).
    pub best_point: Option<Point>,
    pub best_dist: Option<Rational>,
    pub method: SearchMethod,
}

impl ShadowResult {
    pub fn shadow(&self) -> Option<&Point> {
        if self.found {
            self.best_point.as_ref()
        } else {
            None
        }
    }
}

/// Cap on interval pieces tracked by the exact search.
const MAX_PIECES: usize = 4096;
/// How many times the pruning bound is halved before giving up on the exact path.
const MAX_HALVINGS: u32 = 24;

/// `max_i d(f^i(x), x_i)` computed by direct evaluation.
pub fn sup_distance(system: &SystemDef, x: &Point, orbit: &[Point]) -> Result<Rational> {
    let mut cur = x.clone();
    let mut worst = Rational::zero();
    for (i, target) in orbit.iter().enumerate() {
        if i > 0 {
            cur = system.eval(&cur)?;
        }
        worst = worst.max(dist(&cur, target));
    }
    Ok(worst)
}

pub fn shadow_search(
    system: &SystemDef,
    net: &NetSpace,
    orbit: &PseudoOrbit,
    eps: &Rational,
) -> Result<ShadowResult> {
    if orbit.is_empty() {
        return Ok(ShadowResult {
            eps: eps.clone(),
            found: true,
            best_point: None,
            best_dist: Some(Rational::zero()),
            method: SearchMethod::NetScan,
        });
    }
    // the net optimum bounds the continuum optimum and keeps the piece count small
    let scan = net_scan(system, net, &orbit.points, eps)?;
    let bound = scan.best_dist.clone().unwrap().min(eps.clone());
    if let Some(res) = exact_affine_search(system, &orbit.points, eps, bound)? {
        return Ok(res);
    }
    Ok(scan)
}

/// Exhaustive scan; strict improvement keeps the canonically first minimiser.
pub fn net_scan(system: &SystemDef, net: &NetSpace, orbit: &[Point], eps: &Rational) -> Result<ShadowResult> {
    let mut best: Option<(Rational, usize)> = None;
    'points: for (idx, x) in net.points.iter().enumerate() {
        let mut cur = x.clone();
        let mut worst = Rational::zero();
        for (i, target) in orbit.iter().enumerate() {
            if i > 0 {
                cur = system.eval(&cur)?;
            }
            let d = dist(&cur, target);
            if d > worst {
                worst = d;
                if matches!(&best, Some((b, _)) if worst >= *b) {
                    continue 'points;
                }
            }
        }
        if best.as_ref().is_none_or(|(b, _)| worst < *b) {
            best = Some((worst, idx));
        }
    }
    let (d, idx) = best.expect("nonempty net");
    Ok(ShadowResult {
        eps: eps.clone(),
        found: d <= *eps,
        best_point: Some(net.point(idx).clone()),
        best_dist: Some(d),
        method: SearchMethod::NetScan,
    })
}

/// Lines `s·x + c` bounding the sup-distance on one piece.
#[derive(Clone)]
struct Piece {
    lo: Rational,
    hi: Rational,
    slope: Rational,
    intercept: Rational,
    /// Signed deviations `f^i(x) − x_i` as lines.
    lines: Vec<(Rational, Rational)>,
}

enum Pieces {
    Done(Vec<Piece>),
    TooMany,
}

fn exact_affine_search(
    system: &SystemDef,
    orbit: &[Point],
    eps: &Rational,
    mut bound: Rational,
) -> Result<Option<ShadowResult>> {
    if !matches!(system.space.kind, SpaceKind::Interval01) {
        return Ok(None);
    }
    let Some(coded) = system.affine_branches() else {
        return Ok(None);
    };
    let step: Vec<Branch> = coded.into_iter().map(|c| c.branch).collect();
    let targets: Option<Vec<&Rational>> = orbit.iter().map(|p| match p {
        Point::Real(x) => Some(x),
        _ => None,
    }).collect();
    let Some(targets) = targets else {
        return Ok(None);
    };

    // Any bound at or above the minimum yields the same minimiser, so if the
    // piece count explodes we tighten the bound and retry. An empty result
    // means the minimum is above the bound and the caller falls back to the net.
    for _ in 0..=MAX_HALVINGS {
        match pieces_within(&step, &targets, &bound) {
            Pieces::TooMany => bound = bound * Rational::new(1, 2),
            Pieces::Done(pieces) if pieces.is_empty() => return Ok(None),
            Pieces::Done(pieces) => {
                let mut best: Option<(Rational, Rational)> = None;
                for p in &pieces {
                    let (v, x) = minimize_envelope(&p.lines, &p.lo, &p.hi);
                    if best.as_ref().is_none_or(|(bv, bx)| (&v, &x) < (bv, bx)) {
                        best = Some((v, x));
                    }
                }
                let (v, x) = best.unwrap();
                let point = Point::Real(x);
                debug_assert_eq!(sup_distance(system, &point, orbit)?, v);
                return Ok(Some(ShadowResult {
                    eps: eps.clone(),
                    found: v <= *eps,
                    best_point: Some(point),
                    best_dist: Some(v),
                    method: SearchMethod::ExactAffine,
                }));
            }
        }
        if bound.is_zero() {
            break;
        }
    }
    Ok(None)
}

fn pieces_within(step: &[Branch], targets: &[&Rational], bound: &Rational) -> Pieces {
    let mut pieces = vec![Piece {
        lo: Rational::zero(),
        hi: Rational::one(),
        slope: Rational::one(),
        intercept: Rational::zero(),
        lines: Vec::with_capacity(targets.len()),
    }];
    for (i, &t) in targets.iter().enumerate() {
        let mut kept = Vec::with_capacity(pieces.len());
        for mut p in pieces {
            let here = Branch::new(p.lo.clone(), p.hi.clone(), p.slope.clone(), p.intercept.clone());
            if let Some((lo, hi)) = here.preimage(&(t - bound), &(t + bound)) {
                p.lo = lo;
                p.hi = hi;
                p.lines.push((p.slope.clone(), &p.intercept - t));
                kept.push(p);
            }
        }
        if i + 1 == targets.len() {
            return Pieces::Done(kept);
        }
        let mut next = Vec::new();
        for p in &kept {
            let here = Branch::new(p.lo.clone(), p.hi.clone(), p.slope.clone(), p.intercept.clone());
            for b in step {
                if let Some((lo, hi)) = here.preimage(&b.lo, &b.hi) {
                    next.push(Piece {
                        lo,
                        hi,
                        slope: &b.slope * &p.slope,
                        intercept: &b.slope * &p.intercept + &b.intercept,
                        lines: p.lines.clone(),
                    });
                }
            }
        }
        pieces = drop_covered_points(next);
        if pieces.len() > MAX_PIECES {
            return Pieces::TooMany;
        }
    }
    Pieces::Done(pieces)
}

/// Degenerate pieces at a shared branch endpoint repeat a point already
/// covered by a neighbouring piece (the map is continuous there).
fn drop_covered_points(mut pieces: Vec<Piece>) -> Vec<Piece> {
    pieces.sort_by(|a, b| (&a.lo, &a.hi).cmp(&(&b.lo, &b.hi)));
    let spans: Vec<(Rational, Rational)> = pieces
        .iter()
        .filter(|p| p.lo < p.hi)
        .map(|p| (p.lo.clone(), p.hi.clone()))
        .collect();
    let covered = |x: &Rational| {
        let k = spans.partition_point(|(lo, _)| lo <= x);
        spans[..k].iter().rev().take(2).any(|(lo, hi)| lo <= x && x <= hi)
    };
    let mut out: Vec<Piece> = Vec::with_capacity(pieces.len());
    for p in pieces {
        if p.lo == p.hi && (covered(&p.lo) || out.iter().any(|q| q.lo == p.lo && q.hi == p.hi)) {
            continue;
        }
        out.push(p);
    }
    out
}

/// Minimum of `max_k |s_k x + c_k|` over `[a, b]` and its leftmost minimiser.
fn minimize_envelope(lines: &[(Rational, Rational)], a: &Rational, b: &Rational) -> (Rational, Rational) {
    let all: Vec<(Rational, Rational)> = lines
        .iter()
        .flat_map(|(s, c)| [(s.clone(), c.clone()), (-s, -c)])
        .collect();
    let value_at = |x: &Rational| -> (Rational, Vec<usize>) {
        let vals: Vec<Rational> = all.iter().map(|(s, c)| s * x + c).collect();
        let v = vals.iter().max().unwrap().clone();
        let active = (0..all.len()).filter(|&k| vals[k] == v).collect();
        (v, active)
    };
    let max_slope = |act: &[usize]| act.iter().map(|&k| &all[k].0).max().unwrap().clone();
    let min_slope = |act: &[usize]| act.iter().map(|&k| &all[k].0).min().unwrap().clone();
    let argmax_slope = |act: &[usize]| *act.iter().max_by(|&&i, &&j| all[i].0.cmp(&all[j].0)).unwrap();
    let argmin_slope = |act: &[usize]| *act.iter().min_by(|&&i, &&j| all[i].0.cmp(&all[j].0)).unwrap();

    let (va, act_a) = value_at(a);
    let vstar = if a == b || !max_slope(&act_a).is_negative() {
        va
    } else {
        let (vb, act_b) = value_at(b);
        if !min_slope(&act_b).is_positive() {
            vb
        } else {
            let mut d = argmax_slope(&act_a);
            let mut i = argmin_slope(&act_b);
            loop {
                let (sd, cd) = &all[d];
                let (si, ci) = &all[i];
                let x = (ci - cd).checked_div(&(sd - si)).unwrap();
                let (v, act) = value_at(&x);
                if v == sd * &x + cd {
                    break v;
                }
                if max_slope(&act).is_negative() {
                    d = argmax_slope(&act);
                } else if min_slope(&act).is_positive() {
                    i = argmin_slope(&act);
                } else {
                    break v;
                }
            }
        }
    };
    // leftmost point where every decreasing line has come down to the minimum
    let mut left = a.clone();
    for (s, c) in &all {
        if s.is_negative() {
            let root = (&vstar - c).checked_div(s).unwrap();
            left = left.max(root);
        }
    }
    (vstar, left)
}
