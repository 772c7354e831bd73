use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{dist, Point, Rational};
use crate::systems::{NetSpace, SpaceKind, SpaceSpec, SystemDef};

/// How closely a candidate image must hit a target point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CoverMode {
    /// `f(z) = y` exactly.
    Exact,
    /// `d(f(z), y) ≤ eta`, for maps whose images miss the net.
    Slack { eta: Rational },
}

impl CoverMode {
    pub fn eta(&self) -> Rational {
        match self {
            CoverMode::Exact => Rational::zero(),
            CoverMode::Slack { eta } => eta.clone(),
        }
    }
}

/// A point `y ∈ B_δ(f(x))` that no `f(z)` with `z ∈ B_{Lδ}(x)` reaches.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BallWitness {
    pub x: Point,
    pub delta: Rational,
    pub y: Point,
    /// `min d(f(z), y)` over candidate `z ∈ B_{Lδ}(x)`; exceeds η.
    pub gap: Rational,
    /// A candidate attaining the gap.
    pub nearest_z: Point,
}

impl BallWitness {
    /// Recomputes the witness from scratch against the candidate net.
    pub fn reverify(&self, system: &SystemDef, candidate: &NetSpace, l: &Rational, eta: &Rational) -> Result<bool> {
        let cand = on_space(system, &candidate.spec)?;
        if dist(&cand.eval(&self.x)?, &self.y) > self.delta {
            return Ok(false);
        }
        let mut best: Option<Rational> = None;
        for z in candidate.ball(&self.x, &(l * &self.delta)) {
            let d = dist(&cand.eval(candidate.point(z))?, &self.y);
            best = Some(best.map_or(d.clone(), |b| b.min(d)));
        }
        Ok(best.is_some_and(|g| g > *eta && g == self.gap))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BallExpandingCertificate {
    pub system: String,
    #[serde(rename = "L")]
    pub l: Rational,
    pub delta0: Rational,
    pub target_space: SpaceSpec,
    pub target_resolution: u32,
    pub candidate_space: SpaceSpec,
    pub candidate_resolution: u32,
    pub delta_samples: Vec<Rational>,
    #[serde(flatten)]
    pub mode: CoverMode,
    pub pass: bool,
    /// On failure, the witness with the largest gap (earliest on ties).
    pub witness: Option<BallWitness>,
    /// On failure, the earliest failing `(x, δ, y)` in canonical order.
    pub first_witness: Option<BallWitness>,
    /// Target points left out because their preimages were truncated.
    pub excluded: Vec<Point>,
    pub excluded_layer: String,
    /// Number of `(x, δ, y)` triples examined.
    pub checks: u64,
}

/// The system's map on another space of the same family.
fn on_space(system: &SystemDef, space: &SpaceSpec) -> Result<SystemDef> {
    if system.space == *space {
        return Ok(system.clone());
    }
    let sys = SystemDef { space: space.clone(), ..system.clone() };
    sys.validate()?;
    Ok(sys)
}

/// Whether `candidate` keeps every point of `target`.
fn refines(target: &NetSpace, candidate: &NetSpace) -> bool {
    let r_ok = candidate.resolution >= target.resolution;
    match (&target.spec.kind, &candidate.spec.kind) {
        (SpaceKind::Interval01, SpaceKind::Interval01) | (SpaceKind::Circle, SpaceKind::Circle) => r_ok,
        (SpaceKind::Ex21Set { depth: a }, SpaceKind::Ex21Set { depth: b }) => a <= b,
        (SpaceKind::Ex22Set { depth: a }, SpaceKind::Ex22Set { depth: b }) => a <= b && r_ok,
        (SpaceKind::WordShift { m: a, alphabet: s }, SpaceKind::WordShift { m: b, alphabet: t }) => {
            a <= b && s == t
        }
        (SpaceKind::Ex21Product { m: a, depth: p }, SpaceKind::Ex21Product { m: b, depth: q }) => {
            a == b && p <= q
        }
        _ => false,
    }
}

fn layer_description(candidate: &SpaceSpec, gain: u32) -> String {
    match &candidate.kind {
        SpaceKind::Ex21Set { depth } | SpaceKind::Ex21Product { depth, .. } => {
            format!("targets 2^-n with n + {gain} > {depth}")
        }
        SpaceKind::Ex22Set { depth } => format!("targets in I_n with n + {gain} > {depth}"),
        SpaceKind::WordShift { m, .. } => format!("words with support length + {gain} > {m}"),
        _ => "none".to_string(),
    }
}

/// Sorted images of a candidate ball, for nearest-image queries.
struct ImageSet {
    sorted: Vec<(Point, usize)>,
    kind_scalar: bool,
    circle: bool,
}

impl ImageSet {
    fn new(mut items: Vec<(Point, usize)>) -> ImageSet {
        items.sort();
        let kind_scalar = items.first().is_some_and(|(p, _)| p.scalar().is_some());
        let circle = items.first().is_some_and(|(p, _)| matches!(p, Point::Circle(_)));
        ImageSet { sorted: items, kind_scalar, circle }
    }

    /// `(gap, z)` for a nearest image.
    fn nearest(&self, y: &Point) -> (Rational, usize) {
        let pos = self.sorted.partition_point(|(p, _)| p < y);
        if pos < self.sorted.len() && self.sorted[pos].0 == *y {
            // equal images may come from several z; the run starts at pos
            let z = self.sorted[pos..]
                .iter()
                .take_while(|(p, _)| p == y)
                .map(|&(_, z)| z)
                .min()
                .unwrap();
            return (Rational::zero(), z);
        }
        let cands: Box<dyn Iterator<Item = usize>> = if self.kind_scalar {
            let n = self.sorted.len();
            let mut v = vec![pos.saturating_sub(1), pos.min(n - 1)];
            if self.circle {
                v.extend([0, n - 1]);
            }
            Box::new(v.into_iter())
        } else {
            Box::new(0..self.sorted.len())
        };
        let mut best: Option<(Rational, usize)> = None;
        let mut consider = |d: Rational, z: usize| {
            let better = match &best {
                None => true,
                Some((bd, bz)) => d < *bd || (d == *bd && z < *bz),
            };
            if better {
                best = Some((d, z));
            }
        };
        for i in cands {
            let (p, z) = &self.sorted[i];
            consider(dist(p, y), *z);
        }
        best.unwrap()
    }
}

fn witness_order_gap(a: &BallWitness, b: &BallWitness) -> Ordering {
    // larger gap first, then canonical (x, δ, y)
    b.gap
        .cmp(&a.gap)
        .then_with(|| (&a.x, &a.delta, &a.y).cmp(&(&b.x, &b.delta, &b.y)))
}

/// Tests `B_δ(f(x)) ⊆ f(B_{Lδ}(x))` on nets.
///
/// `x` and `z` range over the candidate net, `y` over the target net; the
/// candidate net must refine the target net since exact preimages live one
/// level deeper. Targets whose preimages fall outside the candidate space
/// are excluded and listed.
pub fn ball_expanding_check(
    system: &SystemDef,
    target: &NetSpace,
    candidate: &NetSpace,
    l: &Rational,
    delta0: &Rational,
    delta_samples: &[Rational],
    mode: &CoverMode,
) -> Result<BallExpandingCertificate> {
    if target.spec.family() != system.space.family() || candidate.spec.family() != system.space.family() {
        return Err(Error::Shape("nets do not belong to the system's space family".into()));
    }
    if !refines(target, candidate) {
        return Err(Error::Shape("candidate net must refine the target net".into()));
    }
    if !l.is_positive() || *l >= Rational::one() {
        return Err(Error::Precondition(format!("L={l} must lie in (0, 1)")));
    }
    if let Some(d) = delta_samples.iter().find(|d| *d > delta0 || !d.is_positive()) {
        return Err(Error::Precondition(format!("δ sample {d} outside (0, δ₀]")));
    }
    let eta = mode.eta();
    if eta.is_negative() {
        return Err(Error::Precondition("η must be ≥ 0".into()));
    }
    let cand_sys = on_space(system, &candidate.spec)?;
    let gain = system.iterate_count();
    let mut samples = delta_samples.to_vec();
    samples.sort();
    samples.dedup();

    let width = candidate.spec.word_len().unwrap_or(0).max(target.spec.word_len().unwrap_or(0));
    let images: Vec<Point> = candidate
        .points
        .par_iter()
        .map(|p| cand_sys.eval(p))
        .collect::<Result<Vec<Point>>>()?
        .into_iter()
        .map(|p| p.padded(width))
        .collect();
    // exact hits are decided on integer ranks of the distinct images
    let mut keys = images.clone();
    keys.sort();
    keys.dedup();
    let image_rank: Vec<usize> = images.iter().map(|p| keys.binary_search(p).unwrap()).collect();
    let target_rank: Vec<Option<usize>> =
        target.points.iter().map(|y| keys.binary_search(&y.padded(width)).ok()).collect();
    let excluded_mask: Vec<bool> = target
        .points
        .iter()
        .map(|y| target.spec.in_truncation_layer(&candidate.spec, y, gain))
        .collect();

    let per_x: Vec<(u64, Vec<BallWitness>)> = (0..candidate.len())
        .into_par_iter()
        .map(|xi| {
            let x = candidate.point(xi);
            let fx = &images[xi];
            let mut checks = 0u64;
            let mut fails = Vec::new();
            let mut present = vec![false; keys.len()];
            for delta in &samples {
                let zs = candidate.ball(x, &(l * delta));
                for &z in &zs {
                    present[image_rank[z]] = true;
                }
                let mut set: Option<ImageSet> = None;
                for yi in target.ball(fx, delta) {
                    if excluded_mask[yi] {
                        continue;
                    }
                    checks += 1;
                    if target_rank[yi].is_some_and(|r| present[r]) {
                        continue;
                    }
                    let set = set.get_or_insert_with(|| {
                        ImageSet::new(zs.iter().map(|&z| (images[z].clone(), z)).collect())
                    });
                    let y = target.point(yi).padded(width);
                    let (gap, z) = set.nearest(&y);
                    if gap > eta {
                        fails.push(BallWitness {
                            x: x.clone(),
                            delta: delta.clone(),
                            y: target.point(yi).clone(),
                            gap,
                            nearest_z: candidate.point(z).clone(),
                        });
                    }
                }
                for &z in &zs {
                    present[image_rank[z]] = false;
                }
            }
            (checks, fails)
        })
        .collect();

    let checks = per_x.iter().map(|(c, _)| c).sum();
    let mut first_witness: Option<BallWitness> = None;
    let mut witness: Option<BallWitness> = None;
    for (_, fails) in &per_x {
        for w in fails {
            let earlier = |cur: &BallWitness| (&w.x, &w.delta, &w.y) < (&cur.x, &cur.delta, &cur.y);
            if first_witness.as_ref().is_none_or(earlier) {
                first_witness = Some(w.clone());
            }
            if witness.as_ref().is_none_or(|cur| witness_order_gap(w, cur) == Ordering::Less) {
                witness = Some(w.clone());
            }
        }
    }
    Ok(BallExpandingCertificate {
        system: system.name.clone(),
        l: l.clone(),
        delta0: delta0.clone(),
        target_space: target.spec.clone(),
        target_resolution: target.resolution,
        candidate_space: candidate.spec.clone(),
        candidate_resolution: candidate.resolution,
        delta_samples: samples,
        mode: mode.clone(),
        pass: witness.is_none(),
        witness,
        first_witness,
        excluded: target
            .points
            .iter()
            .zip(&excluded_mask)
            .filter(|(_, &e)| e)
            .map(|(p, _)| p.clone())
            .collect(),
        excluded_layer: layer_description(&candidate.spec, gain),
        checks,
    })
}

/// `δ₀` together with every `2^-k` in `[floor, δ₀)`.
pub fn default_delta_samples(delta0: &Rational, floor: &Rational) -> Vec<Rational> {
    let mut out = vec![delta0.clone()];
    let mut d = Rational::one();
    while d >= *floor {
        if d < *delta0 {
            out.push(d.clone());
        }
        d = d * Rational::new(1, 2);
    }
    out.sort();
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchRow {
    #[serde(rename = "L")]
    pub l: Rational,
    pub delta0: Rational,
    pub pass: bool,
    pub witness: Option<BallWitness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateSearch {
    pub best: Option<BallExpandingCertificate>,
    pub table: Vec<SearchRow>,
}

/// Scans `(L, δ₀)` preferring smaller `L`, then larger `δ₀`, and stops at the
/// first pass. Each pair is sampled at `δ₀` and the dyadics below it down to
/// half the target net's smallest gap.
pub fn certificate_search(
    system: &SystemDef,
    target: &NetSpace,
    candidate: &NetSpace,
    l_grid: &[Rational],
    delta0_grid: &[Rational],
    mode: &CoverMode,
) -> Result<CertificateSearch> {
    if l_grid.is_empty() || delta0_grid.is_empty() {
        return Err(Error::Precondition("L and δ₀ grids must be nonempty".into()));
    }
    let mut ls = l_grid.to_vec();
    ls.sort();
    ls.dedup();
    let mut ds = delta0_grid.to_vec();
    ds.sort_by(|a, b| b.cmp(a));
    ds.dedup();
    let floor = target.min_gap().unwrap_or_else(Rational::one) * Rational::new(1, 2);
    let mut table = Vec::new();
    for l in &ls {
        for d0 in &ds {
            let samples = default_delta_samples(d0, &floor);
            let cert = ball_expanding_check(system, target, candidate, l, d0, &samples, mode)?;
            table.push(SearchRow {
                l: l.clone(),
                delta0: d0.clone(),
                pass: cert.pass,
                witness: cert.witness.clone(),
            });
            if cert.pass {
                return Ok(CertificateSearch { best: Some(cert), table });
            }
        }
    }
    Ok(CertificateSearch { best: None, table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::q;

    fn dyadics(from: i32, to: i32) -> Vec<Rational> {
        (from..=to).map(|k| Rational::pow2(-k)).collect()
    }

    #[test]
    fn tent_passes_exactly() {
        let sys = SystemDef::tent();
        let t = NetSpace::build(&sys.space, 6).unwrap();
        let c = NetSpace::build(&sys.space, 8).unwrap();
        let cert = ball_expanding_check(&sys, &t, &c, &q("1/2"), &q("1/2"), &dyadics(2, 6), &CoverMode::Exact).unwrap();
        assert!(cert.pass, "{:?}", cert.witness);
        assert!(cert.excluded.is_empty());
        assert!(cert.checks > 0);
    }

    #[test]
    fn tent_fails_with_too_coarse_candidates() {
        let sys = SystemDef::tent();
        let t = NetSpace::build(&sys.space, 6).unwrap();
        let cert = ball_expanding_check(&sys, &t, &t, &q("1/2"), &q("1/2"), &dyadics(2, 6), &CoverMode::Exact).unwrap();
        assert!(!cert.pass);
        let w = cert.witness.unwrap();
        assert!(w.reverify(&sys, &t, &q("1/2"), &Rational::zero()).unwrap());
    }

    #[test]
    fn logistic_refuted_at_the_critical_point() {
        let sys = SystemDef::logistic();
        let t = NetSpace::build(&sys.space, 6).unwrap();
        let c = NetSpace::build(&sys.space, 8).unwrap();
        let mode = CoverMode::Slack { eta: Rational::pow2(-12) };
        let cert = ball_expanding_check(&sys, &t, &c, &q("1/2"), &q("1/8"), &[q("1/8")], &mode).unwrap();
        assert!(!cert.pass);
        let w = cert.witness.unwrap();
        assert_eq!((w.x.clone(), w.y.clone()), (Point::Real(q("1/2")), Point::Real(q("7/8"))));
        assert!(w.gap >= q("1/16") - Rational::pow2(-12));
        assert!(w.reverify(&sys, &c, &q("1/2"), &Rational::pow2(-12)).unwrap());
        let first = cert.first_witness.unwrap();
        assert!(first.x < w.x);
    }

    #[test]
    fn ex21_truncation_layer_is_excluded() {
        let sys = SystemDef::ex21(8);
        let t = NetSpace::build(&sys.space, 1).unwrap();
        let c = NetSpace::build(&SpaceSpec::ex21_set(8), 1).unwrap();
        let cert = ball_expanding_check(&sys, &t, &c, &q("1/2"), &q("1/4"), &dyadics(2, 9), &CoverMode::Exact).unwrap();
        assert_eq!(cert.excluded, vec![Point::Real(Rational::pow2(-8))]);
        assert!(cert.pass, "{:?}", cert.witness);
    }

    #[test]
    fn ex21_search_stops_just_below_half() {
        let sys = SystemDef::ex21(8);
        let t = NetSpace::build(&sys.space, 1).unwrap();
        let c = NetSpace::build(&SpaceSpec::ex21_set(9), 1).unwrap();
        let d0 = [q("1/2"), q("1/2") - Rational::pow2(-10)];
        let s = certificate_search(&sys, &t, &c, &[q("3/4"), q("1/2")], &d0, &CoverMode::Exact).unwrap();
        let best = s.best.unwrap();
        assert_eq!((best.l, best.delta0), (q("1/2"), q("1/2") - Rational::pow2(-10)));
        assert!(!s.table[0].pass);
        let w = s.table[0].witness.as_ref().unwrap();
        assert_eq!((&w.x, &w.y), (&Point::Real(q("1")), &Point::Real(q("1/2"))));
    }

    #[test]
    fn refinement_is_required() {
        let sys = SystemDef::tent();
        let t = NetSpace::build(&sys.space, 6).unwrap();
        let c = NetSpace::build(&sys.space, 4).unwrap();
        let e = ball_expanding_check(&sys, &t, &c, &q("1/2"), &q("1/2"), &[q("1/4")], &CoverMode::Exact);
        assert!(matches!(e, Err(Error::Shape(_))));
        let other = NetSpace::build(&SpaceSpec::circle(), 8).unwrap();
        let e = ball_expanding_check(&sys, &t, &other, &q("1/2"), &q("1/2"), &[q("1/4")], &CoverMode::Exact);
        assert!(matches!(e, Err(Error::Shape(_))));
    }

    #[test]
    fn shift_passes_with_one_longer_candidates() {
        let sys = SystemDef::shift(8);
        let t = NetSpace::build(&sys.space, 1).unwrap();
        let c = NetSpace::build(&SpaceSpec::binary_words(9), 1).unwrap();
        let cert = ball_expanding_check(&sys, &t, &c, &q("1/2"), &q("1/2"), &dyadics(1, 8), &CoverMode::Exact).unwrap();
        assert!(cert.pass, "{:?}", cert.witness);
    }

    #[test]
    fn ex22_search_finds_quarter() {
        let sys = SystemDef::ex22(4);
        let t = NetSpace::build(&sys.space, 6).unwrap();
        let c = NetSpace::build(&SpaceSpec::ex22_set(5), 8).unwrap();
        let d0 = [q("3/2"), q("3/2") - Rational::pow2(-10)];
        let s = certificate_search(&sys, &t, &c, &[q("1/2"), q("1/4")], &d0, &CoverMode::Exact).unwrap();
        let best = s.best.unwrap();
        assert_eq!(best.l, q("1/4"));
        assert!(best.delta0 < q("3/2"));
    }

    #[test]
    fn iterate_certificate() {
        let sys = SystemDef::tent().iterate(2).unwrap();
        let t = NetSpace::build(&sys.space, 6).unwrap();
        let c = NetSpace::build(&sys.space, 8).unwrap();
        let cert = ball_expanding_check(&sys, &t, &c, &q("1/4"), &q("1/2"), &dyadics(2, 6), &CoverMode::Exact).unwrap();
        assert!(cert.pass, "{:?}", cert.witness);
    }

    #[test]
    fn samples_include_delta0() {
        let s = default_delta_samples(&q("3/8"), &q("1/16"));
        assert_eq!(s, vec![q("1/16"), q("1/8"), q("1/4"), q("3/8")]);
    }
}
