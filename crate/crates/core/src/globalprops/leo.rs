//! Exact forward images of open sets: interval unions for one-dimensional
//! piecewise-affine maps, cylinder unions for the shift.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Rational;
use crate::systems::{space_pieces, Branch, CorpusTag, SpaceKind, SystemDef};

/// Upper bound on the number of pieces a region may split into.
const MAX_PIECES: usize = 1 << 16;

/// A finite union of closed intervals or of cylinder sets.
///
/// Cylinders live in the one-sided full shift: the prefix `w` stands for all
/// infinite words starting with `w`, and the empty prefix is the whole space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Intervals(Vec<(Rational, Rational)>),
    Cylinders(Vec<Vec<Rational>>),
}

enum Dynamics {
    Affine { branches: Vec<Branch>, circle: bool, pieces: Vec<(Rational, Rational)> },
    Shift { drop: usize, alphabet: Vec<Rational> },
}

fn dynamics(system: &SystemDef) -> Result<Dynamics> {
    if let SpaceKind::WordShift { alphabet, .. } = &system.space.kind {
        if system.corpus_tag() == Some(CorpusTag::Shift) {
            return Ok(Dynamics::Shift { drop: system.iterate_count() as usize, alphabet: alphabet.clone() });
        }
    }
    match (system.affine_branches(), space_pieces(&system.space)) {
        (Some(coded), Some(pieces)) => Ok(Dynamics::Affine {
            branches: coded.into_iter().map(|c| c.branch).collect(),
            circle: system.is_circle(),
            pieces,
        }),
        _ => Err(Error::Unsupported(format!(
            "exact images need a one-dimensional piecewise-affine map or the shift, not {}",
            system.name
        ))),
    }
}

fn merge(mut v: Vec<(Rational, Rational)>) -> Vec<(Rational, Rational)> {
    v.sort();
    let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(v.len());
    for (a, b) in v {
        match out.last_mut() {
            Some(last) if a <= last.1 => {
                if b > last.1 {
                    last.1 = b;
                }
            }
            _ => out.push((a, b)),
        }
    }
    out
}

fn clip(v: Vec<(Rational, Rational)>, pieces: &[(Rational, Rational)]) -> Vec<(Rational, Rational)> {
    let mut out = Vec::new();
    for (a, b) in &v {
        for (p, q) in pieces {
            let lo = a.clone().max(p.clone());
            let hi = b.clone().min(q.clone());
            if lo <= hi {
                out.push((lo, hi));
            }
        }
    }
    merge(out)
}

/// Splits `[a, b]` at integers and reduces mod 1 onto `[0, 1]`.
fn mod_one(a: &Rational, b: &Rational, out: &mut Vec<(Rational, Rational)>) {
    let one = Rational::one();
    if b - a >= one {
        out.push((Rational::zero(), one));
        return;
    }
    let k = a.floor();
    let a0 = a - &k;
    let b0 = b - &k;
    if b0 <= one {
        out.push((a0, b0));
    } else {
        out.push((a0, one.clone()));
        out.push((Rational::zero(), b0 - one));
    }
}

/// On the circle `0` and `1` are the same point.
fn close_circle(mut v: Vec<(Rational, Rational)>) -> Vec<(Rational, Rational)> {
    let (zero, one) = (Rational::zero(), Rational::one());
    if v.iter().any(|(_, b)| *b == one) {
        v.push((zero.clone(), zero.clone()));
    }
    if v.iter().any(|(a, _)| a.is_zero()) {
        v.push((one.clone(), one));
    }
    merge(v)
}

fn reduce_cylinders(mut v: Vec<Vec<Rational>>, alphabet: &[Rational]) -> Vec<Vec<Rational>> {
    v.sort();
    v.dedup();
    loop {
        // drop cylinders inside shorter ones
        let mut kept: Vec<Vec<Rational>> = Vec::with_capacity(v.len());
        for w in &v {
            if !kept.iter().any(|p| w.starts_with(p)) {
                kept.push(w.clone());
            }
        }
        // replace complete sibling families by their parent
        let mut changed = false;
        let mut out: Vec<Vec<Rational>> = Vec::new();
        let mut i = 0;
        while i < kept.len() {
            let w = &kept[i];
            if !w.is_empty() {
                let parent = &w[..w.len() - 1];
                let family: Vec<&Vec<Rational>> = kept[i..]
                    .iter()
                    .take_while(|u| u.len() == w.len() && u.starts_with(parent))
                    .collect();
                if family.len() == alphabet.len() {
                    out.push(parent.to_vec());
                    i += family.len();
                    changed = true;
                    continue;
                }
            }
            out.push(w.clone());
            i += 1;
        }
        out.sort();
        v = out;
        if !changed {
            return v;
        }
    }
}

fn normalize(system: &SystemDef, dyn_: &Dynamics, region: &Region) -> Result<Region> {
    match (dyn_, region) {
        (Dynamics::Affine { circle, pieces, .. }, Region::Intervals(v)) => {
            if v.iter().any(|(a, b)| a > b) {
                return Err(Error::Precondition("interval with lo > hi".into()));
            }
            let v = clip(v.clone(), pieces);
            Ok(Region::Intervals(if *circle { close_circle(v) } else { v }))
        }
        (Dynamics::Shift { alphabet, .. }, Region::Cylinders(v)) => {
            if v.iter().flatten().any(|s| !alphabet.contains(s)) {
                return Err(Error::Domain("cylinder symbol outside the alphabet".into()));
            }
            Ok(Region::Cylinders(reduce_cylinders(v.clone(), alphabet)))
        }
        _ => Err(Error::Shape(format!("region kind does not match {}", system.name))),
    }
}

impl Region {
    pub fn is_empty(&self) -> bool {
        match self {
            Region::Intervals(v) => v.is_empty(),
            Region::Cylinders(v) => v.is_empty(),
        }
    }

    fn piece_count(&self) -> usize {
        match self {
            Region::Intervals(v) => v.len(),
            Region::Cylinders(v) => v.len(),
        }
    }

    fn meets(&self, other: &Region) -> bool {
        match (self, other) {
            (Region::Intervals(a), Region::Intervals(b)) => {
                a.iter().any(|(p, q)| b.iter().any(|(r, s)| p <= s && r <= q))
            }
            (Region::Cylinders(a), Region::Cylinders(b)) => {
                a.iter().any(|u| b.iter().any(|w| u.starts_with(w) || w.starts_with(u)))
            }
            _ => false,
        }
    }
}

fn is_whole(dyn_: &Dynamics, region: &Region) -> bool {
    match (dyn_, region) {
        (Dynamics::Affine { pieces, .. }, Region::Intervals(v)) => pieces
            .iter()
            .all(|(p, q)| v.iter().any(|(a, b)| a <= p && q <= b)),
        (Dynamics::Shift { .. }, Region::Cylinders(v)) => v.iter().any(|w| w.is_empty()),
        _ => false,
    }
}

fn push(dyn_: &Dynamics, region: &Region) -> Result<Region> {
    let out = match (dyn_, region) {
        (Dynamics::Affine { branches, circle, pieces }, Region::Intervals(v)) => {
            let mut img = Vec::new();
            for (a, b) in v {
                for br in branches {
                    let lo = a.clone().max(br.lo.clone());
                    let hi = b.clone().min(br.hi.clone());
                    if lo > hi {
                        continue;
                    }
                    let (p, q) = (br.apply(&lo), br.apply(&hi));
                    let (p, q) = if p <= q { (p, q) } else { (q, p) };
                    if *circle {
                        mod_one(&p, &q, &mut img);
                    } else {
                        img.push((p, q));
                    }
                }
            }
            let img = clip(img, pieces);
            Region::Intervals(if *circle { close_circle(img) } else { img })
        }
        (Dynamics::Shift { drop, alphabet }, Region::Cylinders(v)) => {
            let img = v.iter().map(|w| w[(*drop).min(w.len())..].to_vec()).collect();
            Region::Cylinders(reduce_cylinders(img, alphabet))
        }
        _ => unreachable!("regions are normalised against the dynamics"),
    };
    if out.piece_count() > MAX_PIECES {
        return Err(Error::Resource { cap: "region pieces", needed: out.piece_count(), limit: MAX_PIECES });
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct LeoResult {
    pub system: String,
    pub region: Region,
    pub cap: usize,
    /// Least `i ≤ cap` with `f^i(U)` equal to the whole space.
    pub covering_index: Option<usize>,
}

/// Least `i ≤ cap` such that `f^i(U)` is the whole space.
pub fn leo_check(system: &SystemDef, u: &Region, cap: usize) -> Result<LeoResult> {
    let d = dynamics(system)?;
    let mut cur = normalize(system, &d, u)?;
    if cur.is_empty() {
        return Err(Error::Precondition("U must be nonempty".into()));
    }
    let mut covering_index = None;
    for i in 0..=cap {
        if is_whole(&d, &cur) {
            covering_index = Some(i);
            break;
        }
        if i < cap {
            cur = push(&d, &cur)?;
        }
    }
    Ok(LeoResult { system: system.name.clone(), region: u.clone(), cap, covering_index })
}

#[derive(Debug, Clone, Serialize)]
pub struct MixingResult {
    pub system: String,
    pub window: (usize, usize),
    pub pass: bool,
    /// Window indices `j` with `f^j(U) ∩ V = ∅`.
    pub misses: Vec<usize>,
    /// Covering index of `U` if it is reached inside the window.
    pub leo_index: Option<usize>,
}

/// `f^j(U) ∩ V ≠ ∅` for every `j` in `[window_start, window_end]`.
pub fn mixing_check(
    system: &SystemDef,
    u: &Region,
    v: &Region,
    window_start: usize,
    window_end: usize,
) -> Result<MixingResult> {
    if window_start > window_end {
        return Err(Error::Precondition("empty window".into()));
    }
    let d = dynamics(system)?;
    let mut cur = normalize(system, &d, u)?;
    let target = normalize(system, &d, v)?;
    if cur.is_empty() || target.is_empty() {
        return Err(Error::Precondition("U and V must be nonempty".into()));
    }
    let mut misses = Vec::new();
    let mut leo_index = None;
    for j in 0..=window_end {
        if leo_index.is_none() && is_whole(&d, &cur) {
            leo_index = Some(j);
        }
        if j >= window_start && !cur.meets(&target) {
            misses.push(j);
        }
        // once the whole space maps onto itself, every later image meets V
        if j >= window_start && is_whole(&d, &cur) && is_whole(&d, &push(&d, &cur)?) {
            break;
        }
        if j < window_end {
            cur = push(&d, &cur)?;
        }
    }
    Ok(MixingResult { system: system.name.clone(), window: (window_start, window_end), pass: misses.is_empty(), misses, leo_index })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::q;

    fn iv(a: &str, b: &str) -> Region {
        Region::Intervals(vec![(q(a), q(b))])
    }

    #[test]
    fn tent_covers_after_six_doublings() {
        let r = leo_check(&SystemDef::tent(), &iv("0", "1/64"), 20).unwrap();
        assert_eq!(r.covering_index, Some(6));
        let m = mixing_check(&SystemDef::tent(), &iv("0", "1/64"), &iv("1/2", "9/16"), 6, 20).unwrap();
        assert!(m.pass);
        assert_eq!(m.leo_index, Some(6));
    }

    #[test]
    fn doubling_arc() {
        let r = leo_check(&SystemDef::doubling(), &iv("3/8", "25/64"), 20).unwrap();
        assert_eq!(r.covering_index, Some(6));
        // an arc through 0 written as two pieces
        let wrap = Region::Intervals(vec![(q("0"), q("1/128")), (q("127/128"), q("1"))]);
        assert_eq!(leo_check(&SystemDef::doubling(), &wrap, 20).unwrap().covering_index, Some(6));
    }

    #[test]
    fn shift_cylinder() {
        let sys = SystemDef::shift(8);
        let c = Region::Cylinders(vec![vec![q("1"), q("0"), q("1"), q("1"), q("0")]]);
        assert_eq!(leo_check(&sys, &c, 20).unwrap().covering_index, Some(5));
        let sq = sys.iterate(2).unwrap();
        assert_eq!(leo_check(&sq, &c, 20).unwrap().covering_index, Some(3));
        let halves = Region::Cylinders(vec![vec![q("0")], vec![q("1")]]);
        assert_eq!(leo_check(&sys, &halves, 0).unwrap().covering_index, Some(0));
    }

    #[test]
    fn whole_space_mixes() {
        let m = mixing_check(&SystemDef::tent(), &iv("0", "1"), &iv("0", "1"), 3, 9).unwrap();
        assert!(m.pass);
    }

    #[test]
    fn ex22_mixing_is_one_way() {
        let sys = SystemDef::ex22(4);
        let near0 = iv("0", "1/64");
        let two = iv("2", "2");
        assert!(mixing_check(&sys, &near0, &two, 5, 15).unwrap().pass);
        let back = mixing_check(&sys, &two, &near0, 5, 15).unwrap();
        assert!(!back.pass);
        assert_eq!(back.misses.len(), 11);
        assert_eq!(leo_check(&sys, &near0, 30).unwrap().covering_index, None);
    }

    #[test]
    fn logistic_is_unsupported() {
        assert!(matches!(leo_check(&SystemDef::logistic(), &iv("0", "1/2"), 5), Err(Error::Unsupported(_))));
    }
}
