use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::chaingraph::{cr_over_grid, TransitionGraph};
use crate::error::{Caps, Error, Result};
use crate::numerics::{dist, Point, Rational};
use crate::systems::{NetSpace, SystemDef};

/// A greedy `(n, ε)`-separated subset of the net.
#[derive(Debug, Clone, Serialize)]
pub struct SeparatedSet {
    pub n: usize,
    pub eps: Rational,
    pub count: usize,
    pub points: Vec<Point>,
}

/// Bowen distance `max_{i<n} d(f^i x, f^i y)` from precomputed orbits.
fn bowen(a: &[Point], b: &[Point]) -> Rational {
    a.iter().zip(b).map(|(p, q)| dist(p, q)).max().unwrap_or_else(Rational::zero)
}

fn orbits(system: &SystemDef, net: &NetSpace, n: usize) -> Result<Vec<Vec<Point>>> {
    net.points.par_iter().map(|p| system.orbit(p, n - 1)).collect()
}

fn greedy(orbits: &[Vec<Point>], n: usize, eps: &Rational) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for (i, o) in orbits.iter().enumerate() {
        if chosen.iter().all(|&j| bowen(&orbits[j][..n], &o[..n]) > *eps) {
            chosen.push(i);
        }
    }
    chosen
}

fn verify_separated(orbits: &[Vec<Point>], set: &[usize], n: usize, eps: &Rational) -> bool {
    set.par_iter().enumerate().all(|(k, &i)| {
        set[k + 1..].iter().all(|&j| bowen(&orbits[i][..n], &orbits[j][..n]) > *eps)
    })
}

/// Greedy maximal `(n, ε)`-separated subset, scanning the net in canonical
/// order; separation is re-verified pairwise before returning.
pub fn separated_count(system: &SystemDef, net: &NetSpace, n: usize, eps: &Rational) -> Result<SeparatedSet> {
    if n == 0 {
        return Err(Error::Precondition("n must be ≥ 1".into()));
    }
    let orbits = orbits(system, net, n)?;
    let set = greedy(&orbits, n, eps);
    if !verify_separated(&orbits, &set, n, eps) {
        return Err(Error::Contract("greedy set is not separated".into()));
    }
    Ok(SeparatedSet {
        n,
        eps: eps.clone(),
        count: set.len(),
        points: set.iter().map(|&i| net.point(i).clone()).collect(),
    })
}

/// Slope thresholds for the entropy verdict, in nats per step.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EntropyBands {
    pub positive: f64,
    pub zero: f64,
}

impl Default for EntropyBands {
    fn default() -> Self {
        EntropyBands { positive: 0.1, zero: 0.05 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntropyVerdict {
    Positive,
    ZeroConsistent,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntropyEstimate {
    pub system: String,
    pub resolution: u32,
    pub eps: Rational,
    pub n_min: usize,
    pub n_max: usize,
    /// `(n, s(n, ε))` for every `n` in range.
    pub counts: Vec<(usize, usize)>,
    /// Least-squares slope of `ln s(n, ε)` against `n`.
    pub slope: f64,
    pub bands: EntropyBands,
    pub verdict: EntropyVerdict,
    /// The top count is within 1/16 of the net size: the net, not the map,
    /// limits further growth and the slope underestimates.
    pub saturated: bool,
}

impl EntropyEstimate {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,count\n");
        for (n, c) in &self.counts {
            writeln!(out, "{n},{c}").unwrap();
        }
        out
    }
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

pub fn entropy_estimate(
    system: &SystemDef,
    net: &NetSpace,
    eps: &Rational,
    n_min: usize,
    n_max: usize,
    bands: EntropyBands,
) -> Result<EntropyEstimate> {
    if n_min == 0 || n_min >= n_max {
        return Err(Error::Precondition("need 1 ≤ n_min < n_max".into()));
    }
    let orbits = orbits(system, net, n_max)?;
    let mut counts = Vec::with_capacity(n_max - n_min + 1);
    for n in n_min..=n_max {
        let set = greedy(&orbits, n, eps);
        if !verify_separated(&orbits, &set, n, eps) {
            return Err(Error::Contract(format!("greedy set for n={n} is not separated")));
        }
        counts.push((n, set.len()));
    }
    let pts: Vec<(f64, f64)> = counts.iter().map(|&(n, c)| (n as f64, (c as f64).ln())).collect();
    let slope = least_squares_slope(&pts);
    let verdict = if slope >= bands.positive {
        EntropyVerdict::Positive
    } else if slope <= bands.zero {
        EntropyVerdict::ZeroConsistent
    } else {
        EntropyVerdict::Inconclusive
    };
    let top = counts.last().unwrap().1;
    Ok(EntropyEstimate {
        system: system.name.clone(),
        resolution: net.resolution,
        eps: eps.clone(),
        n_min,
        n_max,
        counts,
        slope,
        bands,
        verdict,
        saturated: top * 16 >= net.len() * 15,
    })
}

/// The three conditions of the zero-entropy trichotomy, evaluated on a net.
#[derive(Debug, Clone, Serialize)]
pub struct Trichotomy {
    pub entropy: EntropyEstimate,
    /// Clause 1: entropy verdict is zero-consistent.
    pub zero_entropy: bool,
    /// Clause 2: CR is the same at the two smallest δ and its points are
    /// pairwise more than the smallest δ apart.
    pub finite_cr: bool,
    /// Clause 3: the map permutes the stable CR.
    pub bijective_on_cr: bool,
    pub stable_cr: Vec<Point>,
    pub consistent: bool,
}

pub fn entropy_trichotomy(
    system: &SystemDef,
    net: &NetSpace,
    delta_grid: &[Rational],
    eps: &Rational,
    n_range: (usize, usize),
    caps: &Caps,
) -> Result<Trichotomy> {
    if delta_grid.is_empty() {
        return Err(Error::Precondition("δ grid must be nonempty".into()));
    }
    let delta_min = delta_grid.iter().min().unwrap();
    let exact = TransitionGraph::build_capped(system, net, &Rational::zero(), caps)?;
    if !exact.is_exact_invariant() {
        return Err(Error::Precondition("the bijectivity clause needs an exact invariant net".into()));
    }
    let entropy = entropy_estimate(system, net, eps, n_range.0, n_range.1, EntropyBands::default())?;
    let grid = cr_over_grid(system, net, delta_grid, caps)?;
    let stable_cr = grid.levels.last().unwrap().recurrent.clone();
    let discrete = stable_cr
        .iter()
        .enumerate()
        .all(|(i, p)| stable_cr[i + 1..].iter().all(|q| dist(p, q) > *delta_min));
    let finite_cr = grid.tail_stable_over(2) && discrete;
    let idx: Vec<usize> = stable_cr.iter().map(|p| net.index_of(p).unwrap()).collect();
    let mut images: Vec<usize> = idx.iter().map(|&i| exact.image_index[i].unwrap()).collect();
    images.sort_unstable();
    let mut sorted_idx = idx.clone();
    sorted_idx.sort_unstable();
    let bijective_on_cr = images == sorted_idx;
    let zero_entropy = entropy.verdict == EntropyVerdict::ZeroConsistent;
    Ok(Trichotomy {
        consistent: zero_entropy == finite_cr && finite_cr == bijective_on_cr,
        entropy,
        zero_entropy,
        finite_cr,
        bijective_on_cr,
        stable_cr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaingraph::dyadic_grid;
    use crate::numerics::q;
    use crate::systems::{Branch, SpaceSpec};

    fn identity() -> SystemDef {
        let b = Branch::new(q("0"), q("1"), q("1"), q("0"));
        SystemDef::piecewise_affine("id", SpaceSpec::interval01(), vec![b]).unwrap()
    }

    #[test]
    fn one_step_counts() {
        let sys = SystemDef::tent();
        let net = NetSpace::build(&sys.space, 8).unwrap();
        assert_eq!(separated_count(&sys, &net, 1, &q("1")).unwrap().count, 1);
        // greedy ε-net on k/256 with gaps > 1/64 picks every fifth point
        let s = separated_count(&sys, &net, 1, &Rational::pow2(-6)).unwrap();
        assert_eq!(s.count, 256 / 5 + 1);
        let s2 = separated_count(&sys, &net, 2, &Rational::pow2(-6)).unwrap();
        assert!(s2.count >= s.count);
    }

    #[test]
    fn tent_grows_before_saturating() {
        let sys = SystemDef::tent();
        let net = NetSpace::build(&sys.space, 8).unwrap();
        let e = entropy_estimate(&sys, &net, &Rational::pow2(-6), 1, 4, EntropyBands::default()).unwrap();
        assert_eq!(e.verdict, EntropyVerdict::Positive);
        assert!(e.counts.windows(2).all(|w| w[0].1 <= w[1].1));
        assert!(e.to_csv().starts_with("n,count\n1,"));
    }

    #[test]
    fn identity_has_flat_counts() {
        let sys = identity();
        let net = NetSpace::build(&sys.space, 6).unwrap();
        let e = entropy_estimate(&sys, &net, &Rational::pow2(-4), 1, 6, EntropyBands::default()).unwrap();
        assert!(e.counts.iter().all(|c| c.1 == e.counts[0].1));
        assert_eq!(e.slope, 0.0);
        assert_eq!(e.verdict, EntropyVerdict::ZeroConsistent);
    }

    #[test]
    fn ex22_trichotomy_holds() {
        let sys = SystemDef::ex22(4);
        let net = NetSpace::build(&sys.space, 8).unwrap();
        let t = entropy_trichotomy(&sys, &net, &dyadic_grid(3, 8), &Rational::pow2(-6), (4, 12), &Caps::default()).unwrap();
        assert!(t.zero_entropy && t.finite_cr && t.bijective_on_cr && t.consistent, "{t:?}");
        assert_eq!(t.stable_cr, [Point::Real(q("0")), Point::Real(q("2"))]);
    }

    #[test]
    fn tent_trichotomy_fails_throughout() {
        let sys = SystemDef::tent();
        let net = NetSpace::build(&sys.space, 6).unwrap();
        let t = entropy_trichotomy(&sys, &net, &dyadic_grid(3, 6), &Rational::pow2(-4), (1, 4), &Caps::default()).unwrap();
        assert!(!t.zero_entropy && !t.finite_cr && !t.bijective_on_cr && t.consistent);
    }

    #[test]
    fn ex21_trichotomy_holds() {
        let sys = SystemDef::ex21(10);
        let net = NetSpace::build(&sys.space, 1).unwrap();
        let t = entropy_trichotomy(&sys, &net, &dyadic_grid(3, 14), &Rational::pow2(-6), (4, 12), &Caps::default()).unwrap();
        assert!(t.zero_entropy && t.finite_cr && t.bijective_on_cr && t.consistent, "{t:?}");
        assert_eq!(t.stable_cr, [Point::Real(q("0")), Point::Real(q("1"))]);
    }
}
