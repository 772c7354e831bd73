use std::collections::BTreeMap;

use serde::Serialize;

use super::graph::{check_net, exact_images};
use crate::error::{Error, Result};
use crate::numerics::{Point, Rational};
use crate::systems::{Branch, MapKind, NetSpace, SystemDef};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeriodicPoint {
    pub point: Point,
    /// Primitive period.
    pub period: usize,
    /// Base-branch index of each of the first `period` iterates.
    pub code: Vec<usize>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct PeriodicReport {
    pub max_period: usize,
    /// Functional-graph cycles on an exact net, each starting at its smallest point.
    pub exact_cycles: Vec<Vec<Point>>,
    /// Branch-enumerated periodic points, sorted by period then point.
    pub affine_points: Vec<PeriodicPoint>,
}

impl PeriodicReport {
    /// Every periodic point found, sorted and deduplicated.
    pub fn points(&self) -> Vec<Point> {
        let mut v: Vec<Point> = self
            .exact_cycles
            .iter()
            .flatten()
            .cloned()
            .chain(self.affine_points.iter().map(|p| p.point.clone()))
            .collect();
        v.sort();
        v.dedup();
        v
    }
}

/// Cycles of `f̂` on an exact invariant net with length at most `max_period`.
pub fn periodic_points_exact(
    system: &SystemDef,
    net: &NetSpace,
    max_period: usize,
) -> Result<PeriodicReport> {
    check_net(system, net)?;
    let images = exact_images(system, net)?;
    let next = images
        .iter()
        .zip(&net.points)
        .map(|(y, x)| {
            net.index_of(y)
                .ok_or_else(|| Error::Domain(format!("image {y} of {x} leaves the net")))
        })
        .collect::<Result<Vec<usize>>>()?;
    // colour: 0 unseen, 1 on the current walk, 2 finished
    let mut colour = vec![0u8; net.len()];
    let mut cycles = Vec::new();
    for start in 0..net.len() {
        let mut walk = Vec::new();
        let mut cur = start;
        while colour[cur] == 0 {
            colour[cur] = 1;
            walk.push(cur);
            cur = next[cur];
        }
        if colour[cur] == 1 {
            let pos = walk.iter().position(|&v| v == cur).unwrap();
            let cyc = &walk[pos..];
            if cyc.len() <= max_period {
                let min_at = (0..cyc.len()).min_by_key(|&i| cyc[i]).unwrap();
                let rotated: Vec<Point> = (0..cyc.len())
                    .map(|k| net.point(cyc[(min_at + k) % cyc.len()]).clone())
                    .collect();
                cycles.push(rotated);
            }
        }
        for v in walk {
            colour[v] = 2;
        }
    }
    cycles.sort();
    Ok(PeriodicReport { max_period, exact_cycles: cycles, affine_points: Vec::new() })
}

/// Periodic points of a piecewise-affine map by solving `f^p(x) = x` on every
/// branch of every iterate `p ≤ max_period`.
pub fn periodic_points_affine(system: &SystemDef, max_period: usize) -> Result<PeriodicReport> {
    let base = system.base_branches().ok_or_else(|| {
        Error::Unsupported(format!("{} is not piecewise affine", system.name))
    })?;
    let circle = system.is_circle();
    let mut found: BTreeMap<Point, PeriodicPoint> = BTreeMap::new();
    for p in 1..=max_period {
        let iterate = system.iterate(p as u32)?;
        for piece in iterate.affine_branches().unwrap() {
            let b = &piece.branch;
            let one = Rational::one();
            let denom = &b.slope - &one;
            let mut sols = Vec::new();
            if denom.is_zero() {
                let fixed_everywhere = if circle {
                    b.intercept.fract_unit().is_zero()
                } else {
                    b.intercept.is_zero()
                };
                if fixed_everywhere && b.lo < b.hi {
                    return Err(Error::Unsupported(format!(
                        "{} has an interval of period-{p} points on [{}, {}]",
                        system.name, b.lo, b.hi
                    )));
                }
                if fixed_everywhere {
                    sols.push(b.lo.clone());
                }
            } else {
                // (s − 1)x + c = k, with k = 0 off the circle
                let ks: &[i64] = if circle { &[-1, 0, 1] } else { &[0] };
                for &k in ks {
                    let x = (Rational::integer(k) - &b.intercept).checked_div(&denom).unwrap();
                    if b.contains(&x) {
                        sols.push(x);
                    }
                }
            }
            for x in sols {
                let pt = if circle {
                    if x >= one {
                        continue;
                    }
                    Point::Circle(x)
                } else {
                    Point::Real(x)
                };
                if found.contains_key(&pt) || !system.space.contains(&pt) {
                    continue;
                }
                let Some(period) = primitive_period(system, &pt, p)? else {
                    continue;
                };
                if period != p {
                    continue;
                }
                if code_admissible(system, &base, &pt, &piece.code)? {
                    found.insert(pt.clone(), PeriodicPoint { point: pt, period, code: piece.code.clone() });
                }
            }
        }
    }
    let mut affine_points: Vec<PeriodicPoint> = found.into_values().collect();
    affine_points.sort_by(|a, b| (a.period, &a.point).cmp(&(b.period, &b.point)));
    Ok(PeriodicReport { max_period, exact_cycles: Vec::new(), affine_points })
}

/// Least `j ≤ p` with `f^j(x) = x`, if any.
fn primitive_period(system: &SystemDef, x: &Point, p: usize) -> Result<Option<usize>> {
    let mut cur = x.clone();
    for j in 1..=p {
        cur = system.eval(&cur)?;
        if cur == *x {
            return Ok(Some(j));
        }
    }
    Ok(None)
}

/// Every iterate lies in the base branch its code names.
fn code_admissible(system: &SystemDef, base: &[Branch], x: &Point, code: &[usize]) -> Result<bool> {
    let one_step = SystemDef { map: innermost(&system.map).clone(), ..system.clone() };
    let mut cur = x.clone();
    for &c in code {
        if !base[c].contains(cur.scalar().expect("scalar point")) {
            return Ok(false);
        }
        cur = one_step.eval(&cur)?;
    }
    Ok(true)
}

fn innermost(map: &MapKind) -> &MapKind {
    match map {
        MapKind::Iterate { base, .. } => innermost(base),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::q;

    fn pts(r: &PeriodicReport, period: usize) -> Vec<String> {
        r.affine_points
            .iter()
            .filter(|p| p.period == period)
            .map(|p| p.point.to_string())
            .collect()
    }

    #[test]
    fn tent_branch_solutions() {
        let r = periodic_points_affine(&SystemDef::tent(), 2).unwrap();
        assert_eq!(pts(&r, 1), ["0/1", "2/3"]);
        assert_eq!(pts(&r, 2), ["2/5", "4/5"]);
        for p in &r.affine_points {
            assert_eq!(p.code.len(), p.period);
        }
    }

    #[test]
    fn doubling_branch_solutions() {
        let r = periodic_points_affine(&SystemDef::doubling(), 2).unwrap();
        assert_eq!(pts(&r, 1), ["0/1 (mod 1)"]);
        assert_eq!(pts(&r, 2), ["1/3 (mod 1)", "2/3 (mod 1)"]);
    }

    #[test]
    fn countable_examples() {
        let r = periodic_points_affine(&SystemDef::ex21(8), 6).unwrap();
        assert_eq!(pts(&r, 1), ["0/1", "1/1"]);
        assert_eq!(r.affine_points.len(), 2);
        let r = periodic_points_affine(&SystemDef::ex22(4), 6).unwrap();
        assert_eq!(pts(&r, 1), ["0/1", "2/1"]);
        assert_eq!(r.affine_points.len(), 2);
    }

    #[test]
    fn logistic_is_unsupported() {
        assert!(matches!(
            periodic_points_affine(&SystemDef::logistic(), 2),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn exact_cycles() {
        let sys = SystemDef::ex21(8);
        let net = NetSpace::build(&sys.space, 1).unwrap();
        let r = periodic_points_exact(&sys, &net, 5).unwrap();
        assert_eq!(r.exact_cycles, vec![vec![Point::Real(q("0"))], vec![Point::Real(q("1"))]]);
        let e = SystemDef::ex22(4);
        let net = NetSpace::build(&e.space, 8).unwrap();
        let r = periodic_points_exact(&e, &net, 5).unwrap();
        assert_eq!(r.points(), [Point::Real(q("0")), Point::Real(q("2"))]);
        let t = SystemDef::tent();
        let net = NetSpace::build(&t.space, 4).unwrap();
        let r = periodic_points_exact(&t, &net, 20).unwrap();
        assert_eq!(r.exact_cycles, vec![vec![Point::Real(q("0"))]]);
    }
}
