//! The two side conditions that together imply ball expansion: metric
//! expansion at small scales and local injectivity.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{dist, Point, Rational};
use crate::systems::{NetSpace, SystemDef};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairWitness {
    pub x: Point,
    pub y: Point,
    pub distance: Rational,
    pub image_distance: Rational,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairVerdict {
    pub check: &'static str,
    pub radius: Rational,
    pub pass: bool,
    /// Earliest failing pair `x < y` in canonical order.
    pub witness: Option<PairWitness>,
    pub pairs_checked: u64,
}

/// Earliest pair `x < y` with `0 < d(x, y) ≤ radius` failing `bad`.
fn first_bad_pair(
    system: &SystemDef,
    net: &NetSpace,
    radius: &Rational,
    bad: impl Fn(&Rational, &Rational) -> bool + Sync,
) -> Result<(Option<PairWitness>, u64)> {
    if system.space != net.spec {
        return Err(Error::Shape("net does not belong to the system's space".into()));
    }
    let images: Vec<Point> = net.points.par_iter().map(|p| system.eval(p)).collect::<Result<_>>()?;
    let per_x: Vec<(u64, Option<PairWitness>)> = (0..net.len())
        .into_par_iter()
        .map(|i| {
            let mut count = 0;
            for j in net.ball(net.point(i), radius) {
                if j <= i {
                    continue;
                }
                count += 1;
                let d = dist(net.point(i), net.point(j));
                let fd = dist(&images[i], &images[j]);
                if bad(&d, &fd) {
                    return (
                        count,
                        Some(PairWitness {
                            x: net.point(i).clone(),
                            y: net.point(j).clone(),
                            distance: d,
                            image_distance: fd,
                        }),
                    );
                }
            }
            (count, None)
        })
        .collect();
    let checked = per_x.iter().map(|(c, _)| c).sum();
    Ok((per_x.into_iter().find_map(|(_, w)| w), checked))
}

/// `d(f(x), f(y)) ≥ d(x, y) / L` for all net pairs with `0 < d(x, y) ≤ δ₀`.
pub fn metric_expanding_check(
    system: &SystemDef,
    net: &NetSpace,
    l: &Rational,
    delta0: &Rational,
) -> Result<PairVerdict> {
    if !l.is_positive() || *l >= Rational::one() {
        return Err(Error::Precondition(format!("L={l} must lie in (0, 1)")));
    }
    let (witness, pairs_checked) = first_bad_pair(system, net, delta0, |d, fd| &(fd * l) < d)?;
    Ok(PairVerdict { check: "metric_expanding", radius: delta0.clone(), pass: witness.is_none(), witness, pairs_checked })
}

/// No two distinct net points within `ρ` share an image.
pub fn local_injectivity_check(system: &SystemDef, net: &NetSpace, rho: &Rational) -> Result<PairVerdict> {
    if !rho.is_positive() {
        return Err(Error::Precondition("ρ must be positive".into()));
    }
    let (witness, pairs_checked) = first_bad_pair(system, net, rho, |_, fd| fd.is_zero())?;
    Ok(PairVerdict { check: "local_injectivity", radius: rho.clone(), pass: witness.is_none(), witness, pairs_checked })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::q;

    #[test]
    fn doubling_expands_and_is_locally_injective() {
        let sys = SystemDef::doubling();
        let net = NetSpace::build(&sys.space, 8).unwrap();
        assert!(metric_expanding_check(&sys, &net, &q("1/2"), &q("1/4")).unwrap().pass);
        assert!(local_injectivity_check(&sys, &net, &q("1/4")).unwrap().pass);
    }

    #[test]
    fn tent_folds() {
        let sys = SystemDef::tent();
        let net = NetSpace::build(&sys.space, 4).unwrap();
        let expected = (Point::Real(q("7/16")), Point::Real(q("9/16")));
        let m = metric_expanding_check(&sys, &net, &q("1/2"), &q("1/8")).unwrap();
        let w = m.witness.unwrap();
        assert_eq!((w.x, w.y), expected.clone());
        assert!(w.image_distance.is_zero());
        let i = local_injectivity_check(&sys, &net, &q("1/8")).unwrap();
        let w = i.witness.unwrap();
        assert_eq!((w.x, w.y), expected);
    }

    #[test]
    fn radius_below_the_gap_is_vacuous() {
        let sys = SystemDef::tent();
        let net = NetSpace::build(&sys.space, 4).unwrap();
        let m = metric_expanding_check(&sys, &net, &q("1/2"), &q("1/32")).unwrap();
        assert!(m.pass && m.pairs_checked == 0);
        assert!(local_injectivity_check(&sys, &net, &q("1/32")).unwrap().pass);
    }
}
