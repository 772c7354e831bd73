use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{dist, Point, Rational};
use crate::systems::{NetSpace, SystemDef};

/// 64-bit linear congruential generator with Knuth's MMIX constants.
///
/// Draws use the high 32 bits of the state, scaled to the range by
/// multiply-and-shift. The scheme is fixed so that a seed always yields the
/// same pseudo-orbit in this crate; it is not meant to match other tools.
#[derive(Debug, Clone)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    const MUL: u64 = 6364136223846793005;
    const INC: u64 = 1442695040888963407;

    pub fn new(seed: u64) -> Lcg {
        let mut g = Lcg { state: seed ^ 0x5DEE_CE66_D1CE_4E5B };
        g.next_u32();
        g
    }

    pub fn next_u32(&mut self) -> u32 {
        self.state = self.state.wrapping_mul(Self::MUL).wrapping_add(Self::INC);
        (self.state >> 32) as u32
    }

    /// Uniform index in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0 && n <= u32::MAX as usize);
        ((self.next_u32() as u64 * n as u64) >> 32) as usize
    }
}

/// A finite δ-pseudo orbit: `d(f(x_i), x_{i+1}) ≤ δ` for every `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PseudoOrbit {
    pub delta: Rational,
    pub points: Vec<Point>,
    pub seed: Option<u64>,
}

impl PseudoOrbit {
    /// Checks every gap exactly.
    pub fn new(system: &SystemDef, delta: Rational, points: Vec<Point>, seed: Option<u64>) -> Result<Self> {
        let orbit = PseudoOrbit { delta, points, seed };
        orbit.validate(system)?;
        Ok(orbit)
    }

    /// A pseudo orbit whose δ is its own largest gap.
    pub fn tight(system: &SystemDef, points: Vec<Point>) -> Result<Self> {
        let mut worst = Rational::zero();
        for w in points.windows(2) {
            worst = worst.max(dist(&system.eval(&w[0])?, &w[1]));
        }
        Ok(PseudoOrbit { delta: worst, points, seed: None })
    }

    pub fn validate(&self, system: &SystemDef) -> Result<()> {
        for (i, w) in self.points.windows(2).enumerate() {
            let gap = dist(&system.eval(&w[0])?, &w[1]);
            if gap > self.delta {
                return Err(Error::Contract(format!(
                    "gap {gap} at step {i} exceeds δ={}",
                    self.delta
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Seeded pseudo orbit of `length` points drawn uniformly from the net:
/// the start uniformly, each successor uniformly from the δ-ball around the
/// exact image.
pub fn gen_pseudo_orbit(
    system: &SystemDef,
    net: &NetSpace,
    delta: &Rational,
    length: usize,
    seed: u64,
) -> Result<PseudoOrbit> {
    if system.space != net.spec {
        return Err(Error::Shape("net does not belong to the system's space".into()));
    }
    if length == 0 {
        return Err(Error::Precondition("orbit length must be ≥ 1".into()));
    }
    let mut rng = Lcg::new(seed);
    let mut points = Vec::with_capacity(length);
    points.push(net.point(rng.below(net.len())).clone());
    while points.len() < length {
        let y = system.eval(points.last().unwrap())?;
        let ball = net.ball(&y, delta);
        if ball.is_empty() {
            return Err(Error::Precondition(format!(
                "no net point within δ={delta} of {y}; δ must be at least the net density"
            )));
        }
        points.push(net.point(ball[rng.below(ball.len())]).clone());
    }
    PseudoOrbit::new(system, delta.clone(), points, Some(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::q;

    #[test]
    fn lcg_is_reproducible_and_in_range() {
        let mut a = Lcg::new(7);
        let mut b = Lcg::new(7);
        for _ in 0..100 {
            let x = a.below(13);
            assert_eq!(x, b.below(13));
            assert!(x < 13);
        }
        assert_ne!(Lcg::new(1).next_u32(), Lcg::new(2).next_u32());
    }

    #[test]
    fn zero_delta_gives_true_orbit() {
        let sys = SystemDef::tent();
        let net = NetSpace::build(&sys.space, 6).unwrap();
        let o = gen_pseudo_orbit(&sys, &net, &Rational::zero(), 10, 3).unwrap();
        assert_eq!(o.points, sys.orbit(&o.points[0], 9).unwrap());
    }

    #[test]
    fn seeded_orbits_reproduce() {
        let sys = SystemDef::ex21(4);
        let net = NetSpace::build(&sys.space, 1).unwrap();
        let a = gen_pseudo_orbit(&sys, &net, &q("1/4"), 12, 99).unwrap();
        let b = gen_pseudo_orbit(&sys, &net, &q("1/4"), 12, 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tent_gaps_verified() {
        let sys = SystemDef::tent();
        let net = NetSpace::build(&sys.space, 6).unwrap();
        let o = gen_pseudo_orbit(&sys, &net, &q("1/64"), 40, 5).unwrap();
        assert_eq!(o.len(), 40);
        o.validate(&sys).unwrap();
        let pts = vec![o.points[0].clone(), Point::Real(q("1"))];
        let forged = PseudoOrbit { delta: q("1/64"), points: pts, seed: None };
        let gap = dist(&sys.eval(&o.points[0]).unwrap(), &Point::Real(q("1")));
        assert_eq!(forged.validate(&sys).is_err(), gap > q("1/64"));
    }

    #[test]
    fn empty_ball_is_a_precondition_error() {
        let sys = SystemDef::logistic();
        let net = NetSpace::build(&sys.space, 3).unwrap();
        // images such as g(1/8) = 7/16 fall between depth-3 dyadics
        let mut refused = 0;
        for seed in 0..32 {
            match gen_pseudo_orbit(&sys, &net, &Rational::zero(), 6, seed) {
                Ok(_) => {}
                Err(Error::Precondition(_)) => refused += 1,
                Err(e) => panic!("{e}"),
            }
        }
        assert!(refused > 0);
    }
}
