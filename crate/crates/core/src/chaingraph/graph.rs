use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::error::{Caps, Error, Result};
use crate::numerics::{dist, Point, Rational};
use crate::systems::{NetSpace, SystemDef};

/// One-step δ-chains between net points: `x → y` iff `d(f(x), y) ≤ δ`.
#[derive(Debug, Clone)]
pub struct TransitionGraph<'a> {
    pub system: &'a SystemDef,
    pub net: &'a NetSpace,
    pub delta: Rational,
    /// Exact images `f(x)` of the net points, in node order.
    pub images: Vec<Point>,
    /// `f̂(x)` as a node index when the image is itself a net point.
    pub image_index: Vec<Option<usize>>,
    /// Sorted successor lists.
    pub succ: Vec<Vec<usize>>,
}

pub(crate) fn check_net(system: &SystemDef, net: &NetSpace) -> Result<()> {
    if system.space != net.spec {
        return Err(Error::Shape(format!(
            "net over {} does not match system space {}",
            net.spec.description, system.space.description
        )));
    }
    Ok(())
}

pub(crate) fn exact_images(system: &SystemDef, net: &NetSpace) -> Result<Vec<Point>> {
    net.points.par_iter().map(|p| system.eval(p)).collect()
}

impl<'a> TransitionGraph<'a> {
    pub fn build(system: &'a SystemDef, net: &'a NetSpace, delta: &Rational) -> Result<Self> {
        Self::build_capped(system, net, delta, &Caps::default())
    }

    /// Build the graph; `δ = 0` gives the functional graph on exact nets.
    pub fn build_capped(
        system: &'a SystemDef,
        net: &'a NetSpace,
        delta: &Rational,
        caps: &Caps,
    ) -> Result<Self> {
        check_net(system, net)?;
        if delta.is_negative() {
            return Err(Error::Precondition("δ must be ≥ 0".into()));
        }
        let images = exact_images(system, net)?;
        let image_index = images.par_iter().map(|y| net.index_of(y)).collect();
        let total = AtomicUsize::new(0);
        let limit = caps.edges;
        let succ: Vec<Vec<usize>> = images
            .par_iter()
            .map(|y| {
                if total.load(Ordering::Relaxed) > limit {
                    return Vec::new();
                }
                let s = net.ball(y, delta);
                total.fetch_add(s.len(), Ordering::Relaxed);
                s
            })
            .collect();
        let edges = total.into_inner();
        Caps::check("edges", edges, limit)?;
        Ok(TransitionGraph {
            system,
            net,
            delta: delta.clone(),
            images,
            image_index,
            succ,
        })
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn has_edge(&self, x: usize, y: usize) -> bool {
        self.succ[x].binary_search(&y).is_ok()
    }

    /// Whether `f̂` maps the net into itself.
    pub fn is_exact_invariant(&self) -> bool {
        self.image_index.iter().all(Option::is_some)
    }

    /// `f̂(x)`, or a domain error when the exact image leaves the net.
    pub fn step(&self, x: usize) -> Result<usize> {
        self.image_index[x].ok_or_else(|| {
            Error::Domain(format!(
                "image {} of {} is not a net point",
                self.images[x],
                self.net.point(x)
            ))
        })
    }

    pub fn nodes_of(&self, points: &[Point]) -> Result<Vec<usize>> {
        let mut out = points
            .iter()
            .map(|p| {
                self.net
                    .index_of(p)
                    .ok_or_else(|| Error::Domain(format!("{p} is not a net point")))
            })
            .collect::<Result<Vec<_>>>()?;
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    pub fn points_of(&self, nodes: &[usize]) -> Vec<Point> {
        nodes.iter().map(|&i| self.net.point(i).clone()).collect()
    }

    /// Exact edge test, independent of the range-query enumeration.
    pub fn edge_by_definition(&self, x: usize, y: usize) -> bool {
        dist(&self.images[x], self.net.point(y)) <= self.delta
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::q;
    use crate::systems::SpaceSpec;

    fn labels(g: &TransitionGraph, x: usize) -> Vec<String> {
        g.succ[x].iter().map(|&i| g.net.point(i).to_string()).collect()
    }

    #[test]
    fn ex21_small_graphs() {
        let sys = SystemDef::ex21(2);
        let net = NetSpace::build(&sys.space, 1).unwrap();
        let g = TransitionGraph::build(&sys, &net, &q("1/8")).unwrap();
        assert_eq!(g.edge_count(), 4);
        assert_eq!(labels(&g, 0), ["0/1"]);
        assert_eq!(labels(&g, 1), ["1/2"]);
        assert_eq!(labels(&g, 2), ["1/1"]);
        assert_eq!(labels(&g, 3), ["1/1"]);
        let g = TransitionGraph::build(&sys, &net, &q("1/4")).unwrap();
        assert_eq!(labels(&g, 0), ["0/1", "1/4"]);
        assert_eq!(labels(&g, 1), ["1/4", "1/2"]);
        assert_eq!(labels(&g, 2), ["1/1"]);
    }

    #[test]
    fn zero_delta_is_functional() {
        let sys = SystemDef::tent();
        let net = NetSpace::build(&sys.space, 5).unwrap();
        let g = TransitionGraph::build(&sys, &net, &Rational::zero()).unwrap();
        for x in 0..g.len() {
            assert_eq!(g.succ[x], vec![g.image_index[x].unwrap()]);
        }
    }

    #[test]
    fn edges_match_definition() {
        for (sys, r) in [(SystemDef::doubling(), 5), (SystemDef::logistic(), 4), (SystemDef::shift(4), 1)] {
            let net = NetSpace::build(&sys.space, r).unwrap();
            let g = TransitionGraph::build(&sys, &net, &q("3/32")).unwrap();
            for x in 0..g.len() {
                let slow: Vec<usize> = (0..g.len()).filter(|&y| g.edge_by_definition(x, y)).collect();
                assert_eq!(g.succ[x], slow, "{}", sys.name);
            }
        }
    }

    #[test]
    fn rejects_foreign_net_and_edge_cap() {
        let sys = SystemDef::tent();
        let net = NetSpace::build(&SpaceSpec::circle(), 3).unwrap();
        assert!(matches!(TransitionGraph::build(&sys, &net, &q("1/8")), Err(Error::Shape(_))));
        let net = NetSpace::build(&sys.space, 6).unwrap();
        let caps = Caps { edges: 10, ..Caps::default() };
        let err = TransitionGraph::build_capped(&sys, &net, &q("1/8"), &caps).unwrap_err();
        assert!(err.is_resource());
    }
}
