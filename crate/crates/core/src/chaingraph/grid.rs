use serde::Serialize;

use super::analysis::ChainAnalysis;
use super::graph::TransitionGraph;
use crate::error::{Caps, Result};
use crate::numerics::{Point, Rational};
use crate::systems::{NetSpace, SystemDef};

/// The default decreasing grid `{2^-3, …, 2^-12}`.
pub fn default_delta_grid() -> Vec<Rational> {
    dyadic_grid(3, 12)
}

/// `{2^-from, …, 2^-to}` in decreasing order.
pub fn dyadic_grid(from: u32, to: u32) -> Vec<Rational> {
    (from..=to).map(|k| Rational::pow2(-(k as i32))).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct GridLevel {
    pub delta: Rational,
    pub recurrent: Vec<Point>,
    pub component_count: usize,
    pub terminal_count: usize,
}

/// CR_δ along a decreasing δ grid and the intersection over the grid.
#[derive(Debug, Clone, Serialize)]
pub struct GridReport {
    pub resolution: u32,
    pub levels: Vec<GridLevel>,
    pub intersection: Vec<Point>,
    pub label: String,
}

impl GridReport {
    /// CR is identical over the last `min(3, len)` grid values.
    pub fn tail_stable(&self) -> bool {
        self.tail_stable_over(3)
    }

    /// CR is identical over the last `min(k, len)` grid values.
    pub fn tail_stable_over(&self, k: usize) -> bool {
        let k = self.levels.len().min(k);
        let tail = &self.levels[self.levels.len() - k..];
        tail.windows(2).all(|w| w[0].recurrent == w[1].recurrent)
    }

    /// Component counts never decrease as δ shrinks.
    pub fn counts_nondecreasing(&self) -> bool {
        self.levels
            .windows(2)
            .all(|w| w[0].component_count <= w[1].component_count)
    }
}

pub fn cr_over_grid(
    system: &SystemDef,
    net: &NetSpace,
    grid: &[Rational],
    caps: &Caps,
) -> Result<GridReport> {
    let mut grid = grid.to_vec();
    grid.sort_by(|a, b| b.cmp(a));
    let mut levels = Vec::with_capacity(grid.len());
    let mut intersection: Option<Vec<Point>> = None;
    for delta in &grid {
        let g = TransitionGraph::build_capped(system, net, delta, caps)?;
        let a = ChainAnalysis::of(&g);
        let pts = g.points_of(&a.recurrent);
        intersection = Some(match intersection {
            None => pts.clone(),
            Some(prev) => prev.into_iter().filter(|p| pts.binary_search(p).is_ok()).collect(),
        });
        levels.push(GridLevel {
            delta: delta.clone(),
            recurrent: pts,
            component_count: a.components.len(),
            terminal_count: a.terminal.len(),
        });
    }
    Ok(GridReport {
        resolution: net.resolution,
        levels,
        intersection: intersection.unwrap_or_default(),
        label: format!("outer approximation at r={} over the δ grid", net.resolution),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::q;

    #[test]
    fn ex21_intersection_is_endpoints() {
        let sys = SystemDef::ex21(10);
        let net = NetSpace::build(&sys.space, 1).unwrap();
        let rep = cr_over_grid(&sys, &net, &dyadic_grid(4, 14), &Caps::default()).unwrap();
        assert_eq!(rep.intersection, [Point::Real(q("0")), Point::Real(q("1"))]);
        assert!(rep.tail_stable());
        // CR_δ shrinks as δ shrinks
        for w in rep.levels.windows(2) {
            assert!(w[1].recurrent.iter().all(|p| w[0].recurrent.contains(p)));
        }
    }
}
