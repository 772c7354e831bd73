//! Chain structure of the coordinatewise product map via its factors.
//!
//! With the weighted sup metric, `y` is a δ-successor of `x` iff every
//! coordinate `y_j` is a `2^j δ`-successor of `x_j` in the factor graph, so
//! the product graph is the tensor product of the factor graphs. When every
//! recurrent factor node carries a self-loop, closed walks of different
//! lengths can be padded to a common length, hence the product's chain
//! components are exactly the products of factor components.

use serde::Serialize;

use super::analysis::ChainAnalysis;
use super::graph::TransitionGraph;
use crate::error::{Error, Result};
use crate::numerics::Rational;
use crate::systems::{NetSpace, SpaceKind, SystemDef};

#[derive(Debug, Clone, Serialize)]
pub struct FactorLevel {
    pub coordinate: usize,
    pub delta: Rational,
    pub component_count: usize,
    pub recurrent_count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct FactorizedAnalysis {
    pub m: usize,
    pub depth: u32,
    pub delta: Rational,
    pub factors: Vec<FactorLevel>,
    /// Product of factor component counts.
    pub component_count: u128,
    pub recurrent_count: u128,
}

pub fn factorized_product_analysis(system: &SystemDef, delta: &Rational) -> Result<FactorizedAnalysis> {
    let SpaceKind::Ex21Product { m, depth } = system.space.kind else {
        return Err(Error::Unsupported("factorized analysis needs the ex21 product".into()));
    };
    if system.iterate_count() != 1 {
        return Err(Error::Unsupported("factorized analysis of iterates".into()));
    }
    let factor = SystemDef::ex21(depth);
    let net = NetSpace::build(&factor.space, 1)?;
    let mut factors = Vec::with_capacity(m);
    let mut comps: u128 = 1;
    let mut rec: u128 = 1;
    for j in 1..=m {
        let dj = delta * Rational::pow2(j as i32);
        let g = TransitionGraph::build(&factor, &net, &dj)?;
        let a = ChainAnalysis::of(&g);
        if let Some(&v) = a.recurrent.iter().find(|&&v| !g.has_edge(v, v)) {
            return Err(Error::Unsupported(format!(
                "factor {j} at δ={dj}: recurrent node {} has no self-loop",
                net.point(v)
            )));
        }
        comps = comps.saturating_mul(a.components.len() as u128);
        rec = rec.saturating_mul(a.recurrent.len() as u128);
        factors.push(FactorLevel {
            coordinate: j,
            delta: dj,
            component_count: a.components.len(),
            recurrent_count: a.recurrent.len(),
        });
    }
    Ok(FactorizedAnalysis {
        m,
        depth,
        delta: delta.clone(),
        factors,
        component_count: comps,
        recurrent_count: rec,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agrees_with_direct_computation() {
        for (m, n) in [(2, 3), (3, 3), (3, 4)] {
            let sys = SystemDef::ex21_product(m, n);
            let net = NetSpace::build(&sys.space, 1).unwrap();
            for k in 2..=9 {
                let delta = Rational::pow2(-k);
                let direct = ChainAnalysis::of(&TransitionGraph::build(&sys, &net, &delta).unwrap());
                match factorized_product_analysis(&sys, &delta) {
                    Ok(f) => {
                        assert_eq!(f.component_count, direct.components.len() as u128, "m={m} N={n} k={k}");
                        assert_eq!(f.recurrent_count, direct.recurrent.len() as u128);
                    }
                    Err(Error::Unsupported(_)) => {}
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }
}
