use std::collections::VecDeque;

use serde::Serialize;

use super::graph::TransitionGraph;
use super::scc::strongly_connected;
use crate::numerics::{Point, Rational};

/// Strongly connected classes of the whole graph and the DAG between them.
#[derive(Debug, Clone, Serialize)]
pub struct Condensation {
    pub classes: Vec<Vec<usize>>,
    pub class_of: Vec<usize>,
    /// Class carries a cycle (size > 1 or a self-loop).
    pub cyclic: Vec<bool>,
    /// Deduplicated edges between distinct classes, sorted.
    pub edges: Vec<(usize, usize)>,
}

impl Condensation {
    pub fn of(succ: &[Vec<usize>]) -> Condensation {
        let (classes, class_of) = strongly_connected(succ);
        let cyclic = classes
            .iter()
            .map(|c| c.len() > 1 || succ[c[0]].binary_search(&c[0]).is_ok())
            .collect();
        let mut edges: Vec<(usize, usize)> = succ
            .iter()
            .enumerate()
            .flat_map(|(x, ys)| {
                let cx = class_of[x];
                let class_of = &class_of;
                ys.iter().filter_map(move |&y| {
                    let cy = class_of[y];
                    (cy != cx).then_some((cx, cy))
                })
            })
            .collect();
        edges.sort_unstable();
        edges.dedup();
        Condensation { classes, class_of, cyclic, edges }
    }

    pub fn successors(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.classes.len()];
        for &(a, b) in &self.edges {
            out[a].push(b);
        }
        out
    }

    /// Classes in an order where every edge goes forward.
    pub fn topological_order(&self) -> Vec<usize> {
        let n = self.classes.len();
        let mut indeg = vec![0usize; n];
        for &(_, b) in &self.edges {
            indeg[b] += 1;
        }
        let succ = self.successors();
        let mut queue: VecDeque<usize> = (0..n).filter(|&c| indeg[c] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(c) = queue.pop_front() {
            order.push(c);
            for &d in &succ[c] {
                indeg[d] -= 1;
                if indeg[d] == 0 {
                    queue.push_back(d);
                }
            }
        }
        order
    }
}

/// Chain-recurrence structure of one δ-graph.
///
/// This is an outer approximation at the graph's `(δ, r)`: the true chain
/// recurrent set is contained in the limit of these sets as δ shrinks.
#[derive(Debug, Clone, Serialize)]
pub struct ChainAnalysis {
    pub delta: Rational,
    pub resolution: u32,
    /// CR_δ: nodes on a directed cycle, self-loops included.
    pub recurrent: Vec<usize>,
    /// Chain components: the cyclic classes, ordered by smallest node.
    pub components: Vec<Vec<usize>>,
    /// Condensation class of each component.
    pub component_class: Vec<usize>,
    /// Pairs `(i, j)`, `i ≠ j`, with a condensation path from component `i`
    /// to component `j`. Omitted when the relation would be too large to list.
    pub order: Option<Vec<(usize, usize)>>,
    /// Components without an outgoing condensation edge.
    pub terminal: Vec<usize>,
    pub condensation: Condensation,
}

const ORDER_BIT_BUDGET: usize = 1 << 28;

impl ChainAnalysis {
    pub fn of(graph: &TransitionGraph) -> ChainAnalysis {
        let condensation = Condensation::of(&graph.succ);
        let mut components = Vec::new();
        let mut component_class = Vec::new();
        for (k, c) in condensation.classes.iter().enumerate() {
            if condensation.cyclic[k] {
                components.push(c.clone());
                component_class.push(k);
            }
        }
        let mut recurrent: Vec<usize> = components.iter().flatten().copied().collect();
        recurrent.sort_unstable();
        let succ = condensation.successors();
        let terminal = component_class
            .iter()
            .enumerate()
            .filter(|(_, &k)| succ[k].is_empty())
            .map(|(i, _)| i)
            .collect();
        let order = (condensation.classes.len().saturating_mul(components.len())
            <= ORDER_BIT_BUDGET)
            .then(|| order_pairs(&condensation, &component_class));
        ChainAnalysis {
            delta: graph.delta.clone(),
            resolution: graph.net.resolution,
            recurrent,
            components,
            component_class,
            order,
            terminal,
            condensation,
        }
    }

    pub fn is_recurrent(&self, node: usize) -> bool {
        self.recurrent.binary_search(&node).is_ok()
    }

    pub fn component_of(&self, node: usize) -> Option<usize> {
        let k = self.condensation.class_of[node];
        self.component_class.binary_search(&k).ok()
    }

    /// Whether a condensation path runs from component `i` to component `j`.
    pub fn precedes(&self, i: usize, j: usize) -> bool {
        if i == j {
            return true;
        }
        if let Some(order) = &self.order {
            return order.binary_search(&(i, j)).is_ok();
        }
        let succ = self.condensation.successors();
        let target = self.component_class[j];
        let mut seen = vec![false; succ.len()];
        let mut queue = VecDeque::from([self.component_class[i]]);
        while let Some(c) = queue.pop_front() {
            for &d in &succ[c] {
                if d == target {
                    return true;
                }
                if !seen[d] {
                    seen[d] = true;
                    queue.push_back(d);
                }
            }
        }
        false
    }

    /// Terminal components, each as its sorted points.
    pub fn terminal_points(&self, graph: &TransitionGraph) -> Vec<Vec<Point>> {
        self.terminal
            .iter()
            .map(|&i| graph.points_of(&self.components[i]))
            .collect()
    }

    pub fn component_points(&self, graph: &TransitionGraph) -> Vec<Vec<Point>> {
        self.components.iter().map(|c| graph.points_of(c)).collect()
    }

    pub fn label(&self) -> String {
        format!(
            "outer approximation at (δ={}, r={})",
            self.delta, self.resolution
        )
    }
}

fn order_pairs(cond: &Condensation, component_class: &[usize]) -> Vec<(usize, usize)> {
    let ncomp = component_class.len();
    let words = ncomp.div_ceil(64);
    let mut comp_of_class = vec![usize::MAX; cond.classes.len()];
    for (i, &k) in component_class.iter().enumerate() {
        comp_of_class[k] = i;
    }
    let succ = cond.successors();
    let mut reach = vec![vec![0u64; words]; cond.classes.len()];
    for &c in cond.topological_order().iter().rev() {
        let mut bits = vec![0u64; words];
        for &d in &succ[c] {
            for (b, r) in bits.iter_mut().zip(&reach[d]) {
                *b |= r;
            }
            let i = comp_of_class[d];
            if i != usize::MAX {
                bits[i / 64] |= 1 << (i % 64);
            }
        }
        reach[c] = bits;
    }
    let mut pairs = Vec::new();
    for (i, &k) in component_class.iter().enumerate() {
        for j in 0..ncomp {
            if j != i && reach[k][j / 64] >> (j % 64) & 1 == 1 {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::q;
    use crate::systems::{NetSpace, SystemDef};

    #[test]
    fn ex21_small_examples() {
        let sys = SystemDef::ex21(2);
        let net = NetSpace::build(&sys.space, 1).unwrap();
        let g = TransitionGraph::build(&sys, &net, &q("1/8")).unwrap();
        let a = ChainAnalysis::of(&g);
        assert_eq!(g.points_of(&a.recurrent), [Point::Real(q("0")), Point::Real(q("1"))]);
        assert_eq!(a.components, vec![vec![0], vec![3]]);
        assert_eq!(a.order, Some(vec![]));
        assert_eq!(a.terminal, vec![0, 1]);

        let g = TransitionGraph::build(&sys, &net, &q("1/4")).unwrap();
        let a = ChainAnalysis::of(&g);
        assert_eq!(a.components, vec![vec![0], vec![1], vec![3]]);
        assert_eq!(a.terminal, vec![2]);
        assert!(a.precedes(0, 2));
        assert!(!a.precedes(2, 0));
    }

    #[test]
    fn order_agrees_with_search() {
        let sys = SystemDef::tent();
        let net = NetSpace::build(&sys.space, 5).unwrap();
        let g = TransitionGraph::build(&sys, &net, &q("1/128")).unwrap();
        let a = ChainAnalysis::of(&g);
        let listed = a.order.clone().unwrap();
        let mut b = a.clone();
        b.order = None;
        for i in 0..a.components.len() {
            for j in 0..a.components.len() {
                if i != j {
                    assert_eq!(listed.binary_search(&(i, j)).is_ok(), b.precedes(i, j));
                }
            }
        }
    }
}
