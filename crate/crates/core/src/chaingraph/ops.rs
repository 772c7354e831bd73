use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use super::analysis::{ChainAnalysis, Condensation};
use super::graph::{check_net, TransitionGraph};
use crate::error::{Error, Result};
use crate::numerics::{dist, gcd, Point, Rational};
use crate::systems::{NetSpace, SystemDef};

#[derive(Debug, Clone, Serialize)]
pub struct StabilityVerdict {
    pub pass: bool,
    pub eps: Rational,
    /// On failure: the reachable node beyond ε, its distance to S and a path to it.
    pub witness: Option<StabilityWitness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityWitness {
    pub node: usize,
    pub distance: Rational,
    pub path: Vec<usize>,
}

/// Every node reachable from `S` stays within `eps` of `S`.
pub fn chain_stable_check(
    graph: &TransitionGraph,
    s: &[usize],
    eps: &Rational,
) -> Result<StabilityVerdict> {
    if s.is_empty() {
        return Err(Error::Precondition("S must be nonempty".into()));
    }
    let n = graph.len();
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for &x in s {
        if !seen[x] {
            seen[x] = true;
            queue.push_back(x);
        }
    }
    let s_points = graph.points_of(s);
    while let Some(x) = queue.pop_front() {
        let p = graph.net.point(x);
        let d = s_points.iter().map(|q| dist(p, q)).min().unwrap();
        if d > *eps {
            let mut path = vec![x];
            let mut cur = x;
            while parent[cur] != usize::MAX {
                cur = parent[cur];
                path.push(cur);
            }
            path.reverse();
            return Ok(StabilityVerdict {
                pass: false,
                eps: eps.clone(),
                witness: Some(StabilityWitness { node: x, distance: d, path }),
            });
        }
        for &y in &graph.succ[x] {
            if !seen[y] {
                seen[y] = true;
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    Ok(StabilityVerdict { pass: true, eps: eps.clone(), witness: None })
}

/// Nodes reachable from `S` by a path of length at least one.
pub fn reachable_set(graph: &TransitionGraph, s: &[usize]) -> Vec<usize> {
    let starts: Vec<usize> = s.iter().flat_map(|&x| graph.succ[x].iter().copied()).collect();
    reach_from(&graph.succ, &starts)
}

/// Nodes reachable from `starts` by paths of length at least zero.
pub(crate) fn reach_from(succ: &[Vec<usize>], starts: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; succ.len()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &x in starts {
        if !seen[x] {
            seen[x] = true;
            queue.push_back(x);
        }
    }
    while let Some(x) = queue.pop_front() {
        for &y in &succ[x] {
            if !seen[y] {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    (0..succ.len()).filter(|&i| seen[i]).collect()
}

/// `f̂` on a single node of an exact invariant net.
pub fn exact_step(system: &SystemDef, net: &NetSpace, x: usize) -> Result<usize> {
    let y = system.eval(net.point(x))?;
    net.index_of(&y)
        .ok_or_else(|| Error::Domain(format!("image {y} of {} leaves the net", net.point(x))))
}

/// The fixpoint of `A ← f̂(A)` for a forward-invariant node set `A`.
pub fn eventual_image(system: &SystemDef, net: &NetSpace, a: &[usize]) -> Result<Vec<usize>> {
    check_net(system, net)?;
    let mut set: Vec<usize> = a.to_vec();
    set.sort_unstable();
    set.dedup();
    let image = |set: &[usize]| -> Result<Vec<usize>> {
        let mut out = set
            .iter()
            .map(|&x| exact_step(system, net, x))
            .collect::<Result<Vec<_>>>()?;
        out.sort_unstable();
        out.dedup();
        Ok(out)
    };
    let first = image(&set)?;
    if let Some(&bad) = first.iter().find(|y| set.binary_search(y).is_err()) {
        return Err(Error::Contract(format!(
            "A is not forward invariant: {} escapes",
            net.point(bad)
        )));
    }
    let mut next = first;
    while next != set {
        set = next;
        next = image(&set)?;
    }
    Ok(set)
}

/// The cycle the exact orbit of `x` eventually enters.
pub fn omega_limit(system: &SystemDef, net: &NetSpace, x: &Point) -> Result<Vec<usize>> {
    check_net(system, net)?;
    let mut cur = net
        .index_of(x)
        .ok_or_else(|| Error::Domain(format!("{x} is not a net point")))?;
    let mut first_seen: HashMap<usize, usize> = HashMap::new();
    let mut orbit = Vec::new();
    loop {
        if let Some(&start) = first_seen.get(&cur) {
            let mut cycle = orbit[start..].to_vec();
            cycle.sort_unstable();
            return Ok(cycle);
        }
        first_seen.insert(cur, orbit.len());
        orbit.push(cur);
        cur = exact_step(system, net, cur)?;
    }
}

/// Nodes admitting arbitrarily long δ-paths from `x`: the forward closure of
/// every cycle reachable from `x`.
pub fn chain_omega_limit(graph: &TransitionGraph, x: usize) -> Vec<usize> {
    let cond = Condensation::of(&graph.succ);
    chain_omega_with(graph, &cond, x)
}

pub(crate) fn chain_omega_with(graph: &TransitionGraph, cond: &Condensation, x: usize) -> Vec<usize> {
    let reached = reach_from(&graph.succ, &[x]);
    let seeds: Vec<usize> = reached
        .into_iter()
        .filter(|&v| cond.cyclic[cond.class_of[v]])
        .collect();
    reach_from(&graph.succ, &seeds)
}

/// Least `i ≤ cap` with `f̂^i(x) ∈ CR_δ`, following the exact orbit.
pub fn cr_hitting_time(
    graph: &TransitionGraph,
    analysis: &ChainAnalysis,
    x: usize,
    cap: Option<usize>,
) -> Result<Option<usize>> {
    let cap = cap.unwrap_or(4 * graph.len());
    let mut cur = x;
    for i in 0..=cap {
        if analysis.is_recurrent(cur) {
            return Ok(Some(i));
        }
        if i < cap {
            cur = graph.step(cur)?;
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Serialize)]
pub struct MixingVerdict {
    pub pass: bool,
    pub strongly_connected: bool,
    /// gcd of cycle lengths, when strongly connected.
    pub period: Option<usize>,
}

/// Strongly connected with cycle-length gcd one.
pub fn chain_mixing_check(graph: &TransitionGraph) -> MixingVerdict {
    let n = graph.len();
    let forward = reach_from(&graph.succ, &[0]);
    let mut pred = vec![Vec::new(); n];
    for (x, ys) in graph.succ.iter().enumerate() {
        for &y in ys {
            pred[y].push(x);
        }
    }
    let backward = reach_from(&pred, &[0]);
    let connected = forward.len() == n && backward.len() == n && graph.edge_count() > 0;
    if !connected {
        return MixingVerdict { pass: false, strongly_connected: false, period: None };
    }
    // BFS levels; every edge u→v contributes level(u) + 1 − level(v) to the period
    let mut level = vec![usize::MAX; n];
    level[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for &y in &graph.succ[x] {
            if level[y] == usize::MAX {
                level[y] = level[x] + 1;
                queue.push_back(y);
            }
        }
    }
    let mut period = 0usize;
    for (x, ys) in graph.succ.iter().enumerate() {
        for &y in ys {
            let diff = (level[x] + 1).abs_diff(level[y]);
            period = gcd(period, diff);
        }
    }
    MixingVerdict { pass: period == 1, strongly_connected: true, period: Some(period) }
}

#[derive(Debug, Clone, Serialize)]
pub struct TerminalMargin {
    pub component: usize,
    /// Minimal exact distance from the component to every other net point.
    pub margin: Option<Rational>,
}

/// Separation of each terminal component from the rest of the net.
pub fn terminal_margins(graph: &TransitionGraph, analysis: &ChainAnalysis) -> Vec<TerminalMargin> {
    analysis
        .terminal
        .iter()
        .map(|&c| {
            let members = &analysis.components[c];
            let margin = (0..graph.len())
                .filter(|v| members.binary_search(v).is_err())
                .flat_map(|v| {
                    members
                        .iter()
                        .map(move |&u| dist(graph.net.point(u), graph.net.point(v)))
                })
                .min();
            TerminalMargin { component: c, margin }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct AbsorbingCheck {
    /// `A = reachable_set(S)`.
    pub a: Vec<usize>,
    pub forward_invariant: bool,
    /// Every node within δ/2 of `f̂(A)` lies in `A`.
    pub margin_holds: bool,
    pub offending: Option<usize>,
}

/// Net form of the absorbing-neighbourhood construction: `A` collects all
/// δ-chain endpoints from an invariant `S`; it must be forward invariant and
/// contain a δ/2 neighbourhood of its own image.
pub fn absorbing_check(graph: &TransitionGraph, s: &[usize]) -> Result<AbsorbingCheck> {
    let a = reachable_set(graph, s);
    let mut fa = a.iter().map(|&x| graph.step(x)).collect::<Result<Vec<_>>>()?;
    fa.sort_unstable();
    fa.dedup();
    let forward_invariant = fa.iter().all(|y| a.binary_search(y).is_ok());
    let half = &graph.delta * Rational::new(1, 2);
    let mut offending = None;
    'outer: for &y in &fa {
        for v in graph.net.ball(graph.net.point(y), &half) {
            if a.binary_search(&v).is_err() {
                offending = Some(v);
                break 'outer;
            }
        }
    }
    Ok(AbsorbingCheck { a, forward_invariant, margin_holds: offending.is_none(), offending })
}
