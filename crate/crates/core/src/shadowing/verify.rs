use rayon::prelude::*;
use serde::Serialize;

use super::orbit::{gen_pseudo_orbit, PseudoOrbit};
use super::search::{shadow_search, SearchMethod};
use crate::chaingraph::TransitionGraph;
use crate::error::{Caps, Error, Result};
use crate::numerics::{dist, Point, Rational};
use crate::systems::{NetSpace, SystemDef};

/// Shadowing constants.
///
/// `l` is the contraction constant of the base map (the `L` of the
/// ball-expanding condition); the derived `M_i = L^i / (1 − L^i)` is the
/// Lipschitz shadowing constant of the `i`-th iterate, `M = M_1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShadowingParams {
    pub l: Rational,
    pub delta0: Rational,
}

impl ShadowingParams {
    pub fn new(l: Rational, delta0: Rational) -> Result<ShadowingParams> {
        if !l.is_positive() || l >= Rational::one() {
            return Err(Error::Precondition(format!("L={l} must lie in (0, 1)")));
        }
        if !delta0.is_positive() {
            return Err(Error::Precondition("δ₀ must be positive".into()));
        }
        Ok(ShadowingParams { l, delta0 })
    }

    pub fn m(&self) -> Rational {
        self.m_i(1)
    }

    pub fn m_i(&self, i: u32) -> Rational {
        let li = self.l.powi(i);
        li.checked_div(&(Rational::one() - &li)).unwrap()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamsEcho {
    #[serde(rename = "L")]
    pub l: Rational,
    pub delta0: Rational,
    /// Iterate count of the tested system.
    pub iterate: u32,
    /// `M_i` for that iterate.
    #[serde(rename = "M")]
    pub m: Rational,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialResult {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain: Option<Vec<Point>>,
    pub shadow_point: Option<Point>,
    pub sup_dist: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub endpoint_hit: Option<bool>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Worst {
    pub trial: usize,
    pub sup_dist: Option<Rational>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShadowingReport {
    pub kind: &'static str,
    pub label: &'static str,
    pub system: String,
    pub resolution: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamsEcho>,
    pub delta: Rational,
    pub eps: Rational,
    pub slack: Rational,
    pub horizon: usize,
    pub methods: Vec<SearchMethod>,
    pub trials: Vec<TrialResult>,
    pub worst: Option<Worst>,
    pub all_pass: bool,
}

fn worst_of(trials: &[TrialResult]) -> Option<Worst> {
    // failures first, then the largest distance; earliest trial on ties
    trials
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| {
            (!a.pass, &a.sup_dist)
                .cmp(&(!b.pass, &b.sup_dist))
                .then(j.cmp(i))
        })
        .map(|(i, t)| Worst { trial: i, sup_dist: t.sup_dist.clone() })
}

/// Default slack: two net cells.
pub fn default_slack(net: &NetSpace) -> Rational {
    net.density() * Rational::integer(2)
}

/// Seeded δ-pseudo orbits must be `(M_i·δ + slack)`-shadowed.
pub fn lipschitz_shadowing_test(
    system: &SystemDef,
    net: &NetSpace,
    params: &ShadowingParams,
    delta: &Rational,
    trials: usize,
    length: usize,
    slack: &Rational,
) -> Result<ShadowingReport> {
    if delta > &params.delta0 {
        return Err(Error::Precondition(format!("δ={delta} exceeds δ₀={}", params.delta0)));
    }
    let iterate = system.iterate_count();
    let m = params.m_i(iterate);
    let eps = &m * delta + slack;
    let results: Vec<Result<(TrialResult, SearchMethod)>> = (0..trials as u64)
        .into_par_iter()
        .map(|seed| {
            let orbit = gen_pseudo_orbit(system, net, delta, length, seed)?;
            let r = shadow_search(system, net, &orbit, &eps)?;
            Ok((
                TrialResult {
                    seed: Some(seed),
                    chain: None,
                    shadow_point: r.best_point.clone(),
                    sup_dist: r.best_dist.clone(),
                    endpoint_hit: None,
                    pass: r.found,
                },
                r.method,
            ))
        })
        .collect();
    let mut trials_out = Vec::with_capacity(trials);
    let mut methods = Vec::new();
    for r in results {
        let (t, method) = r?;
        if !methods.contains(&method) {
            methods.push(method);
        }
        trials_out.push(t);
    }
    Ok(ShadowingReport {
        kind: "lipschitz",
        label: "finite-horizon",
        system: system.name.clone(),
        resolution: net.resolution,
        params: Some(ParamsEcho { l: params.l.clone(), delta0: params.delta0.clone(), iterate, m }),
        delta: delta.clone(),
        eps,
        slack: slack.clone(),
        horizon: length,
        methods,
        all_pass: trials_out.iter().all(|t| t.pass),
        worst: worst_of(&trials_out),
        trials: trials_out,
    })
}

/// Every δ-chain of at most `max_len` steps must be ε-shadowed by an exact
/// orbit that lands on the chain's last point.
///
/// On truncated families the shadow candidates come from the space taken
/// `max_len` levels deeper, so that chain endpoints near the truncation still
/// have their exact preimages.
pub fn h_shadowing_test(
    system: &SystemDef,
    net: &NetSpace,
    eps: &Rational,
    delta: &Rational,
    max_len: usize,
    caps: &Caps,
) -> Result<ShadowingReport> {
    let graph = TransitionGraph::build_capped(system, net, delta, caps)?;
    if !graph.is_exact_invariant() {
        return Err(Error::Precondition(
            "h-shadowing needs a net the map sends into itself".into(),
        ));
    }
    let extra = u32::try_from(max_len).map_err(|_| Error::Precondition("horizon too long".into()))?;
    let deeper = system.deepened(extra)?;
    let cand = if deeper.space == system.space {
        net.clone()
    } else {
        NetSpace::build_capped(&deeper.space, net.resolution, caps)?
    };
    // orbits[x][t] = f^t(x) for every candidate x
    let orbits = cand
        .points
        .par_iter()
        .map(|x| deeper.orbit(x, max_len))
        .collect::<Result<Vec<_>>>()?;
    let chains = enumerate_chains(&graph, max_len, caps.chains)?;
    let results: Vec<TrialResult> = chains
        .par_iter()
        .map(|chain| {
            let chain: Vec<&Point> = chain.iter().map(|&v| net.point(v)).collect();
            let k = chain.len() - 1;
            let mut best: Option<(Rational, usize)> = None;
            let mut hit = false;
            for (x, orbit) in orbits.iter().enumerate() {
                // equality up to word padding
                if !dist(&orbit[k], chain[k]).is_zero() {
                    continue;
                }
                hit = true;
                let sup = (0..k)
                    .map(|i| dist(&orbit[i], chain[i]))
                    .max()
                    .unwrap_or_else(Rational::zero);
                if best.as_ref().is_none_or(|(b, _)| sup < *b) {
                    best = Some((sup, x));
                }
            }
            let pass = matches!(&best, Some((d, _)) if d <= eps);
            TrialResult {
                seed: None,
                chain: Some(chain.into_iter().cloned().collect()),
                shadow_point: best.as_ref().map(|(_, x)| cand.point(*x).clone()),
                sup_dist: best.map(|(d, _)| d),
                endpoint_hit: Some(hit),
                pass,
            }
        })
        .collect();
    Ok(ShadowingReport {
        kind: "h",
        label: "finite-horizon",
        system: system.name.clone(),
        resolution: net.resolution,
        params: None,
        delta: delta.clone(),
        eps: eps.clone(),
        slack: Rational::zero(),
        horizon: max_len,
        methods: vec![SearchMethod::NetScan],
        all_pass: results.iter().all(|t| t.pass),
        worst: worst_of(&results),
        trials: results,
    })
}

/// All graph paths with 1..=max_len steps, in lexicographic node order.
fn enumerate_chains(graph: &TransitionGraph, max_len: usize, cap: usize) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut path = Vec::with_capacity(max_len + 1);
    fn walk(
        graph: &TransitionGraph,
        path: &mut Vec<usize>,
        max_len: usize,
        out: &mut Vec<Vec<usize>>,
        cap: usize,
    ) -> Result<()> {
        let x = *path.last().unwrap();
        for &y in &graph.succ[x] {
            path.push(y);
            out.push(path.clone());
            Caps::check("chains", out.len(), cap)?;
            if path.len() <= max_len {
                walk(graph, path, max_len, out, cap)?;
            }
            path.pop();
        }
        Ok(())
    }
    for x in 0..graph.len() {
        path.push(x);
        walk(graph, &mut path, max_len, &mut out, cap)?;
        path.pop();
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct PullbackStep {
    pub i: usize,
    pub point: Point,
    /// `L^i δ₀`.
    pub bound: Rational,
    /// `d(x_i, C)`.
    pub dist_to_c: Rational,
    /// `d(f^i(x_i), x)`.
    pub dist_to_x: Rational,
    /// `bound + slack − max(dist_to_c, dist_to_x)`.
    pub margin: Rational,
}

#[derive(Debug, Clone, Serialize)]
pub struct PullbackFailure {
    pub step: usize,
    pub eps: Rational,
    pub best_dist: Option<Rational>,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct PullbackReport {
    pub system: String,
    #[serde(rename = "L")]
    pub l: Rational,
    pub delta0: Rational,
    pub slack: Rational,
    pub steps: Vec<PullbackStep>,
    pub completed: bool,
    pub failure: Option<PullbackFailure>,
}

/// The inductive pullback towards an invariant set `C`.
///
/// Starting from `x_0 = x`, step `i` picks `y ∈ C` nearest to `x_i` and
/// `z ∈ C` with `f(z) = y`, and shadows the chain
/// `(z, x_i, f(x_i), …, f^{i−1}(x_i), x)` within `L^{i+1}δ₀ + slack`; the
/// shadow point is `x_{i+1}`. Here `L` is the Lipschitz shadowing constant
/// itself. Both distances `d(x_i, C)` and `d(f^i(x_i), x)` are recorded
/// against `L^i δ₀`.
pub fn pullback_trace(
    system: &SystemDef,
    net: &NetSpace,
    c: &[usize],
    x: &Point,
    params: &ShadowingParams,
    steps: usize,
    slack: &Rational,
) -> Result<PullbackReport> {
    if c.is_empty() {
        return Err(Error::Precondition("C must be nonempty".into()));
    }
    let c_points: Vec<Point> = c.iter().map(|&i| net.point(i).clone()).collect();
    let images = c_points.iter().map(|p| system.eval(p)).collect::<Result<Vec<_>>>()?;
    for y in &images {
        if !c_points.contains(y) {
            return Err(Error::Precondition(format!("C is not invariant: image {y} leaves C")));
        }
    }
    for p in &c_points {
        if !images.contains(p) {
            return Err(Error::Precondition(format!("C is not invariant: {p} has no preimage in C")));
        }
    }
    let to_c = |p: &Point| c_points.iter().map(|q| dist(p, q)).min().unwrap();
    if to_c(x) > params.delta0 {
        return Err(Error::Precondition(format!("d(x, C) exceeds δ₀={}", params.delta0)));
    }
    let record = |i: usize, xi: &Point| -> Result<PullbackStep> {
        let bound = params.l.powi(i as u32) * &params.delta0;
        let dist_to_c = to_c(xi);
        let fi = system.orbit(xi, i)?.pop().unwrap();
        let dist_to_x = dist(&fi, x);
        let margin = &bound + slack - dist_to_c.clone().max(dist_to_x.clone());
        Ok(PullbackStep { i, point: xi.clone(), bound, dist_to_c, dist_to_x, margin })
    };
    let mut trace = vec![record(0, x)?];
    let mut xi = x.clone();
    for i in 0..steps {
        let y = c_points.iter().min_by_key(|q| (dist(&xi, q), (*q).clone())).unwrap().clone();
        let z = c_points
            .iter()
            .zip(&images)
            .filter(|(_, img)| **img == y)
            .map(|(p, _)| p.clone())
            .min()
            .unwrap();
        let mut chain = vec![z];
        chain.extend(system.orbit(&xi, i.saturating_sub(1))?.into_iter().take(i));
        if i == 0 {
            chain.truncate(1);
        }
        chain.push(x.clone());
        let orbit = PseudoOrbit::tight(system, chain)?;
        let eps = params.l.powi(i as u32 + 1) * &params.delta0 + slack;
        let r = shadow_search(system, net, &orbit, &eps)?;
        if !r.found {
            return Ok(PullbackReport {
                system: system.name.clone(),
                l: params.l.clone(),
                delta0: params.delta0.clone(),
                slack: slack.clone(),
                steps: trace,
                completed: false,
                failure: Some(PullbackFailure {
                    step: i + 1,
                    eps,
                    best_dist: r.best_dist,
                    reason: format!(
                        "no shadow of the {}-chain within the bound",
                        orbit.delta
                    ),
                }),
            });
        }
        xi = r.best_point.unwrap();
        trace.push(record(i + 1, &xi)?);
    }
    Ok(PullbackReport {
        system: system.name.clone(),
        l: params.l.clone(),
        delta0: params.delta0.clone(),
        slack: slack.clone(),
        steps: trace,
        completed: true,
        failure: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::q;

    #[test]
    fn derived_constants() {
        let p = ShadowingParams::new(q("1/2"), q("1/2")).unwrap();
        assert_eq!(p.m(), q("1"));
        assert_eq!(p.m_i(2), q("1/3"));
        assert!(ShadowingParams::new(q("1"), q("1/2")).is_err());
    }

    #[test]
    fn tent_lipschitz_small() {
        let sys = SystemDef::tent();
        let net = NetSpace::build(&sys.space, 8).unwrap();
        let p = ShadowingParams::new(q("1/2"), q("1/2")).unwrap();
        let rep = lipschitz_shadowing_test(&sys, &net, &p, &q("1/64"), 10, 20, &q("1/128")).unwrap();
        assert!(rep.all_pass, "{:?}", rep.worst);
        for t in &rep.trials {
            assert!(t.sup_dist.as_ref().unwrap() <= &q("1/64"));
        }
    }

    #[test]
    fn zero_delta_orbits_shadow_exactly() {
        let sys = SystemDef::ex21(6);
        let net = NetSpace::build(&sys.space, 1).unwrap();
        let p = ShadowingParams::new(q("1/2"), q("1/2")).unwrap();
        let rep = lipschitz_shadowing_test(&sys, &net, &p, &Rational::zero(), 5, 8, &Rational::zero()).unwrap();
        assert!(rep.all_pass);
        assert!(rep.trials.iter().all(|t| t.sup_dist == Some(Rational::zero())));
    }

    #[test]
    fn h_shadowing_small() {
        let sys = SystemDef::ex21(8);
        let net = NetSpace::build(&sys.space, 1).unwrap();
        let rep = h_shadowing_test(&sys, &net, &q("1/4"), &q("1/64"), 4, &Caps::default()).unwrap();
        assert!(rep.all_pass);
        // exact orbits are their own h-shadows
        let exact = rep.trials.iter().find(|t| {
            let c = t.chain.as_ref().unwrap();
            c.windows(2).all(|w| sys.eval(&w[0]).unwrap() == w[1])
        });
        assert_eq!(exact.unwrap().sup_dist, Some(Rational::zero()));
        let strict = h_shadowing_test(&sys, &net, &Rational::zero(), &q("1/64"), 2, &Caps::default()).unwrap();
        assert!(!strict.all_pass);
    }

    #[test]
    fn pullback_trivial_cases() {
        let sys = SystemDef::ex21(8);
        let net = NetSpace::build(&sys.space, 1).unwrap();
        let one = net.index_of(&Point::Real(q("1"))).unwrap();
        let p = ShadowingParams::new(q("1/2"), q("1/2")).unwrap();
        let rep = pullback_trace(&sys, &net, &[one], &Point::Real(q("1")), &p, 3, &Rational::zero()).unwrap();
        assert!(rep.completed);
        assert!(rep.steps.iter().all(|s| s.dist_to_c.is_zero() && s.dist_to_x.is_zero()));
        let rep = pullback_trace(&sys, &net, &[one], &Point::Real(q("1/2")), &p, 0, &Rational::zero()).unwrap();
        assert_eq!(rep.steps.len(), 1);
    }

    #[test]
    fn pullback_ex21_half_fails_honestly() {
        let sys = SystemDef::ex21(8);
        let net = NetSpace::build(&sys.space, 1).unwrap();
        let one = net.index_of(&Point::Real(q("1"))).unwrap();
        let p = ShadowingParams::new(q("1/2"), q("1/2")).unwrap();
        let rep = pullback_trace(&sys, &net, &[one], &Point::Real(q("1/2")), &p, 4, &Rational::zero()).unwrap();
        assert!(!rep.completed);
        assert_eq!(rep.failure.unwrap().step, 1);
    }

    #[test]
    fn pullback_tent_square_contracts() {
        let sys = SystemDef::tent().iterate(2).unwrap();
        let net = NetSpace::build(&sys.space, 8).unwrap();
        let zero = net.index_of(&Point::Real(q("0"))).unwrap();
        let p = ShadowingParams::new(q("1/3"), q("1/64")).unwrap();
        let rep = pullback_trace(&sys, &net, &[zero], &Point::Real(q("1/64")), &p, 4, &Rational::zero()).unwrap();
        assert!(rep.completed, "{:?}", rep.failure);
        for s in &rep.steps {
            assert!(!s.margin.is_negative(), "{s:?}");
            assert!(s.dist_to_c <= s.bound);
        }
    }
}
