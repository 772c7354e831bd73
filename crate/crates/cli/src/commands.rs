use ballexp::chaingraph::{
    condensation_dot, cr_hitting_time, dyadic_grid, edge_list, node_table, periodic_points_affine,
    periodic_points_exact, ChainAnalysis, GraphDocument, TransitionGraph,
};
use ballexp::corpus::run_criteria;
use ballexp::expanding::{
    ball_expanding_check, certificate_search, default_delta_samples, local_injectivity_check,
    metric_expanding_check, CoverMode,
};
use ballexp::globalprops::{entropy_estimate, entropy_trichotomy, leo_check, mixing_check, EntropyBands};
use ballexp::shadowing::{default_slack, h_shadowing_test, lipschitz_shadowing_test, pullback_trace, ShadowingParams};
use ballexp::{q, Error, NetSpace, Point, Rational, Result, SystemDef};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{point, rational, region, Common};
use crate::report::{Outcome, Status};

fn need<T: Clone>(v: &Option<T>, flag: &str) -> Result<T> {
    v.clone().ok_or_else(|| Error::Precondition(format!("missing --{flag}")))
}

fn graph<'a>(c: &Common, sys: &'a SystemDef, net: &'a NetSpace, delta: &Rational) -> Result<TransitionGraph<'a>> {
    TransitionGraph::build_capped(sys, net, delta, &c.caps())
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct NetArgs {
    /// List every point in the report
    #[arg(long)]
    pub points: Option<bool>,
}

pub fn net(c: &Common, a: &NetArgs) -> Result<Outcome> {
    let sys = c.system()?;
    let net = c.net(&sys)?;
    let payload = json!({
        "space": net.spec,
        "resolution": net.resolution,
        "size": net.len(),
        "density": net.density(),
        "min_gap": net.min_gap(),
        "diameter": net.diameter(),
        "points": a.points.unwrap_or(false).then_some(&net.points),
    });
    Outcome::new(&payload, Status::Ok, format!("{} points, density {}", net.len(), net.density()))
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct DeltaArgs {
    /// Chain jump size δ
    #[arg(long, value_parser = rational)]
    pub delta: Option<Rational>,
}

pub fn graph_cmd(c: &Common, a: &DeltaArgs) -> Result<Outcome> {
    let sys = c.system()?;
    let net = c.net(&sys)?;
    let g = graph(c, &sys, &net, &need(&a.delta, "delta")?)?;
    let payload = json!({
        "nodes": g.len(),
        "edges": g.edge_count(),
        "min_out_degree": g.succ.iter().map(Vec::len).min(),
        "exact_invariant": g.is_exact_invariant(),
        "graph": GraphDocument::of(&g),
    });
    Outcome::new(&payload, Status::Ok, format!("{} nodes, {} edges", g.len(), g.edge_count()))
}

pub fn components(c: &Common, a: &DeltaArgs) -> Result<Outcome> {
    let sys = c.system()?;
    let net = c.net(&sys)?;
    let g = graph(c, &sys, &net, &need(&a.delta, "delta")?)?;
    let an = ChainAnalysis::of(&g);
    let payload = json!({
        "analysis": an,
        "component_points": an.component_points(&g),
        "terminal_points": an.terminal_points(&g),
    });
    let summary = format!(
        "{} recurrent nodes, {} components, {} terminal",
        an.recurrent.len(),
        an.components.len(),
        an.terminal.len()
    );
    Ok(Outcome::new(&payload, Status::Ok, summary)?.with_file("components.dot", condensation_dot(&g, &an)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    EdgeList,
    Dot,
    Json,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct ExportArgs {
    /// Chain jump size δ
    #[arg(long, value_parser = rational)]
    pub delta: Option<Rational>,
    /// Output format (required unless --check is given)
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Re-import a JSON export and compare its adjacency with a fresh build
    #[arg(long)]
    pub check: Option<std::path::PathBuf>,
}

pub fn export(c: &Common, a: &ExportArgs) -> Result<Outcome> {
    let sys = c.system()?;
    let net = c.net(&sys)?;
    let g = graph(c, &sys, &net, &need(&a.delta, "delta")?)?;
    if let Some(path) = &a.check {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let doc = GraphDocument::parse(&text)?;
        let same = doc == GraphDocument::of(&g);
        let summary = if same { "adjacency reproduced" } else { "adjacency differs" };
        return Outcome::new(&json!({ "checked": path, "identical": same }), Status::from_pass(same), summary);
    }
    let format = need(&a.format, "format")?;
    let (name, body) = match format {
        Format::EdgeList => ("graph.edges", edge_list(&g)),
        Format::Dot => ("graph.dot", condensation_dot(&g, &ChainAnalysis::of(&g))),
        Format::Json => ("graph.json", serde_json::to_string_pretty(&GraphDocument::of(&g)).unwrap() + "\n"),
    };
    let mut out = Outcome::new(&json!({ "format": format, "file": name, "edges": g.edge_count() }), Status::Ok, format!("wrote {name}"))?
        .with_file(name, body);
    if format == Format::EdgeList {
        out = out.with_file("graph.nodes.json", serde_json::to_string_pretty(&node_table(&g)).unwrap() + "\n");
    }
    Ok(out)
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct CertifyArgs {
    /// Contraction constant L; defaults to 1/2
    #[arg(long = "L", value_parser = rational)]
    #[serde(rename = "L")]
    pub l: Option<Rational>,
    /// Largest radius δ₀; defaults to --delta, then 1/2
    #[arg(long, value_parser = rational)]
    pub delta0: Option<Rational>,
    /// Check a single radius; also the default δ₀
    #[arg(long, value_parser = rational)]
    pub delta: Option<Rational>,
    /// Target net resolution; defaults to --res, then 6
    #[arg(long)]
    pub target_res: Option<u32>,
    /// Defaults to the target resolution plus two
    #[arg(long)]
    pub cand_res: Option<u32>,
    /// Extra truncation depth of the candidate space for truncated families
    #[arg(long)]
    pub cand_extra: Option<u32>,
    /// Covering slack η; exact covering when absent
    #[arg(long, value_parser = rational)]
    pub slack: Option<Rational>,
    /// Search over these L values (comma separated)
    #[arg(long = "L-grid", value_parser = rational, value_delimiter = ',')]
    #[serde(rename = "L-grid")]
    pub l_grid: Vec<Rational>,
    /// Search over these δ₀ values (comma separated)
    #[arg(long, value_parser = rational, value_delimiter = ',')]
    pub delta0_grid: Vec<Rational>,
}

pub fn certify(c: &Common, a: &CertifyArgs) -> Result<Outcome> {
    let sys = c.system()?;
    let target_res = a.target_res.or(c.res).unwrap_or(6);
    let cand_res = a.cand_res.unwrap_or(target_res + 2);
    let caps = c.caps();
    let target = NetSpace::build_capped(&sys.space, target_res, &caps)?;
    let cand_space = sys.space.deepened(a.cand_extra.unwrap_or(1));
    let candidate = NetSpace::build_capped(&cand_space, cand_res, &caps)?;
    let mode = match &a.slack {
        Some(eta) => CoverMode::Slack { eta: eta.clone() },
        None => CoverMode::Exact,
    };
    let l = a.l.clone().unwrap_or_else(|| q("1/2"));
    let delta0 = a.delta0.clone().or_else(|| a.delta.clone()).unwrap_or_else(|| q("1/2"));
    if !a.l_grid.is_empty() || !a.delta0_grid.is_empty() {
        let ls = if a.l_grid.is_empty() { vec![l] } else { a.l_grid.clone() };
        let ds = if a.delta0_grid.is_empty() { vec![delta0] } else { a.delta0_grid.clone() };
        let s = certificate_search(&sys, &target, &candidate, &ls, &ds, &mode)?;
        let summary = match &s.best {
            Some(b) => format!("certified at L={} δ₀={}", b.l, b.delta0),
            None => format!("no certificate over {} pairs", s.table.len()),
        };
        return Outcome::new(&s, Status::from_pass(s.best.is_some()), summary);
    }
    let samples = match &a.delta {
        Some(d) => vec![d.clone()],
        None => {
            let floor = target.min_gap().unwrap_or_else(Rational::one) * q("1/2");
            default_delta_samples(&delta0, &floor)
        }
    };
    let cert = ball_expanding_check(&sys, &target, &candidate, &l, &delta0, &samples, &mode)?;
    let summary = match &cert.witness {
        None => format!("ball expanding on the net with L={l}, δ₀={delta0}"),
        Some(w) => {
            if !w.reverify(&sys, &candidate, &l, &mode.eta())? {
                return Err(Error::Contract("witness does not re-verify".into()));
            }
            format!("witness x={} δ={} y={} gap {}", w.x, w.delta, w.y, w.gap)
        }
    };
    Outcome::new(&cert, Status::from_pass(cert.pass), summary)
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct SideArgs {
    /// Expansion constant L; defaults to 1/2
    #[arg(long = "L", value_parser = rational)]
    #[serde(rename = "L")]
    pub l: Option<Rational>,
    /// Neighbourhood radius; defaults to 1/4
    #[arg(long, value_parser = rational)]
    pub delta0: Option<Rational>,
    /// Injectivity radius; defaults to δ₀
    #[arg(long, value_parser = rational)]
    pub rho: Option<Rational>,
}

pub fn side_checks(c: &Common, a: &SideArgs) -> Result<Outcome> {
    let sys = c.system()?;
    let net = c.net(&sys)?;
    let delta0 = a.delta0.clone().unwrap_or_else(|| q("1/4"));
    let l = a.l.clone().unwrap_or_else(|| q("1/2"));
    let metric = metric_expanding_check(&sys, &net, &l, &delta0)?;
    let inj = local_injectivity_check(&sys, &net, a.rho.as_ref().unwrap_or(&delta0))?;
    let pass = metric.pass && inj.pass;
    let summary = format!(
        "metric expanding {}, locally injective {}",
        if metric.pass { "holds" } else { "fails" },
        if inj.pass { "holds" } else { "fails" }
    );
    Outcome::new(&json!({ "metric_expanding": metric, "local_injectivity": inj }), Status::from_pass(pass), summary)
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct ShadowArgs {
    /// Contraction constant L
    #[arg(long = "L", value_parser = rational)]
    #[serde(rename = "L")]
    pub l: Option<Rational>,
    /// Largest radius δ₀
    #[arg(long, value_parser = rational)]
    pub delta0: Option<Rational>,
    /// Pseudo-orbit jump size; defaults to δ₀
    #[arg(long, value_parser = rational)]
    pub delta: Option<Rational>,
    /// Number of seeded pseudo orbits; defaults to 100
    #[arg(long)]
    pub trials: Option<usize>,
    /// Pseudo-orbit length; defaults to 40
    #[arg(long)]
    pub length: Option<usize>,
    /// Discretization slack; defaults to twice the net density
    #[arg(long, value_parser = rational)]
    pub slack: Option<Rational>,
}

pub fn shadow(c: &Common, a: &ShadowArgs) -> Result<Outcome> {
    let sys = c.system()?;
    let net = c.net(&sys)?;
    let params = ShadowingParams::new(need(&a.l, "L")?, need(&a.delta0, "delta0")?)?;
    let delta = a.delta.clone().unwrap_or_else(|| params.delta0.clone());
    let slack = a.slack.clone().unwrap_or_else(|| default_slack(&net));
    let r = lipschitz_shadowing_test(&sys, &net, &params, &delta, a.trials.unwrap_or(100), a.length.unwrap_or(40), &slack)?;
    let passed = r.trials.iter().filter(|t| t.pass).count();
    let summary = format!("{passed}/{} pseudo orbits shadowed within {}", r.trials.len(), r.eps);
    Outcome::new(&r, Status::from_pass(r.all_pass), summary)
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct HShadowArgs {
    /// Shadowing tolerance ε
    #[arg(long, value_parser = rational)]
    pub eps: Option<Rational>,
    /// Chain jump size δ
    #[arg(long, value_parser = rational)]
    pub delta: Option<Rational>,
    /// Longest chain enumerated
    #[arg(long)]
    pub max_len: Option<usize>,
}

pub fn hshadow(c: &Common, a: &HShadowArgs) -> Result<Outcome> {
    let sys = c.system()?;
    let net = c.net(&sys)?;
    let r = h_shadowing_test(&sys, &net, &need(&a.eps, "eps")?, &need(&a.delta, "delta")?, a.max_len.unwrap_or(4), &c.caps())?;
    let passed = r.trials.iter().filter(|t| t.pass).count();
    let summary = format!("{passed}/{} chains have an exact-endpoint shadow", r.trials.len());
    Outcome::new(&r, Status::from_pass(r.all_pass), summary)
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct PullbackArgs {
    /// Contraction constant L
    #[arg(long = "L", value_parser = rational)]
    #[serde(rename = "L")]
    pub l: Option<Rational>,
    /// Largest radius δ₀
    #[arg(long, value_parser = rational)]
    pub delta0: Option<Rational>,
    /// Start point near C
    #[arg(long)]
    pub x: Option<String>,
    /// Points of the invariant set C, separated by `;`; defaults to the
    /// periodic points of the net
    #[arg(long)]
    pub c: Option<String>,
    /// Pullback steps; defaults to 8
    #[arg(long)]
    pub steps: Option<usize>,
    /// Discretization slack; defaults to twice the net density
    #[arg(long, value_parser = rational)]
    pub slack: Option<Rational>,
}

pub fn pullback(c: &Common, a: &PullbackArgs) -> Result<Outcome> {
    let sys = c.system()?;
    let net = c.net(&sys)?;
    let params = ShadowingParams::new(need(&a.l, "L")?, need(&a.delta0, "delta0")?)?;
    let x = point(&sys, &need(&a.x, "x")?)?;
    let set: Vec<usize> = match &a.c {
        Some(text) => text
            .split(';')
            .map(|t| {
                let p = point(&sys, t.trim())?;
                net.index_of(&p).ok_or_else(|| Error::Domain(format!("{p} is not a net point")))
            })
            .collect::<Result<_>>()?,
        None => periodic_points_exact(&sys, &net, net.len())?
            .points()
            .iter()
            .map(|p| net.index_of(p).unwrap())
            .collect(),
    };
    let slack = a.slack.clone().unwrap_or_else(|| default_slack(&net));
    let r = pullback_trace(&sys, &net, &set, &x, &params, a.steps.unwrap_or(8), &slack)?;
    let pass = r.completed && r.failure.is_none();
    let summary = match &r.failure {
        None => format!("{} pullback steps within bounds", r.steps.len()),
        Some(f) => format!("pullback fails: {f:?}"),
    };
    Outcome::new(&r, Status::from_pass(pass), summary)
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct EntropyArgs {
    /// Separation ε; defaults to 2^-6
    #[arg(long, value_parser = rational)]
    pub eps: Option<Rational>,
    /// Shortest orbit length; defaults to 1
    #[arg(long)]
    pub n_min: Option<usize>,
    /// Longest orbit length; defaults to 8
    #[arg(long)]
    pub n_max: Option<usize>,
}

pub fn entropy(c: &Common, a: &EntropyArgs) -> Result<Outcome> {
    let sys = c.system()?;
    let net = c.net(&sys)?;
    let eps = a.eps.clone().unwrap_or_else(|| Rational::pow2(-6));
    let e = entropy_estimate(&sys, &net, &eps, a.n_min.unwrap_or(1), a.n_max.unwrap_or(8), EntropyBands::default())?;
    let summary = format!(
        "slope {:.4} nats/step ({:?}{})",
        e.slope,
        e.verdict,
        if e.saturated { ", net saturated" } else { "" }
    );
    Ok(Outcome::new(&e, Status::Ok, summary)?.with_file("entropy.csv", e.to_csv()))
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct TrichotomyArgs {
    /// δ values for the chain-recurrence clause (comma separated)
    #[arg(long, value_parser = rational, value_delimiter = ',')]
    pub delta_grid: Vec<Rational>,
    /// Separation ε; defaults to 2^-6
    #[arg(long, value_parser = rational)]
    pub eps: Option<Rational>,
    /// Shortest orbit length; defaults to 4
    #[arg(long)]
    pub n_min: Option<usize>,
    /// Longest orbit length; defaults to 12
    #[arg(long)]
    pub n_max: Option<usize>,
}

pub fn trichotomy(c: &Common, a: &TrichotomyArgs) -> Result<Outcome> {
    let sys = c.system()?;
    let net = c.net(&sys)?;
    let grid = if a.delta_grid.is_empty() { dyadic_grid(3, 8) } else { a.delta_grid.clone() };
    let eps = a.eps.clone().unwrap_or_else(|| Rational::pow2(-6));
    let t = entropy_trichotomy(&sys, &net, &grid, &eps, (a.n_min.unwrap_or(4), a.n_max.unwrap_or(12)), &c.caps())?;
    let summary = format!(
        "zero entropy {}, finite CR {}, bijective on CR {}",
        t.zero_entropy, t.finite_cr, t.bijective_on_cr
    );
    Outcome::new(&t, Status::from_pass(t.consistent), summary)
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct LeoArgs {
    /// Open set U: intervals `a:b;c:d`, or cylinder prefixes `101;11`
    #[arg(long)]
    pub u: Option<String>,
    /// Largest iterate tried
    #[arg(long)]
    pub cap: Option<usize>,
}

pub fn leo(c: &Common, a: &LeoArgs) -> Result<Outcome> {
    let sys = c.system()?;
    let u = region(&sys, &need(&a.u, "u")?)?;
    let r = leo_check(&sys, &u, a.cap.unwrap_or(64))?;
    let summary = match r.covering_index {
        Some(i) => format!("f^{i}(U) is the whole space"),
        None => format!("U does not cover within {} iterates", r.cap),
    };
    Outcome::new(&r, Status::from_pass(r.covering_index.is_some()), summary)
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct MixingArgs {
    /// Open set U, in the same format as for leo
    #[arg(long)]
    pub u: Option<String>,
    /// Open set V
    #[arg(long)]
    pub v: Option<String>,
    /// First time checked; defaults to 0
    #[arg(long)]
    pub window_start: Option<usize>,
    /// Last time checked; defaults to 64
    #[arg(long)]
    pub window_end: Option<usize>,
}

pub fn mixing(c: &Common, a: &MixingArgs) -> Result<Outcome> {
    let sys = c.system()?;
    let u = region(&sys, &need(&a.u, "u")?)?;
    let v = region(&sys, &need(&a.v, "v")?)?;
    let r = mixing_check(&sys, &u, &v, a.window_start.unwrap_or(0), a.window_end.unwrap_or(64))?;
    let summary = if r.pass {
        format!("f^j(U) meets V for every j in {}..={}", r.window.0, r.window.1)
    } else {
        format!("{} misses in {}..={}", r.misses.len(), r.window.0, r.window.1)
    };
    Outcome::new(&r, Status::from_pass(r.pass), summary)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PeriodicMethod {
    /// Cycles of the map on an exact invariant net
    Exact,
    /// Solve f^p(x) = x on every branch
    Affine,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct PeriodicArgs {
    /// Largest period; defaults to 6
    #[arg(long)]
    pub max_period: Option<usize>,
    /// Defaults to affine for piecewise-affine maps on intervals and circles
    #[arg(long, value_enum)]
    pub method: Option<PeriodicMethod>,
}

pub fn periodic(c: &Common, a: &PeriodicArgs) -> Result<Outcome> {
    let sys = c.system()?;
    let max = a.max_period.unwrap_or(6);
    let affine_default = sys.space.is_perfect() && sys.is_piecewise_affine();
    let r = match a.method.unwrap_or(if affine_default { PeriodicMethod::Affine } else { PeriodicMethod::Exact }) {
        PeriodicMethod::Affine => periodic_points_affine(&sys, max)?,
        PeriodicMethod::Exact => periodic_points_exact(&sys, &c.net(&sys)?, max)?,
    };
    let n = r.points().len();
    Outcome::new(&r, Status::Ok, format!("{n} periodic points of period ≤ {max}"))
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct HittingArgs {
    /// Chain jump size δ
    #[arg(long, value_parser = rational)]
    pub delta: Option<Rational>,
    /// A single start point; all net points when absent
    #[arg(long)]
    pub x: Option<String>,
}

pub fn hitting(c: &Common, a: &HittingArgs) -> Result<Outcome> {
    let sys = c.system()?;
    let net = c.net(&sys)?;
    let g = graph(c, &sys, &net, &need(&a.delta, "delta")?)?;
    let an = ChainAnalysis::of(&g);
    let starts: Vec<usize> = match &a.x {
        Some(t) => {
            let p = point(&sys, t)?;
            vec![net.index_of(&p).ok_or_else(|| Error::Domain(format!("{p} is not a net point")))?]
        }
        None => (0..net.len()).collect(),
    };
    let mut times: Vec<(Point, Option<usize>)> = Vec::with_capacity(starts.len());
    for i in starts {
        times.push((net.point(i).clone(), cr_hitting_time(&g, &an, i, Some(c.caps().iterates))?));
    }
    let max = times.iter().filter_map(|t| t.1).max();
    let all_hit = times.iter().all(|t| t.1.is_some());
    let payload = json!({ "delta": g.delta, "max_hitting_time": max, "all_hit": all_hit, "times": times });
    Outcome::new(&payload, Status::from_pass(all_hit), format!("largest hitting time {max:?}"))
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct CorpusArgs {
    /// Run only these criteria (comma separated ids)
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
}

/// Runs the acceptance criteria; the exit code is 3 if any stopped on a cap,
/// otherwise 1 if any failed.
pub fn corpus_verify(c: &Common, a: &CorpusArgs) -> Result<(Outcome, u8)> {
    let only = (!a.only.is_empty()).then_some(a.only.as_slice());
    let results = run_criteria(only, &c.caps())?;
    for r in &results {
        println!(
            "{:<4} {} {:>7} ms  {}: {}",
            r.id,
            if r.pass { "PASS" } else { "FAIL" },
            r.elapsed_ms,
            r.title,
            r.error.as_deref().unwrap_or(&r.detail)
        );
    }
    let failed: Vec<&str> = results.iter().filter(|r| !r.pass).map(|r| r.id).collect();
    let capped: Vec<&str> = results.iter().filter(|r| r.capped).map(|r| r.id).collect();
    let code = if !capped.is_empty() {
        3
    } else if !failed.is_empty() {
        1
    } else {
        0
    };
    let summary = if !capped.is_empty() {
        format!("stopped on a resource cap in {}", capped.join(", "))
    } else if failed.is_empty() {
        format!("all {} criteria pass", results.len())
    } else {
        format!("{} of {} fail: {}", failed.len(), results.len(), failed.join(", "))
    };
    Ok((Outcome::new(&results, Status::from_pass(failed.is_empty()), summary)?, code))
}
