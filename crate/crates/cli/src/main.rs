//! `ballexp`: run one verification on one system and write a JSON report.
//!
//! Exit codes: 0 pass or success, 1 refuted, 2 usage or configuration error,
//! 3 resource cap exceeded.

mod commands;
mod config;
mod report;

use std::process::ExitCode;
use std::time::Instant;

use ballexp::{Error, Result};
use clap::{Parser, Subcommand};
use serde_json::{Map, Value};

use commands::*;
use config::{load_file, resolve, Common};
use report::{Outcome, ReportEnvelope, Timing, SCHEMA};

#[derive(Parser)]
#[command(name = "ballexp", version, about = "Exact finite-net checks for ball-expanding maps")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the net and report its size and density
    Net(NetArgs),
    /// Build the δ-transition graph
    Graph(DeltaArgs),
    /// Chain components, their order and the terminal ones (JSON + DOT)
    Components(DeltaArgs),
    /// Certify or refute the ball-expanding condition
    Certify(CertifyArgs),
    /// Metric expansion and local injectivity on the net
    ExpandingSideChecks(SideArgs),
    /// Lipschitz shadowing of seeded pseudo orbits
    Shadow(ShadowArgs),
    /// Exact-endpoint shadowing of every short δ-chain
    Hshadow(HShadowArgs),
    /// Trace the pullback towards an invariant set
    Pullback(PullbackArgs),
    /// Separated-set growth rate
    Entropy(EntropyArgs),
    /// The three zero-entropy conditions and whether they agree
    Trichotomy(TrichotomyArgs),
    /// Least iterate at which an open set covers the space
    Leo(LeoArgs),
    /// Whether f^j(U) meets V across a window
    Mixing(MixingArgs),
    /// Periodic points up to a period
    Periodic(PeriodicArgs),
    /// Iterations needed to reach the chain-recurrent set
    Hitting(HittingArgs),
    /// Write the transition graph as an edge list, DOT or JSON
    Export(ExportArgs),
    /// Run the acceptance criteria and print a pass/fail table
    CorpusVerify(CorpusArgs),
}

/// Resolves the subcommand's flags against the config file, runs it and
/// returns the outcome with the resolved config echo.
fn dispatch(common: &Common, command: &Command, file: &Map<String, Value>) -> Result<(&'static str, Value, Outcome, Option<u8>)> {
    macro_rules! run {
        ($name:literal, $args:expr, $f:path) => {{
            let args = resolve($args, file)?;
            let echo = echo(common, &args)?;
            ($name, echo, $f(common, &args)?, None)
        }};
    }
    Ok(match command {
        Command::Net(a) => run!("net", a, net),
        Command::Graph(a) => run!("graph", a, graph_cmd),
        Command::Components(a) => run!("components", a, components),
        Command::Certify(a) => run!("certify", a, certify),
        Command::ExpandingSideChecks(a) => run!("expanding-side-checks", a, side_checks),
        Command::Shadow(a) => run!("shadow", a, shadow),
        Command::Hshadow(a) => run!("hshadow", a, hshadow),
        Command::Pullback(a) => run!("pullback", a, pullback),
        Command::Entropy(a) => run!("entropy", a, entropy),
        Command::Trichotomy(a) => run!("trichotomy", a, trichotomy),
        Command::Leo(a) => run!("leo", a, leo),
        Command::Mixing(a) => run!("mixing", a, mixing),
        Command::Periodic(a) => run!("periodic", a, periodic),
        Command::Hitting(a) => run!("hitting", a, hitting),
        Command::Export(a) => run!("export", a, export),
        Command::CorpusVerify(a) => {
            let args = resolve(a, file)?;
            let (out, code) = corpus_verify(common, &args)?;
            ("corpus-verify", echo(common, &args)?, out, Some(code))
        }
    })
}

fn echo<T: serde::Serialize>(common: &Common, args: &T) -> Result<Value> {
    let mut map = Map::new();
    for v in [report::to_value(common)?, report::to_value(args)?] {
        if let Value::Object(m) = v {
            map.extend(m.into_iter().filter(|(_, v)| !v.is_null() && v.as_array().is_none_or(|a| !a.is_empty())));
        }
    }
    Ok(Value::Object(map))
}

fn exit_code(e: &Error) -> u8 {
    if e.is_resource() {
        3
    } else {
        2
    }
}

fn run(cli: Cli) -> Result<u8> {
    let start = Instant::now();
    let file = load_file(cli.common.config.as_deref())?;
    let common = resolve(&cli.common, &file)?;
    let (name, config, outcome, code) = dispatch(&common, &cli.command, &file)?;
    let env = ReportEnvelope {
        schema: SCHEMA.into(),
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: name.into(),
        config,
        timing: Timing { elapsed_ms: start.elapsed().as_millis() },
        payload: outcome.payload,
        verdict: outcome.verdict,
    };
    let path = report::write(&common.out_dir(), &env, &outcome.files)?;
    let status = serde_json::to_value(env.verdict.status).unwrap();
    println!("{name}: {} {}", status.as_str().unwrap().to_uppercase(), env.verdict.summary);
    println!("report: {}", path.display());
    Ok(code.unwrap_or_else(|| env.verdict.status.exit_code()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
