//! The JSON envelope every subcommand writes, and the files written beside it.

use std::path::{Path, PathBuf};

use ballexp::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA: &str = "ballexp-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    /// The checked property holds.
    Pass,
    /// The checked property is refuted; the payload carries the witness.
    Fail,
    /// A computation without a verdict finished.
    Ok,
}

impl Status {
    pub fn from_pass(pass: bool) -> Status {
        if pass {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Status::Fail => 1,
            Status::Pass | Status::Ok => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub summary: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: u128,
}

/// Everything a run produced. `payload` is deterministic for a fixed config;
/// `timing` is the only field that varies between identical runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEnvelope {
    pub schema: String,
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: Value,
    pub timing: Timing,
    pub payload: Value,
    pub verdict: Verdict,
}

/// What a subcommand hands back before it is wrapped and written.
pub struct Outcome {
    pub payload: Value,
    pub verdict: Verdict,
    /// Extra files `(name, contents)` written next to the report.
    pub files: Vec<(String, String)>,
}

impl Outcome {
    pub fn new<T: Serialize>(payload: &T, status: Status, summary: impl Into<String>) -> Result<Outcome> {
        Ok(Outcome {
            payload: to_value(payload)?,
            verdict: Verdict { status, summary: summary.into() },
            files: Vec::new(),
        })
    }

    pub fn with_file(mut self, name: &str, contents: String) -> Outcome {
        self.files.push((name.to_string(), contents));
        self
    }
}

pub fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Contract(format!("report serialization: {e}")))
}

fn io(path: &Path, e: std::io::Error) -> Error {
    Error::Precondition(format!("{}: {e}", path.display()))
}

/// Writes `<dir>/<command>.json` plus side files, then reads the report back
/// and checks it re-parses to the same envelope.
pub fn write(dir: &Path, env: &ReportEnvelope, files: &[(String, String)]) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let path = dir.join(format!("{}.json", env.command));
    let text = serde_json::to_string_pretty(env).map_err(|e| Error::Contract(e.to_string()))?;
    std::fs::write(&path, text + "\n").map_err(|e| io(&path, e))?;
    for (name, contents) in files {
        let p = dir.join(name);
        std::fs::write(&p, contents).map_err(|e| io(&p, e))?;
    }
    let back = std::fs::read_to_string(&path).map_err(|e| io(&path, e))?;
    let parsed: ReportEnvelope = serde_json::from_str(&back).map_err(|e| Error::Contract(e.to_string()))?;
    if parsed != *env {
        return Err(Error::Contract(format!("{} does not round-trip", path.display())));
    }
    Ok(path)
}
