//! Flag and config-file resolution. A config file is a flat JSON object whose
//! keys are the long flag names; flags override it and built-in defaults fill
//! whatever neither sets.

use std::path::{Path, PathBuf};

use ballexp::systems::{CorpusTag, SpaceKind};
use ballexp::{Caps, Error, NetSpace, Point, Rational, Result, SystemDef};
use clap::Args;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const OUT_ENV: &str = "BALLEXP_OUT";
const DEFAULT_OUT: &str = "ballexp-out";

pub fn rational(text: &str) -> std::result::Result<Rational, String> {
    Rational::parse(text).map_err(|e| e.to_string())
}

fn positive(text: &str) -> std::result::Result<usize, String> {
    match text.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct Common {
    /// JSON config file; flags override its values
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Corpus system: ex21, ex21_product, ex22, tent, doubling, logistic, shift
    #[arg(long, global = true)]
    pub system: Option<String>,

    /// System definition file (JSON), instead of --system
    #[arg(long, global = true)]
    pub spec: Option<PathBuf>,

    /// Truncation depth for ex21, ex22 and ex21_product
    #[arg(long = "N", global = true)]
    #[serde(rename = "N")]
    pub depth: Option<u32>,

    /// Word length for shift, number of factors for ex21_product
    #[arg(long, global = true)]
    pub m: Option<usize>,

    /// Replace the map by its i-th iterate
    #[arg(long, global = true)]
    pub iterate: Option<u32>,

    /// Net resolution (dyadic depth on continua)
    #[arg(long, global = true)]
    pub res: Option<u32>,

    /// Report directory; defaults to $BALLEXP_OUT, then ./ballexp-out
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Largest net allowed; defaults to 500000
    #[arg(long, global = true, value_parser = positive)]
    pub net_cap: Option<usize>,

    /// Most graph edges allowed; defaults to 20000000
    #[arg(long, global = true, value_parser = positive)]
    pub edge_cap: Option<usize>,

    /// Most chains enumerated; defaults to 2000000
    #[arg(long, global = true, value_parser = positive)]
    pub chain_cap: Option<usize>,

    /// Most iterations of a single orbit; defaults to 1048576
    #[arg(long, global = true, value_parser = positive)]
    pub iterate_cap: Option<usize>,
}

/// Reads the config file, if any, as a flat JSON object.
pub fn load_file(path: Option<&Path>) -> Result<Map<String, Value>> {
    let Some(path) = path else { return Ok(Map::new()) };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(Error::Parse(format!("{}: config must be a JSON object", path.display()))),
        Err(e) => Err(Error::Parse(format!("{}: {e}", path.display()))),
    }
}

/// Overlays the flags that were given (non-null, non-empty) on the file
/// values and re-reads the result.
pub fn resolve<T: Serialize + DeserializeOwned>(flags: &T, file: &Map<String, Value>) -> Result<T> {
    let mut merged = file.clone();
    if let Value::Object(set) = serde_json::to_value(flags).map_err(|e| Error::Parse(e.to_string()))? {
        let given = set.into_iter().filter(|(_, v)| !v.is_null() && v.as_array().is_none_or(|a| !a.is_empty()));
        merged.extend(given);
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| Error::Parse(format!("config: {e}")))
}

impl Common {
    pub fn caps(&self) -> Caps {
        let d = Caps::default();
        Caps {
            net_size: self.net_cap.unwrap_or(d.net_size),
            edges: self.edge_cap.unwrap_or(d.edges),
            chains: self.chain_cap.unwrap_or(d.chains),
            iterates: self.iterate_cap.unwrap_or(d.iterates),
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }

    pub fn resolution(&self) -> u32 {
        self.res.unwrap_or(6)
    }

    pub fn system(&self) -> Result<SystemDef> {
        let base = match (&self.spec, &self.system) {
            (Some(_), Some(_)) => return Err(Error::Precondition("give --system or --spec, not both".into())),
            (Some(path), None) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
                SystemDef::from_json(&text)?
            }
            (None, Some(tag)) => match tag.parse::<CorpusTag>()? {
                CorpusTag::Ex21 => SystemDef::ex21(self.depth.unwrap_or(8)),
                CorpusTag::Ex22 => SystemDef::ex22(self.depth.unwrap_or(4)),
                CorpusTag::Ex21Product => SystemDef::ex21_product(self.m.unwrap_or(3), self.depth.unwrap_or(6)),
                CorpusTag::Shift => SystemDef::shift(self.m.unwrap_or(8)),
                CorpusTag::Tent => SystemDef::tent(),
                CorpusTag::Doubling => SystemDef::doubling(),
                CorpusTag::Logistic => SystemDef::logistic(),
            },
            (None, None) => return Err(Error::Precondition("no system: pass --system or --spec".into())),
        };
        base.validate()?;
        match self.iterate {
            None | Some(1) => Ok(base),
            Some(0) => Err(Error::Precondition("--iterate must be at least 1".into())),
            Some(i) => base.iterate(i),
        }
    }

    pub fn net(&self, system: &SystemDef) -> Result<NetSpace> {
        NetSpace::build_capped(&system.space, self.resolution(), &self.caps())
    }
}

/// A point of `system`'s space: a rational, or for word spaces a string of
/// digits (`10110`) or a comma-separated list of symbols. Short shift words
/// are zero-padded.
pub fn point(system: &SystemDef, text: &str) -> Result<Point> {
    let p = match &system.space.kind {
        SpaceKind::Circle => Point::circle(Rational::parse(text)?.fract_unit())?,
        SpaceKind::WordShift { m, .. } => {
            let mut w = symbols(text)?;
            if w.len() < *m {
                w.resize(*m, Rational::zero());
            }
            Point::word(w)
        }
        SpaceKind::Ex21Product { .. } => Point::word(symbols(text)?),
        _ => Point::real(Rational::parse(text)?),
    };
    system.space.ensure_contains(&p)?;
    Ok(p)
}

fn symbols(text: &str) -> Result<Vec<Rational>> {
    let t = text.trim().trim_start_matches('(').trim_end_matches(')');
    if t.contains(',') {
        t.split(',').map(Rational::parse).collect()
    } else {
        t.chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| Rational::integer(d as i64))
                    .ok_or_else(|| Error::Parse(format!("bad symbol `{c}` in `{text}`")))
            })
            .collect()
    }
}

/// Intervals `a:b` for interval and circle maps, cylinder prefixes for shifts;
/// several parts are separated by `;`.
pub fn region(system: &SystemDef, text: &str) -> Result<ballexp::globalprops::Region> {
    use ballexp::globalprops::Region;
    let parts = text.split(';').map(str::trim).filter(|s| !s.is_empty());
    if matches!(system.space.kind, SpaceKind::WordShift { .. }) {
        return Ok(Region::Cylinders(parts.map(symbols).collect::<Result<_>>()?));
    }
    let intervals = parts
        .map(|p| {
            let (a, b) = p
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("interval `{p}` should read a:b")))?;
            Ok((Rational::parse(a)?, Rational::parse(b)?))
        })
        .collect::<Result<Vec<_>>>()?;
    if intervals.is_empty() {
        return Err(Error::Parse("empty region".into()));
    }
    Ok(Region::Intervals(intervals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ballexp::q;

    #[test]
    fn flags_override_file() {
        let file: Map<String, Value> =
            serde_json::from_str(r#"{"system": "ex21", "N": 5, "res": 3, "unrelated": 1}"#).unwrap();
        let flags = Common { res: Some(7), ..Common::default() };
        let c = resolve(&flags, &file).unwrap();
        assert_eq!((c.system.as_deref(), c.depth, c.res), (Some("ex21"), Some(5), Some(7)));
    }

    #[test]
    fn corpus_defaults_and_iterates() {
        let c = Common { system: Some("tent".into()), iterate: Some(2), ..Common::default() };
        let s = c.system().unwrap();
        assert_eq!(s.iterate_count(), 2);
        let bad = Common { system: Some("henon".into()), ..Common::default() };
        assert!(matches!(bad.system(), Err(Error::Parse(_))));
    }

    #[test]
    fn points_and_regions() {
        let shift = SystemDef::shift(5);
        assert_eq!(point(&shift, "101").unwrap(), Point::word(vec![q("1"), q("0"), q("1"), q("0"), q("0")]));
        assert_eq!(point(&SystemDef::tent(), "0.25").unwrap(), Point::real(q("1/4")));
        assert!(point(&SystemDef::tent(), "3/2").is_err());
        let r = region(&SystemDef::tent(), "0:1/64; 1/2:9/16").unwrap();
        assert_eq!(r, ballexp::globalprops::Region::Intervals(vec![(q("0"), q("1/64")), (q("1/2"), q("9/16"))]));
        assert!(region(&SystemDef::tent(), "0-1").is_err());
    }
}
