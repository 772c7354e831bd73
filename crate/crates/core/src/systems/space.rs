use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{MetricKind, Point, Rational};

/// The spaces a system can live on. Countable and product spaces carry an
/// explicit truncation depth that is echoed in every report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceKind {
    /// `[0, 1]`.
    Interval01,
    /// `{0} ∪ {2^-n : 0 ≤ n ≤ depth}`.
    Ex21Set { depth: u32 },
    /// `{0, 2} ∪ ⋃_{1≤n≤depth} [4^-n, 2·4^-n]`.
    Ex22Set { depth: u32 },
    /// Unit-circumference circle, parameter in `[0, 1)`.
    Circle,
    /// Zero-padded words of length `m` over a finite alphabet containing 0.
    WordShift { m: usize, alphabet: Vec<Rational> },
    /// `m`-tuples over `Ex21Set { depth }` with the weighted sup metric.
    Ex21Product { m: usize, depth: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceSpec {
    #[serde(flatten)]
    pub kind: SpaceKind,
    #[serde(default)]
    pub description: String,
}

impl SpaceSpec {
    pub fn new(kind: SpaceKind) -> SpaceSpec {
        let description = match &kind {
            SpaceKind::Interval01 => "unit interval [0,1]".to_string(),
            SpaceKind::Ex21Set { depth } => format!("{{0}} ∪ {{2^-n : 0 ≤ n ≤ {depth}}}"),
            SpaceKind::Ex22Set { depth } => {
                format!("{{0,2}} ∪ ⋃_{{1≤n≤{depth}}} [4^-n, 2·4^-n]")
            }
            SpaceKind::Circle => "unit-circumference circle".to_string(),
            SpaceKind::WordShift { m, alphabet } => {
                format!("zero-padded words of length {m} over {} symbols", alphabet.len())
            }
            SpaceKind::Ex21Product { m, depth } => {
                format!("{m}-fold product of {{0}} ∪ {{2^-n : n ≤ {depth}}}")
            }
        };
        SpaceSpec { kind, description }
    }

    pub fn interval01() -> SpaceSpec {
        SpaceSpec::new(SpaceKind::Interval01)
    }

    pub fn circle() -> SpaceSpec {
        SpaceSpec::new(SpaceKind::Circle)
    }

    pub fn ex21_set(depth: u32) -> SpaceSpec {
        SpaceSpec::new(SpaceKind::Ex21Set { depth })
    }

    pub fn ex22_set(depth: u32) -> SpaceSpec {
        SpaceSpec::new(SpaceKind::Ex22Set { depth })
    }

    /// Binary words of length `m`.
    pub fn binary_words(m: usize) -> SpaceSpec {
        SpaceSpec::word_shift(m, vec![Rational::zero(), Rational::one()])
    }

    pub fn word_shift(m: usize, alphabet: Vec<Rational>) -> SpaceSpec {
        SpaceSpec::new(SpaceKind::WordShift { m, alphabet })
    }

    pub fn ex21_product(m: usize, depth: u32) -> SpaceSpec {
        SpaceSpec::new(SpaceKind::Ex21Product { m, depth })
    }

    /// The same family truncated `extra` levels deeper; unchanged for the
    /// continua.
    pub fn deepened(&self, extra: u32) -> SpaceSpec {
        let kind = match &self.kind {
            SpaceKind::Ex21Set { depth } => SpaceKind::Ex21Set { depth: depth + extra },
            SpaceKind::Ex22Set { depth } => SpaceKind::Ex22Set { depth: depth + extra },
            SpaceKind::WordShift { m, alphabet } => {
                SpaceKind::WordShift { m: m + extra as usize, alphabet: alphabet.clone() }
            }
            SpaceKind::Ex21Product { m, depth } => SpaceKind::Ex21Product { m: *m, depth: depth + extra },
            other => return SpaceSpec { kind: other.clone(), description: self.description.clone() },
        };
        SpaceSpec::new(kind)
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            SpaceKind::Ex21Set { depth } | SpaceKind::Ex22Set { depth } if *depth < 1 => {
                Err(Error::Precondition("space depth must be ≥ 1".into()))
            }
            SpaceKind::WordShift { m, alphabet } => {
                if *m < 1 {
                    return Err(Error::Precondition("word length must be ≥ 1".into()));
                }
                if !alphabet.iter().any(Rational::is_zero) {
                    return Err(Error::Precondition(
                        "alphabet must contain the padding symbol 0".into(),
                    ));
                }
                let mut sorted = alphabet.clone();
                sorted.sort();
                sorted.dedup();
                if sorted.len() != alphabet.len() {
                    return Err(Error::Precondition("alphabet symbols must be distinct".into()));
                }
                Ok(())
            }
            SpaceKind::Ex21Product { m, depth } if *m < 1 || *depth < 1 => Err(
                Error::Precondition("product length and depth must be ≥ 1".into()),
            ),
            _ => Ok(()),
        }
    }

    pub fn metric_kind(&self) -> MetricKind {
        match self.kind {
            SpaceKind::Interval01 | SpaceKind::Ex21Set { .. } | SpaceKind::Ex22Set { .. } => {
                MetricKind::Interval
            }
            SpaceKind::Circle => MetricKind::Circle,
            SpaceKind::WordShift { .. } | SpaceKind::Ex21Product { .. } => MetricKind::Word,
        }
    }

    /// Short tag of the space family, ignoring depths.
    pub fn family(&self) -> &'static str {
        match self.kind {
            SpaceKind::Interval01 => "interval01",
            SpaceKind::Ex21Set { .. } => "ex21_set",
            SpaceKind::Ex22Set { .. } => "ex22_set",
            SpaceKind::Circle => "circle",
            SpaceKind::WordShift { .. } => "word_shift",
            SpaceKind::Ex21Product { .. } => "ex21_product",
        }
    }

    /// Word length for word spaces.
    pub fn word_len(&self) -> Option<usize> {
        match self.kind {
            SpaceKind::WordShift { m, .. } | SpaceKind::Ex21Product { m, .. } => Some(m),
            _ => None,
        }
    }

    /// Sorted per-coordinate symbol set of a word space.
    pub fn factor_points(&self) -> Option<Vec<Rational>> {
        match &self.kind {
            SpaceKind::WordShift { alphabet, .. } => {
                let mut a = alphabet.clone();
                a.sort();
                Some(a)
            }
            SpaceKind::Ex21Product { depth, .. } => Some(ex21_points(*depth)),
            _ => None,
        }
    }

    /// Whether the space has no isolated points.
    pub fn is_perfect(&self) -> bool {
        match &self.kind {
            SpaceKind::Interval01 | SpaceKind::Circle => true,
            SpaceKind::WordShift { alphabet, .. } => alphabet.len() >= 2,
            _ => false,
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match (&self.kind, p) {
            (SpaceKind::Interval01, Point::Real(x)) => in_unit(x),
            (SpaceKind::Circle, Point::Circle(x)) => !x.is_negative() && *x < Rational::one(),
            (SpaceKind::Ex21Set { depth }, Point::Real(x)) => in_ex21(x, *depth),
            (SpaceKind::Ex22Set { depth }, Point::Real(x)) => ex22_piece(x, *depth).is_some(),
            (SpaceKind::WordShift { m, alphabet }, Point::Word(c)) => {
                c.len() == *m && c.iter().all(|v| alphabet.contains(v))
            }
            (SpaceKind::Ex21Product { m, depth }, Point::Word(c)) => {
                c.len() == *m && c.iter().all(|v| in_ex21(v, *depth))
            }
            _ => false,
        }
    }

    pub fn ensure_contains(&self, p: &Point) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::Domain(format!("{p} is not in {}", self.description)))
        }
    }

    /// Whether a target point lies in the truncation layer: its exact
    /// preimages under `gain` applications of the corpus map sit deeper than
    /// the candidate space keeps, so coverage cannot be tested for it.
    ///
    /// Only countable and word spaces have such a layer; continuum spaces
    /// report `false`.
    pub fn in_truncation_layer(&self, candidate: &SpaceSpec, y: &Point, gain: u32) -> bool {
        match (&self.kind, &candidate.kind, y) {
            (SpaceKind::Ex21Set { .. }, SpaceKind::Ex21Set { depth }, Point::Real(x)) => {
                ex21_layer(x, *depth, gain)
            }
            (SpaceKind::Ex22Set { .. }, SpaceKind::Ex22Set { depth }, Point::Real(x)) => {
                match ex22_piece(x, u32::MAX) {
                    Some(Ex22Piece::Interval(n)) => n + gain > *depth,
                    _ => false,
                }
            }
            (SpaceKind::WordShift { .. }, SpaceKind::WordShift { m, .. }, w @ Point::Word(_)) => {
                w.support_len() + gain as usize > *m
            }
            (SpaceKind::Ex21Product { .. }, SpaceKind::Ex21Product { depth, .. }, Point::Word(c)) => {
                c.iter().any(|x| ex21_layer(x, *depth, gain))
            }
            _ => false,
        }
    }
}

fn in_unit(x: &Rational) -> bool {
    !x.is_negative() && *x <= Rational::one()
}

fn in_ex21(x: &Rational, depth: u32) -> bool {
    if x.is_zero() {
        return true;
    }
    matches!(x.log2_exact(), Some(e) if e <= 0 && -e <= depth as i64)
}

fn ex21_layer(x: &Rational, candidate_depth: u32, gain: u32) -> bool {
    match x.log2_exact() {
        // 1 is its own preimage
        Some(e) if e < 0 => (-e) as u64 + gain as u64 > candidate_depth as u64,
        _ => false,
    }
}

/// The points of `{0} ∪ {2^-n : n ≤ depth}` in increasing order.
pub fn ex21_points(depth: u32) -> Vec<Rational> {
    let mut v = vec![Rational::zero()];
    for n in (0..=depth).rev() {
        v.push(Rational::pow2(-(n as i32)));
    }
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Ex22Piece {
    Zero,
    Two,
    Interval(u32),
}

/// Which part of the ex22 space `x` belongs to, if any.
pub(crate) fn ex22_piece(x: &Rational, depth: u32) -> Option<Ex22Piece> {
    if x.is_zero() {
        return Some(Ex22Piece::Zero);
    }
    if *x == Rational::integer(2) {
        return Some(Ex22Piece::Two);
    }
    if !x.is_positive() || *x > Rational::new(1, 2) {
        return None;
    }
    // 4^-n ≤ x ≤ 2·4^-n  ⇔  n = ceil(-log4(x)) candidate check
    let mut n = 1u32;
    let mut lo = Rational::new(1, 4);
    loop {
        if n > depth {
            return None;
        }
        let hi = &lo * Rational::integer(2);
        if *x >= lo && *x <= hi {
            return Some(Ex22Piece::Interval(n));
        }
        if *x > hi {
            return None;
        }
        n += 1;
        lo = lo * Rational::new(1, 4);
        if n > 200 && depth == u32::MAX {
            return None;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::q;

    #[test]
    fn membership() {
        let s = SpaceSpec::ex21_set(3);
        assert!(s.contains(&Point::Real(q("1/8"))));
        assert!(!s.contains(&Point::Real(q("1/16"))));
        assert!(!s.contains(&Point::Real(q("3/8"))));
        let e = SpaceSpec::ex22_set(2);
        assert!(e.contains(&Point::Real(q("3/8"))));
        assert!(e.contains(&Point::Real(q("1/16"))));
        assert!(e.contains(&Point::Real(q("2"))));
        assert!(!e.contains(&Point::Real(q("1/64"))));
        assert!(!e.contains(&Point::Real(q("3/16"))));
    }

    #[test]
    fn truncation_layers() {
        let t = SpaceSpec::ex21_set(8);
        assert!(t.in_truncation_layer(&t, &Point::Real(q("1/256")), 1));
        assert!(!t.in_truncation_layer(&t, &Point::Real(q("1/128")), 1));
        assert!(!t.in_truncation_layer(&t, &Point::Real(q("1")), 1));
        assert!(!t.in_truncation_layer(&t, &Point::Real(q("0")), 1));
        let w8 = SpaceSpec::binary_words(8);
        let w9 = SpaceSpec::binary_words(9);
        let y = Point::Word(vec![q("0"), q("0"), q("0"), q("0"), q("0"), q("0"), q("0"), q("1")]);
        assert!(w8.in_truncation_layer(&w8, &y, 1));
        assert!(!w8.in_truncation_layer(&w9, &y, 1));
    }

    #[test]
    fn validation() {
        assert!(SpaceSpec::word_shift(3, vec![q("1"), q("2")]).validate().is_err());
        assert!(SpaceSpec::ex21_set(0).validate().is_err());
        assert!(SpaceSpec::binary_words(3).validate().is_ok());
    }

    #[test]
    fn spec_json_form() {
        let s: SpaceSpec = serde_json::from_str(r#"{"kind":"ex21_set","depth":3}"#).unwrap();
        assert_eq!(s.kind, SpaceKind::Ex21Set { depth: 3 });
        let w: SpaceSpec =
            serde_json::from_str(r#"{"kind":"word_shift","m":2,"alphabet":["0/1","1/1"]}"#)
                .unwrap();
        assert_eq!(w.word_len(), Some(2));
    }
}
