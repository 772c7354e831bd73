//! Points and the three metric families.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::Rational;
use crate::error::{Error, Result};

/// A point of one of the supported spaces.
///
/// The derived ordering is the canonical total order used for every
/// tie-break in the crate: numeric on the single coordinate, lexicographic
/// on words.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Point {
    Real(Rational),
    /// Unit-circumference circle parameter in `[0, 1)`.
    Circle(Rational),
    /// Finite word; coordinate `j` (1-based) carries weight `2^{-j}`.
    Word(Vec<Rational>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Interval,
    Circle,
    Word,
}

impl Point {
    pub fn real(x: Rational) -> Point {
        Point::Real(x)
    }

    pub fn circle(x: Rational) -> Result<Point> {
        if x.is_negative() || x >= Rational::one() {
            return Err(Error::Domain(format!("circle parameter {x} outside [0,1)")));
        }
        Ok(Point::Circle(x))
    }

    pub fn word(coords: Vec<Rational>) -> Point {
        Point::Word(coords)
    }

    pub fn metric_kind(&self) -> MetricKind {
        match self {
            Point::Real(_) => MetricKind::Interval,
            Point::Circle(_) => MetricKind::Circle,
            Point::Word(_) => MetricKind::Word,
        }
    }

    /// The scalar coordinate of a real or circle point.
    pub fn scalar(&self) -> Option<&Rational> {
        match self {
            Point::Real(x) | Point::Circle(x) => Some(x),
            Point::Word(_) => None,
        }
    }

    pub fn coords(&self) -> Option<&[Rational]> {
        match self {
            Point::Word(c) => Some(c),
            _ => None,
        }
    }

    /// Zero-pad a word to `depth` coordinates; other points are returned unchanged.
    pub fn padded(&self, depth: usize) -> Point {
        match self {
            Point::Word(c) if c.len() < depth => {
                let mut c = c.clone();
                c.resize(depth, Rational::zero());
                Point::Word(c)
            }
            other => other.clone(),
        }
    }

    /// Index of the last nonzero coordinate plus one (0 for the zero word).
    pub fn support_len(&self) -> usize {
        match self {
            Point::Word(c) => c.iter().rposition(|v| !v.is_zero()).map_or(0, |i| i + 1),
            _ => 0,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Real(x) => write!(f, "{x}"),
            Point::Circle(x) => write!(f, "{x} (mod 1)"),
            Point::Word(c) => {
                write!(f, "(")?;
                for (i, v) in c.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Weight `2^{-j}` of the 1-based word coordinate `j`.
pub fn word_weight(j: usize) -> Rational {
    Rational::pow2(-(j as i32))
}

/// Exact distance between two points of the same space kind.
///
/// * interval: `|p - q|`
/// * circle: `min(|p - q|, 1 - |p - q|)`
/// * word: `max_j 2^{-j} |p_j - q_j|`, words of equal length only
pub fn metric_dist(kind: MetricKind, p: &Point, q: &Point) -> Result<Rational> {
    match (kind, p, q) {
        (MetricKind::Interval, Point::Real(a), Point::Real(b)) => Ok((a - b).abs()),
        (MetricKind::Circle, Point::Circle(a), Point::Circle(b)) => Ok(circle_dist(a, b)),
        (MetricKind::Word, Point::Word(a), Point::Word(b)) => {
            if a.len() != b.len() {
                return Err(Error::Shape(format!(
                    "word depths differ: {} vs {}",
                    a.len(),
                    b.len()
                )));
            }
            Ok(word_dist(a, b))
        }
        _ => Err(Error::Shape(format!(
            "cannot measure {p} and {q} with the {kind:?} metric"
        ))),
    }
}

/// Distance without shape checks; words of unequal length compare as zero padded.
pub fn dist(p: &Point, q: &Point) -> Rational {
    match (p, q) {
        (Point::Real(a), Point::Real(b)) => (a - b).abs(),
        (Point::Circle(a), Point::Circle(b)) => circle_dist(a, b),
        (Point::Word(a), Point::Word(b)) => word_dist(a, b),
        _ => panic!("distance between points of different kinds: {p} / {q}"),
    }
}

fn circle_dist(a: &Rational, b: &Rational) -> Rational {
    let d = (a - b).abs().fract_unit();
    let other = Rational::one() - &d;
    d.min(other)
}

fn word_dist(a: &[Rational], b: &[Rational]) -> Rational {
    let zero = Rational::zero();
    let n = a.len().max(b.len());
    let mut best = Rational::zero();
    let mut weight = Rational::one();
    let half = Rational::new(1, 2);
    for j in 0..n {
        weight = weight * &half;
        let x = a.get(j).unwrap_or(&zero);
        let y = b.get(j).unwrap_or(&zero);
        if x != y {
            let term = (x - y).abs() * &weight;
            if term > best {
                best = term;
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn w(v: &[i64]) -> Point {
        Point::Word(v.iter().map(|&x| Rational::integer(x)).collect())
    }

    #[test]
    fn spec_distance_examples() {
        let c0 = Point::Circle(r("0"));
        let c34 = Point::Circle(r("3/4"));
        assert_eq!(metric_dist(MetricKind::Circle, &c0, &c34).unwrap(), r("1/4"));
        assert_eq!(
            metric_dist(MetricKind::Word, &w(&[1, 0, 0]), &w(&[0, 0, 0])).unwrap(),
            r("1/2")
        );
        assert_eq!(
            metric_dist(
                MetricKind::Interval,
                &Point::Real(r("7/8")),
                &Point::Real(r("15/16"))
            )
            .unwrap(),
            r("1/16")
        );
    }

    #[test]
    fn shape_errors() {
        assert!(matches!(
            metric_dist(MetricKind::Word, &w(&[1, 0]), &w(&[1, 0, 0])),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            metric_dist(MetricKind::Interval, &Point::Real(r("0")), &Point::Circle(r("0"))),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn padded_words_match_infinite_metric() {
        // finitely many nonzero terms: the supremum is attained within the support
        let a = w(&[1, 0, 1]);
        let b = w(&[1, 1]);
        assert_eq!(dist(&a, &b), r("1/4"));
        assert_eq!(dist(&a.padded(6), &b.padded(6)), r("1/4"));
        assert_eq!(a.support_len(), 3);
        assert_eq!(w(&[0, 0]).support_len(), 0);
    }

    #[test]
    fn circle_constructor_rejects_one() {
        assert!(Point::circle(r("1")).is_err());
        assert!(Point::circle(r("-1/2")).is_err());
    }
}
