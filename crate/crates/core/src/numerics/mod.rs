//! Exact rational scalars, points and metrics.

mod point;
mod rational;

pub use point::{dist, metric_dist, word_weight, MetricKind, Point};
pub use rational::{gcd, Rational};

/// Shorthand for literals in tests and examples: `q("3/8")`.
///
/// Panics on malformed input.
pub fn q(text: &str) -> Rational {
    Rational::parse(text).unwrap_or_else(|e| panic!("{e}"))
}
