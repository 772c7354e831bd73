use serde::{Deserialize, Serialize};

use crate::numerics::Rational;

/// One affine piece `x ↦ slope·x + intercept` on the closed interval `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Branch {
    pub lo: Rational,
    pub hi: Rational,
    pub slope: Rational,
    pub intercept: Rational,
}

impl Branch {
    pub fn new(lo: Rational, hi: Rational, slope: Rational, intercept: Rational) -> Branch {
        Branch { lo, hi, slope, intercept }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        *x >= self.lo && *x <= self.hi
    }

    pub fn apply(&self, x: &Rational) -> Rational {
        &self.slope * x + &self.intercept
    }

    /// Image of the whole branch interval as `(min, max)`.
    pub fn image(&self) -> (Rational, Rational) {
        let a = self.apply(&self.lo);
        let b = self.apply(&self.hi);
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// Sub-interval of the branch mapped into `[lo, hi]`, if nonempty.
    pub fn preimage(&self, lo: &Rational, hi: &Rational) -> Option<(Rational, Rational)> {
        if self.slope.is_zero() {
            return (self.intercept >= *lo && self.intercept <= *hi)
                .then(|| (self.lo.clone(), self.hi.clone()));
        }
        let a = (lo - &self.intercept).checked_div(&self.slope).unwrap();
        let b = (hi - &self.intercept).checked_div(&self.slope).unwrap();
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let a = a.max(self.lo.clone());
        let b = b.min(self.hi.clone());
        (a <= b).then_some((a, b))
    }
}

/// A branch of an iterate together with the base-branch itinerary that
/// produced it: `code[t]` is the base branch containing the `t`-th iterate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodedBranch {
    pub branch: Branch,
    pub code: Vec<usize>,
}

/// Symbolic `times`-fold composition of a piecewise-affine map.
///
/// On the circle, intermediate values are taken mod 1 between steps: each
/// composed piece is split where the running value crosses an integer.
pub fn compose_branches(base: &[Branch], times: u32, circle: bool) -> Vec<CodedBranch> {
    let mut pieces: Vec<CodedBranch> = base
        .iter()
        .enumerate()
        .map(|(i, b)| CodedBranch { branch: b.clone(), code: vec![i] })
        .collect();
    if circle {
        pieces = pieces.into_iter().flat_map(split_mod_one).collect();
    }
    for _ in 1..times {
        let mut next = Vec::new();
        for p in &pieces {
            for (bi, b) in base.iter().enumerate() {
                let Some((lo, hi)) = p.branch.preimage(&b.lo, &b.hi) else {
                    continue;
                };
                let slope = &b.slope * &p.branch.slope;
                let intercept = &b.slope * &p.branch.intercept + &b.intercept;
                let mut code = p.code.clone();
                code.push(bi);
                let piece = CodedBranch { branch: Branch::new(lo, hi, slope, intercept), code };
                if circle {
                    next.extend(split_mod_one(piece));
                } else {
                    next.push(piece);
                }
            }
        }
        pieces = next;
    }
    pieces
}

/// Split a piece so that on each part the value lies in `[k, k+1]` for one
/// integer `k`, then shift by `-k`.
fn split_mod_one(p: CodedBranch) -> Vec<CodedBranch> {
    let b = &p.branch;
    let (vmin, vmax) = b.image();
    let k0 = vmin.floor();
    let k1 = {
        let f = vmax.floor();
        if f == vmax && f > k0 {
            f - Rational::one()
        } else {
            f
        }
    };
    let mut out = Vec::new();
    let mut k = k0;
    while k <= k1 {
        let top = &k + Rational::one();
        if let Some((lo, hi)) = b.preimage(&k, &top) {
            out.push(CodedBranch {
                branch: Branch::new(lo, hi, b.slope.clone(), &b.intercept - &k),
                code: p.code.clone(),
            });
        }
        k = k + Rational::one();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::q;

    fn tent() -> Vec<Branch> {
        vec![
            Branch::new(q("0"), q("1/2"), q("2"), q("0")),
            Branch::new(q("1/2"), q("1"), q("-2"), q("2")),
        ]
    }

    #[test]
    fn tent_square_has_four_laps() {
        let c = compose_branches(&tent(), 2, false);
        assert_eq!(c.len(), 4);
        let at = |x: &str| {
            let x = q(x);
            c.iter().find(|p| p.branch.contains(&x)).unwrap().branch.apply(&x)
        };
        assert_eq!(at("1/8"), q("1/2"));
        assert_eq!(at("3/8"), q("1/2"));
        assert_eq!(at("1/2"), q("0"));
    }

    #[test]
    fn doubling_square_is_mod_one() {
        let dbl = vec![
            Branch::new(q("0"), q("1/2"), q("2"), q("0")),
            Branch::new(q("1/2"), q("1"), q("2"), q("-1")),
        ];
        let c = compose_branches(&dbl, 2, true);
        let x = q("3/8");
        let v = c.iter().find(|p| p.branch.contains(&x)).unwrap().branch.apply(&x);
        assert_eq!(v.fract_unit(), q("1/2"));
    }
}
