use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::affine::{compose_branches, Branch, CodedBranch};
use super::space::{ex22_piece, Ex22Piece, SpaceKind, SpaceSpec};
use crate::error::{Error, Result};
use crate::numerics::{Point, Rational};

/// The built-in example maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorpusTag {
    Ex21,
    Ex21Product,
    Ex22,
    Tent,
    Doubling,
    Logistic,
    Shift,
}

impl CorpusTag {
    pub const ALL: [CorpusTag; 7] = [
        CorpusTag::Ex21,
        CorpusTag::Ex21Product,
        CorpusTag::Ex22,
        CorpusTag::Tent,
        CorpusTag::Doubling,
        CorpusTag::Logistic,
        CorpusTag::Shift,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CorpusTag::Ex21 => "ex21",
            CorpusTag::Ex21Product => "ex21_product",
            CorpusTag::Ex22 => "ex22",
            CorpusTag::Tent => "tent",
            CorpusTag::Doubling => "doubling",
            CorpusTag::Logistic => "logistic",
            CorpusTag::Shift => "shift",
        }
    }
}

impl fmt::Display for CorpusTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CorpusTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<CorpusTag> {
        CorpusTag::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown corpus system `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapKind {
    Corpus { tag: CorpusTag },
    PiecewiseAffine { branches: Vec<Branch> },
    Iterate { base: Box<MapKind>, times: u32 },
}

/// A named map on a space with exact evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemDef {
    pub name: String,
    pub space: SpaceSpec,
    pub map: MapKind,
}

impl SystemDef {
    fn corpus(tag: CorpusTag, space: SpaceSpec) -> SystemDef {
        SystemDef { name: tag.name().to_string(), space, map: MapKind::Corpus { tag } }
    }

    /// `x ↦ 1 − |1 − 2x|` on `[0, 1]`.
    pub fn tent() -> SystemDef {
        SystemDef::corpus(CorpusTag::Tent, SpaceSpec::interval01())
    }

    /// `x ↦ 2x mod 1` on the unit circle.
    pub fn doubling() -> SystemDef {
        SystemDef::corpus(CorpusTag::Doubling, SpaceSpec::circle())
    }

    /// `x ↦ 4x(1 − x)` on `[0, 1]`.
    pub fn logistic() -> SystemDef {
        SystemDef::corpus(CorpusTag::Logistic, SpaceSpec::interval01())
    }

    /// Doubling on `{0} ∪ {2^-n}` with `1` fixed.
    pub fn ex21(depth: u32) -> SystemDef {
        SystemDef::corpus(CorpusTag::Ex21, SpaceSpec::ex21_set(depth))
    }

    /// `4x` on the small intervals, everything else collapsing to `2`.
    pub fn ex22(depth: u32) -> SystemDef {
        SystemDef::corpus(CorpusTag::Ex22, SpaceSpec::ex22_set(depth))
    }

    /// Left shift on binary words of length `m`.
    pub fn shift(m: usize) -> SystemDef {
        SystemDef::corpus(CorpusTag::Shift, SpaceSpec::binary_words(m))
    }

    pub fn shift_on(space: SpaceSpec) -> Result<SystemDef> {
        if !matches!(space.kind, SpaceKind::WordShift { .. }) {
            return Err(Error::Shape("shift needs a word space".into()));
        }
        Ok(SystemDef::corpus(CorpusTag::Shift, space))
    }

    /// The ex21 map applied coordinatewise to `m`-tuples.
    pub fn ex21_product(m: usize, depth: u32) -> SystemDef {
        SystemDef::corpus(CorpusTag::Ex21Product, SpaceSpec::ex21_product(m, depth))
    }

    /// A user map from explicit branches; validated against the space.
    pub fn piecewise_affine(name: &str, space: SpaceSpec, branches: Vec<Branch>) -> Result<SystemDef> {
        let sys = SystemDef {
            name: name.to_string(),
            space,
            map: MapKind::PiecewiseAffine { branches },
        };
        sys.validate()?;
        Ok(sys)
    }

    pub fn from_json(text: &str) -> Result<SystemDef> {
        let sys: SystemDef = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        sys.validate()?;
        Ok(sys)
    }

    pub fn validate(&self) -> Result<()> {
        self.space.validate()?;
        validate_map(&self.map, &self.space)
    }

    /// The same map on [`SpaceSpec::deepened`].
    pub fn deepened(&self, extra: u32) -> Result<SystemDef> {
        let sys = SystemDef { space: self.space.deepened(extra), ..self.clone() };
        sys.validate()?;
        Ok(sys)
    }

    /// The corpus tag of the innermost map, if any.
    pub fn corpus_tag(&self) -> Option<CorpusTag> {
        fn inner(m: &MapKind) -> Option<CorpusTag> {
            match m {
                MapKind::Corpus { tag } => Some(*tag),
                MapKind::Iterate { base, .. } => inner(base),
                MapKind::PiecewiseAffine { .. } => None,
            }
        }
        inner(&self.map)
    }

    /// How many applications of the underlying map one step represents.
    pub fn iterate_count(&self) -> u32 {
        fn count(m: &MapKind) -> u32 {
            match m {
                MapKind::Iterate { base, times } => count(base) * times,
                _ => 1,
            }
        }
        count(&self.map)
    }

    /// The `i`-fold composition.
    pub fn iterate(&self, i: u32) -> Result<SystemDef> {
        if i < 1 {
            return Err(Error::Precondition("iterate count must be ≥ 1".into()));
        }
        if i == 1 {
            return Ok(self.clone());
        }
        let (base, times) = match &self.map {
            MapKind::Iterate { base, times } => ((**base).clone(), times * i),
            other => (other.clone(), i),
        };
        Ok(SystemDef {
            name: format!("{}^{}", self.base_name(), times),
            space: self.space.clone(),
            map: MapKind::Iterate { base: Box::new(base), times },
        })
    }

    fn base_name(&self) -> &str {
        match self.name.split_once('^') {
            Some((b, _)) if matches!(self.map, MapKind::Iterate { .. }) => b,
            _ => &self.name,
        }
    }

    /// Exact image of a space point.
    pub fn eval(&self, p: &Point) -> Result<Point> {
        self.space.ensure_contains(p)?;
        eval_map(&self.map, &self.space, p)
    }

    /// Exact image without the membership check; callers guarantee `p`
    /// lies in the space (net points, exact orbits).
    pub fn eval_unchecked(&self, p: &Point) -> Point {
        eval_map(&self.map, &self.space, p).expect("point in space")
    }

    /// Exact orbit `x, f(x), …, f^n(x)`.
    pub fn orbit(&self, p: &Point, n: usize) -> Result<Vec<Point>> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(p.clone());
        for _ in 0..n {
            let next = self.eval(out.last().unwrap())?;
            out.push(next);
        }
        Ok(out)
    }

    /// Branches of the base map, when it is piecewise affine.
    pub fn base_branches(&self) -> Option<Vec<Branch>> {
        fn inner(m: &MapKind) -> Option<Vec<Branch>> {
            match m {
                MapKind::Corpus { tag } => corpus_branches(*tag),
                MapKind::PiecewiseAffine { branches } => Some(branches.clone()),
                MapKind::Iterate { base, .. } => inner(base),
            }
        }
        inner(&self.map)
    }

    /// Symbolically composed branches of this system (iterates expanded)
    /// with base-branch itineraries; `None` for non-affine maps.
    pub fn affine_branches(&self) -> Option<Vec<CodedBranch>> {
        let base = self.base_branches()?;
        Some(compose_branches(&base, self.iterate_count(), self.is_circle()))
    }

    pub fn is_circle(&self) -> bool {
        matches!(self.space.kind, SpaceKind::Circle)
    }

    pub fn is_piecewise_affine(&self) -> bool {
        self.base_branches().is_some()
    }
}

impl fmt::Display for SystemDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on {}", self.name, self.space.description)
    }
}

fn corpus_branches(tag: CorpusTag) -> Option<Vec<Branch>> {
    let r = Rational::new;
    Some(match tag {
        CorpusTag::Tent => vec![
            Branch::new(r(0, 1), r(1, 2), r(2, 1), r(0, 1)),
            Branch::new(r(1, 2), r(1, 1), r(-2, 1), r(2, 1)),
        ],
        CorpusTag::Doubling => vec![
            Branch::new(r(0, 1), r(1, 2), r(2, 1), r(0, 1)),
            Branch::new(r(1, 2), r(1, 1), r(2, 1), r(-1, 1)),
        ],
        CorpusTag::Ex21 => vec![
            Branch::new(r(0, 1), r(1, 2), r(2, 1), r(0, 1)),
            Branch::new(r(1, 1), r(1, 1), r(0, 1), r(1, 1)),
        ],
        CorpusTag::Ex22 => vec![
            Branch::new(r(0, 1), r(1, 8), r(4, 1), r(0, 1)),
            Branch::new(r(1, 4), r(1, 2), r(0, 1), r(2, 1)),
            Branch::new(r(2, 1), r(2, 1), r(0, 1), r(2, 1)),
        ],
        _ => return None,
    })
}

fn eval_map(map: &MapKind, space: &SpaceSpec, p: &Point) -> Result<Point> {
    match map {
        MapKind::Corpus { tag } => eval_corpus(*tag, space, p),
        MapKind::PiecewiseAffine { branches } => eval_affine(branches, p),
        MapKind::Iterate { base, times } => {
            let mut x = p.clone();
            for _ in 0..*times {
                x = eval_map(base, space, &x)?;
            }
            Ok(x)
        }
    }
}

fn eval_corpus(tag: CorpusTag, space: &SpaceSpec, p: &Point) -> Result<Point> {
    let two = Rational::integer(2);
    let bad = || Error::Domain(format!("{p} is not a point of the {tag} space"));
    Ok(match (tag, p) {
        (CorpusTag::Tent, Point::Real(x)) => {
            Point::Real(Rational::one() - (Rational::one() - &two * x).abs())
        }
        (CorpusTag::Logistic, Point::Real(x)) => {
            Point::Real(Rational::integer(4) * x * (Rational::one() - x))
        }
        (CorpusTag::Doubling, Point::Circle(x)) => Point::Circle((&two * x).fract_unit()),
        (CorpusTag::Ex21, Point::Real(x)) => Point::Real(ex21_step(x)),
        (CorpusTag::Ex22, Point::Real(x)) => {
            let depth = match space.kind {
                SpaceKind::Ex22Set { depth } => depth,
                _ => u32::MAX,
            };
            match ex22_piece(x, depth).ok_or_else(bad)? {
                Ex22Piece::Zero => Point::Real(Rational::zero()),
                Ex22Piece::Two | Ex22Piece::Interval(1) => Point::Real(two),
                Ex22Piece::Interval(_) => Point::Real(Rational::integer(4) * x),
            }
        }
        (CorpusTag::Shift, Point::Word(c)) => {
            let mut next: Vec<Rational> = c.iter().skip(1).cloned().collect();
            next.push(Rational::zero());
            Point::Word(next)
        }
        (CorpusTag::Ex21Product, Point::Word(c)) => Point::Word(c.iter().map(ex21_step).collect()),
        _ => return Err(bad()),
    })
}

fn ex21_step(x: &Rational) -> Rational {
    if *x == Rational::one() {
        Rational::one()
    } else {
        x * Rational::integer(2)
    }
}

fn eval_affine(branches: &[Branch], p: &Point) -> Result<Point> {
    let x = p
        .scalar()
        .ok_or_else(|| Error::Shape("piecewise-affine maps act on scalar points".into()))?;
    let b = branches
        .iter()
        .find(|b| b.contains(x))
        .ok_or_else(|| Error::Domain(format!("{x} lies in no branch")))?;
    let y = b.apply(x);
    Ok(match p {
        Point::Circle(_) => Point::Circle(y.fract_unit()),
        _ => Point::Real(y),
    })
}

/// The closed pieces a scalar space is made of (points count as degenerate intervals).
pub(crate) fn space_pieces(space: &SpaceSpec) -> Option<Vec<(Rational, Rational)>> {
    let r = Rational::new;
    Some(match &space.kind {
        SpaceKind::Interval01 | SpaceKind::Circle => vec![(r(0, 1), r(1, 1))],
        SpaceKind::Ex21Set { depth } => super::space::ex21_points(*depth)
            .into_iter()
            .map(|x| (x.clone(), x))
            .collect(),
        SpaceKind::Ex22Set { depth } => {
            let mut v = vec![(r(0, 1), r(0, 1)), (r(2, 1), r(2, 1))];
            for n in 1..=*depth {
                let lo = Rational::pow2(-2 * n as i32);
                let hi = &lo * Rational::integer(2);
                v.push((lo, hi));
            }
            v
        }
        _ => return None,
    })
}

fn validate_map(map: &MapKind, space: &SpaceSpec) -> Result<()> {
    match map {
        MapKind::Corpus { tag } => {
            let ok = matches!(
                (tag, &space.kind),
                (CorpusTag::Tent | CorpusTag::Logistic, SpaceKind::Interval01)
                    | (CorpusTag::Doubling, SpaceKind::Circle)
                    | (CorpusTag::Ex21, SpaceKind::Ex21Set { .. })
                    | (CorpusTag::Ex22, SpaceKind::Ex22Set { .. })
                    | (CorpusTag::Shift, SpaceKind::WordShift { .. })
                    | (CorpusTag::Ex21Product, SpaceKind::Ex21Product { .. })
            );
            if ok {
                Ok(())
            } else {
                Err(Error::Shape(format!("corpus map {tag} cannot act on {}", space.description)))
            }
        }
        MapKind::Iterate { base, times } => {
            if *times < 1 {
                return Err(Error::Precondition("iterate count must be ≥ 1".into()));
            }
            validate_map(base, space)
        }
        MapKind::PiecewiseAffine { branches } => validate_branches(branches, space),
    }
}

fn validate_branches(branches: &[Branch], space: &SpaceSpec) -> Result<()> {
    let pieces = space_pieces(space).ok_or_else(|| {
        Error::Unsupported("piecewise-affine maps need a scalar space".into())
    })?;
    if branches.is_empty() {
        return Err(Error::Precondition("no branches given".into()));
    }
    for b in branches {
        if b.lo > b.hi {
            return Err(Error::Precondition(format!("branch [{}, {}] is empty", b.lo, b.hi)));
        }
    }
    let circle = matches!(space.kind, SpaceKind::Circle);
    let same = |a: &Rational, b: &Rational| {
        if circle {
            (a - b).fract_unit().is_zero()
        } else {
            a == b
        }
    };
    // shared endpoints must agree
    for (i, a) in branches.iter().enumerate() {
        for b in &branches[i + 1..] {
            let lo = a.lo.clone().max(b.lo.clone());
            let hi = a.hi.clone().min(b.hi.clone());
            if lo > hi {
                continue;
            }
            for x in [&lo, &hi] {
                if !same(&a.apply(x), &b.apply(x)) {
                    return Err(Error::Precondition(format!(
                        "branches disagree at shared point {x}"
                    )));
                }
            }
        }
    }
    for (plo, phi) in &pieces {
        // coverage: walk the piece left to right through the branch union
        let mut sorted: Vec<&Branch> = branches.iter().collect();
        sorted.sort_by(|a, b| a.lo.cmp(&b.lo));
        let mut reach: Option<Rational> = None;
        for b in &sorted {
            if b.hi < *plo || b.lo > *phi {
                continue;
            }
            match &reach {
                None if b.lo <= *plo => reach = Some(b.hi.clone()),
                Some(r) if b.lo <= *r => reach = Some(r.clone().max(b.hi.clone())),
                _ => {}
            }
        }
        if !matches!(&reach, Some(r) if r >= phi) {
            return Err(Error::Precondition(format!(
                "branches do not cover [{plo}, {phi}]"
            )));
        }
        // images: each branch restricted to the piece must land in the space
        for b in branches {
            let lo = b.lo.clone().max(plo.clone());
            let hi = b.hi.clone().min(phi.clone());
            if lo > hi {
                continue;
            }
            let (ya, yb) = (b.apply(&lo), b.apply(&hi));
            let (ya, yb) = if ya <= yb { (ya, yb) } else { (yb, ya) };
            let inside = if circle {
                yb.clone() - ya.clone() <= Rational::one()
            } else {
                pieces.iter().any(|(l, h)| ya >= *l && yb <= *h)
            };
            if !inside {
                return Err(Error::Precondition(format!(
                    "branch on [{lo}, {hi}] maps outside the space"
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::q;
    use crate::systems::NetSpace;

    fn r(x: &str) -> Point {
        Point::Real(q(x))
    }

    #[test]
    fn spec_eval_examples() {
        let e = SystemDef::ex21(8);
        assert_eq!(e.eval(&r("1/8")).unwrap(), r("1/4"));
        assert_eq!(e.eval(&r("1")).unwrap(), r("1"));
        let x = SystemDef::ex22(4);
        assert_eq!(x.eval(&r("1/4")).unwrap(), r("2"));
        assert_eq!(x.eval(&r("1/16")).unwrap(), r("1/4"));
        assert_eq!(SystemDef::tent().eval(&r("1/4")).unwrap(), r("1/2"));
        assert_eq!(SystemDef::logistic().eval(&r("1/2")).unwrap(), r("1"));
    }

    #[test]
    fn spec_iterate_examples() {
        let t2 = SystemDef::tent().iterate(2).unwrap();
        assert_eq!(t2.eval(&r("1/8")).unwrap(), r("1/2"));
        let e3 = SystemDef::ex21(8).iterate(3).unwrap();
        assert_eq!(e3.eval(&r("1/32")).unwrap(), r("1/4"));
        let d2 = SystemDef::doubling().iterate(2).unwrap();
        assert_eq!(d2.eval(&Point::Circle(q("3/8"))).unwrap(), Point::Circle(q("1/2")));
        assert_eq!(t2.iterate(3).unwrap().iterate_count(), 6);
        assert_eq!(t2.name, "tent^2");
    }

    #[test]
    fn domain_errors() {
        assert!(SystemDef::ex21(3).eval(&r("3/8")).is_err());
        assert!(SystemDef::ex22(2).eval(&r("1/64")).is_err());
        assert!(SystemDef::tent().eval(&Point::Circle(q("0"))).is_err());
    }

    #[test]
    fn shift_drops_and_pads() {
        let s = SystemDef::shift(3);
        let w = Point::Word(vec![q("1"), q("0"), q("1")]);
        assert_eq!(s.eval(&w).unwrap(), Point::Word(vec![q("0"), q("1"), q("0")]));
    }

    #[test]
    fn corpus_branches_agree_with_formulas() {
        for sys in [SystemDef::tent(), SystemDef::doubling(), SystemDef::ex21(8), SystemDef::ex22(4)] {
            let net = NetSpace::build(&sys.space, 8).unwrap();
            let pa = SystemDef {
                name: "pa".into(),
                space: sys.space.clone(),
                map: MapKind::PiecewiseAffine { branches: sys.base_branches().unwrap() },
            };
            pa.validate().unwrap();
            for p in &net.points {
                assert_eq!(sys.eval(p).unwrap(), pa.eval(p).unwrap(), "{} at {p}", sys.name);
            }
        }
    }

    #[test]
    fn rejects_bad_branches() {
        let gap = vec![
            Branch::new(q("0"), q("1/4"), q("1"), q("0")),
            Branch::new(q("1/2"), q("1"), q("1"), q("0")),
        ];
        assert!(SystemDef::piecewise_affine("gap", SpaceSpec::interval01(), gap).is_err());
        let jump = vec![
            Branch::new(q("0"), q("1/2"), q("1"), q("0")),
            Branch::new(q("1/2"), q("1"), q("1"), q("1/4")),
        ];
        assert!(SystemDef::piecewise_affine("jump", SpaceSpec::interval01(), jump).is_err());
        let out = vec![Branch::new(q("0"), q("1"), q("2"), q("0"))];
        assert!(SystemDef::piecewise_affine("out", SpaceSpec::interval01(), out).is_err());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"name":"half","space":{"kind":"interval01"},
            "map":{"kind":"piecewise_affine","branches":[
              {"lo":"0","hi":"1","slope":"1/2","intercept":"0"}]}}"#;
        let sys = SystemDef::from_json(text).unwrap();
        assert_eq!(sys.eval(&r("1/2")).unwrap(), r("1/4"));
        let back = SystemDef::from_json(&serde_json::to_string(&sys).unwrap()).unwrap();
        assert_eq!(back, sys);
        let tagged = r#"{"name":"t","space":{"kind":"ex21_set","depth":4},
            "map":{"kind":"iterate","times":2,"base":{"kind":"corpus","tag":"ex21"}}}"#;
        let sys = SystemDef::from_json(tagged).unwrap();
        assert_eq!(sys.eval(&r("1/16")).unwrap(), r("1/4"));
    }
}
