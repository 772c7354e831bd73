use serde::Serialize;

use super::space::{ex21_points, ex22_piece, SpaceKind, SpaceSpec};
use crate::error::{Caps, Error, Result};
use crate::numerics::{dist, word_weight, MetricKind, Point, Rational};

/// A finite, canonically sorted sample of a space.
///
/// Node indices are positions in `points`; every analysis refers to nodes by
/// index, so the canonical order fixes all outputs.
#[derive(Debug, Clone, Serialize)]
pub struct NetSpace {
    pub spec: SpaceSpec,
    pub resolution: u32,
    pub points: Vec<Point>,
    #[serde(skip)]
    factor: Option<Vec<Rational>>,
}

impl NetSpace {
    pub fn build(spec: &SpaceSpec, resolution: u32) -> Result<NetSpace> {
        NetSpace::build_capped(spec, resolution, &Caps::default())
    }

    pub fn build_capped(spec: &SpaceSpec, resolution: u32, caps: &Caps) -> Result<NetSpace> {
        spec.validate()?;
        if resolution < 1 {
            return Err(Error::Precondition("net resolution must be ≥ 1".into()));
        }
        let size = net_size(spec, resolution);
        Caps::check("net_size", size, caps.net_size)?;
        let points = match &spec.kind {
            SpaceKind::Interval01 => (0..=(1i64 << resolution))
                .map(|k| Point::Real(Rational::dyadic(k, resolution)))
                .collect(),
            SpaceKind::Circle => (0..(1i64 << resolution))
                .map(|k| Point::Circle(Rational::dyadic(k, resolution)))
                .collect(),
            SpaceKind::Ex21Set { depth } => {
                ex21_points(*depth).into_iter().map(Point::Real).collect()
            }
            SpaceKind::Ex22Set { depth } => ex22_net(*depth, resolution),
            SpaceKind::WordShift { .. } | SpaceKind::Ex21Product { .. } => {
                let m = spec.word_len().unwrap();
                let factor = spec.factor_points().unwrap();
                all_words(&factor, m)
            }
        };
        Ok(NetSpace {
            spec: spec.clone(),
            resolution,
            points,
            factor: spec.factor_points(),
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn metric_kind(&self) -> MetricKind {
        self.spec.metric_kind()
    }

    pub fn index_of(&self, p: &Point) -> Option<usize> {
        self.points.binary_search(p).ok()
    }

    /// Covering radius of the net inside its truncated space: every space
    /// point lies within this distance of a net point.
    pub fn density(&self) -> Rational {
        match self.spec.kind {
            SpaceKind::Interval01 | SpaceKind::Circle | SpaceKind::Ex22Set { .. } => {
                Rational::pow2(-(self.resolution as i32) - 1)
            }
            _ => Rational::zero(),
        }
    }

    /// Smallest distance between two distinct net points.
    pub fn min_gap(&self) -> Option<Rational> {
        if self.len() < 2 {
            return None;
        }
        match self.metric_kind() {
            MetricKind::Word => {
                let f = self.factor.as_ref()?;
                let g = f.windows(2).map(|w| &w[1] - &w[0]).min()?;
                Some(g * word_weight(self.spec.word_len()?))
            }
            _ => self.points.windows(2).map(|w| dist(&w[0], &w[1])).min(),
        }
    }

    /// Largest distance between two net points.
    pub fn diameter(&self) -> Rational {
        match self.metric_kind() {
            MetricKind::Interval => dist(&self.points[0], self.points.last().unwrap()),
            MetricKind::Circle => {
                if self.len() < 2 {
                    Rational::zero()
                } else {
                    Rational::new(1, 2).min(Rational::one() - self.min_gap().unwrap())
                }
            }
            MetricKind::Word => {
                let f = self.factor.as_ref().unwrap();
                (f.last().unwrap() - &f[0]) * word_weight(1)
            }
        }
    }

    /// Net nodes within the closed ball of `radius` around an arbitrary
    /// point of the ambient space, in increasing index order.
    pub fn ball(&self, center: &Point, radius: &Rational) -> Vec<usize> {
        if radius.is_negative() {
            return Vec::new();
        }
        match (self.metric_kind(), center) {
            (MetricKind::Interval, Point::Real(c)) => {
                let (lo, hi) = self.scalar_range(&(c - radius), &(c + radius));
                (lo..hi).collect()
            }
            (MetricKind::Circle, Point::Circle(c)) => self.circle_ball(c, radius),
            (MetricKind::Word, Point::Word(c)) => self.word_ball(c, radius),
            _ => Vec::new(),
        }
    }

    /// Whether the ball is nonempty, without materialising it.
    pub fn ball_nonempty(&self, center: &Point, radius: &Rational) -> bool {
        match (self.metric_kind(), center) {
            (MetricKind::Interval, Point::Real(c)) => {
                let (lo, hi) = self.scalar_range(&(c - radius), &(c + radius));
                lo < hi
            }
            _ => {
                let p = self.project(center);
                dist(&p, center) <= *radius
            }
        }
    }

    /// Index range of points with scalar coordinate in `[lo, hi]`.
    pub(crate) fn scalar_range(&self, lo: &Rational, hi: &Rational) -> (usize, usize) {
        let a = self.points.partition_point(|p| p.scalar().unwrap() < lo);
        let b = self.points.partition_point(|p| p.scalar().unwrap() <= hi);
        (a, b.max(a))
    }

    fn circle_ball(&self, c: &Rational, radius: &Rational) -> Vec<usize> {
        if *radius >= Rational::new(1, 2) {
            return (0..self.len()).collect();
        }
        let one = Rational::one();
        let lo = c - radius;
        let hi = c + radius;
        let mut out = Vec::new();
        if lo.is_negative() {
            let (a, b) = self.scalar_range(&(&lo + &one), &one);
            out.extend(a..b);
        }
        if hi >= one {
            let (a, b) = self.scalar_range(&Rational::zero(), &(&hi - &one));
            out.extend(a..b);
        }
        let (a, b) = self.scalar_range(&lo.max(Rational::zero()), &hi);
        out.extend(a..b);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn word_ball(&self, c: &[Rational], radius: &Rational) -> Vec<usize> {
        let m = self.spec.word_len().unwrap();
        let factor = self.factor.as_ref().unwrap();
        // coordinates beyond the truncation contribute a fixed term
        for (j, v) in c.iter().enumerate().skip(m) {
            if v.abs() * word_weight(j + 1) > *radius {
                return Vec::new();
            }
        }
        let zero = Rational::zero();
        let mut ranges = Vec::with_capacity(m);
        for j in 0..m {
            let cj = c.get(j).unwrap_or(&zero);
            let reach = radius * Rational::pow2(j as i32 + 1);
            let lo = factor.partition_point(|v| *v < cj - &reach);
            let hi = factor.partition_point(|v| *v <= cj + &reach);
            if lo >= hi {
                return Vec::new();
            }
            ranges.push((lo, hi));
        }
        mixed_radix_box(&ranges, factor.len())
    }

    /// The nearest net point; ties go to the canonically smallest.
    pub fn project(&self, p: &Point) -> Point {
        self.points[self.project_index(p)].clone()
    }

    pub fn project_index(&self, p: &Point) -> usize {
        match (self.metric_kind(), p) {
            (MetricKind::Word, Point::Word(c)) => self.project_word(c),
            _ => {
                let x = p.scalar().expect("scalar point on a scalar net");
                let pos = self.points.partition_point(|q| q.scalar().unwrap() < x);
                let mut cands = vec![pos.saturating_sub(1), pos.min(self.len() - 1)];
                if self.metric_kind() == MetricKind::Circle {
                    cands.push(0);
                    cands.push(self.len() - 1);
                }
                cands.sort_unstable();
                cands.dedup();
                let mut best = cands[0];
                let mut best_d = dist(&self.points[best], p);
                for &i in &cands[1..] {
                    let d = dist(&self.points[i], p);
                    if d < best_d {
                        best = i;
                        best_d = d;
                    }
                }
                best
            }
        }
    }

    fn project_word(&self, c: &[Rational]) -> usize {
        let m = self.spec.word_len().unwrap();
        let factor = self.factor.as_ref().unwrap();
        let zero = Rational::zero();
        let coord = |j: usize| c.get(j).unwrap_or(&zero);
        let nearest = |x: &Rational| {
            factor
                .iter()
                .map(|v| (v - x).abs())
                .min()
                .expect("nonempty alphabet")
        };
        let mut target = Rational::zero();
        for j in 0..m {
            target = target.max(nearest(coord(j)) * word_weight(j + 1));
        }
        for (j, v) in c.iter().enumerate().skip(m) {
            target = target.max(v.abs() * word_weight(j + 1));
        }
        // the lexicographically smallest minimiser picks, coordinate by
        // coordinate, the smallest symbol within the optimal distance
        let mut idx = 0usize;
        for j in 0..m {
            let cj = coord(j);
            let k = factor
                .iter()
                .position(|v| (v - cj).abs() * word_weight(j + 1) <= target)
                .unwrap();
            idx = idx * factor.len() + k;
        }
        idx
    }

    /// Exact distance from a point to the nearest node of `set`.
    pub fn dist_to_set(&self, p: &Point, set: &[usize]) -> Option<Rational> {
        set.iter().map(|&i| dist(&self.points[i], p)).min()
    }
}

fn net_size(spec: &SpaceSpec, r: u32) -> usize {
    let pow = |base: usize, e: usize| -> usize {
        let mut acc = 1usize;
        for _ in 0..e {
            acc = acc.saturating_mul(base);
        }
        acc
    };
    match &spec.kind {
        SpaceKind::Interval01 => pow(2, r as usize).saturating_add(1),
        SpaceKind::Circle => pow(2, r as usize),
        SpaceKind::Ex21Set { depth } => *depth as usize + 2,
        SpaceKind::Ex22Set { depth } => {
            let mut n = 2usize;
            for k in 1..=*depth {
                // interval I_k has length 4^-k; grid step 2^-r
                let e = (r as i64) - 2 * k as i64;
                n = n.saturating_add(if e >= 0 { pow(2, e as usize) + 1 } else { 2 });
            }
            n
        }
        SpaceKind::WordShift { m, alphabet } => pow(alphabet.len(), *m),
        SpaceKind::Ex21Product { m, depth } => pow(*depth as usize + 2, *m),
    }
}

fn ex22_net(depth: u32, r: u32) -> Vec<Point> {
    let mut pts = vec![Rational::zero(), Rational::integer(2)];
    for n in 1..=depth {
        let lo = Rational::pow2(-2 * n as i32);
        let hi = &lo * Rational::integer(2);
        pts.push(lo.clone());
        pts.push(hi.clone());
        if 2 * n <= r {
            let step = Rational::pow2(-(r as i32));
            let mut x = &lo + &step;
            while x < hi {
                pts.push(x.clone());
                x = x + &step;
            }
        }
    }
    pts.sort();
    pts.dedup();
    debug_assert!(pts.iter().all(|x| ex22_piece(x, depth).is_some()));
    pts.into_iter().map(Point::Real).collect()
}

fn all_words(factor: &[Rational], m: usize) -> Vec<Point> {
    let k = factor.len();
    let total = k.pow(m as u32);
    (0..total)
        .map(|mut idx| {
            let mut c = vec![Rational::zero(); m];
            for j in (0..m).rev() {
                c[j] = factor[idx % k].clone();
                idx /= k;
            }
            Point::Word(c)
        })
        .collect()
}

/// All indices of a box in a mixed-radix (lexicographic) layout, ascending.
fn mixed_radix_box(ranges: &[(usize, usize)], radix: usize) -> Vec<usize> {
    let mut out = vec![0usize];
    for &(lo, hi) in ranges {
        let mut next = Vec::with_capacity(out.len() * (hi - lo));
        for base in &out {
            for d in lo..hi {
                next.push(base * radix + d);
            }
        }
        out = next;
    }
    out
}
