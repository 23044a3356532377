//! Order-preserving bijections and additive automorphisms of value groups.

use num_traits::{One, Signed, Zero};

use super::{GroupDescriptor, GroupElement, Value};
use crate::error::{Error, Result};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Continuous piecewise-linear increasing bijection of Q.
///
/// Piece `i` covers `[breakpoints[i-1], breakpoints[i])` (unbounded at the
/// ends) and maps `x` to `slopes[i] * x + intercepts[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PiecewiseLinear {
    breakpoints: Vec<Rational>,
    slopes: Vec<Rational>,
    intercepts: Vec<Rational>,
}

impl PiecewiseLinear {
    pub fn new(breakpoints: Vec<Rational>, slopes: Vec<Rational>, intercepts: Vec<Rational>) -> Result<Self> {
        if slopes.len() != breakpoints.len() + 1 || intercepts.len() != slopes.len() {
            return Err(Error::InvalidMap(format!(
                "{} breakpoints need {} pieces, got {} slopes and {} intercepts",
                breakpoints.len(),
                breakpoints.len() + 1,
                slopes.len(),
                intercepts.len()
            )));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidMap("breakpoints must be strictly increasing".into()));
        }
        if let Some(s) = slopes.iter().find(|s| !s.is_positive()) {
            return Err(Error::InvalidMap(format!("slope {s} is not positive")));
        }
        for (i, b) in breakpoints.iter().enumerate() {
            let left = &slopes[i] * b + &intercepts[i];
            let right = &slopes[i + 1] * b + &intercepts[i + 1];
            if left != right {
                return Err(Error::InvalidMap(format!(
                    "pieces disagree at breakpoint {b}: {left} vs {right}"
                )));
            }
        }
        Ok(PiecewiseLinear {
            breakpoints,
            slopes,
            intercepts,
        })
    }

    /// Interpolates strictly increasing sample points, extending the outer
    /// segments linearly. A single point gives a translation.
    pub fn interpolate(points: &[(Rational, Rational)]) -> Result<Self> {
        match points {
            [] => Err(Error::InvalidMap("no points to interpolate".into())),
            [(x, y)] => PiecewiseLinear::new(vec![], vec![Rational::one()], vec![y - x]),
            _ => {
                let mut slopes = Vec::new();
                let mut intercepts = Vec::new();
                for w in points.windows(2) {
                    let ((x0, y0), (x1, y1)) = (&w[0], &w[1]);
                    if x1 <= x0 || y1 <= y0 {
                        return Err(Error::InvalidMap("points are not strictly increasing".into()));
                    }
                    let s = (y1 - y0) / (x1 - x0);
                    intercepts.push(y0 - &s * x0);
                    slopes.push(s);
                }
                let breakpoints = points[1..points.len() - 1].iter().map(|(x, _)| x.clone()).collect();
                PiecewiseLinear::new(breakpoints, slopes, intercepts)
            }
        }
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> &[Rational] {
        &self.slopes
    }

    pub fn intercepts(&self) -> &[Rational] {
        &self.intercepts
    }

    pub fn apply(&self, x: &Rational) -> Rational {
        let i = self.breakpoints.partition_point(|b| b <= x);
        &self.slopes[i] * x + &self.intercepts[i]
    }

    pub fn inverse(&self) -> PiecewiseLinear {
        PiecewiseLinear {
            breakpoints: self.breakpoints.iter().map(|b| self.apply(b)).collect(),
            slopes: self.slopes.iter().map(|s| s.recip()).collect(),
            intercepts: self.slopes.iter().zip(&self.intercepts).map(|(s, c)| -c / s).collect(),
        }
    }

    pub fn is_linear(&self) -> bool {
        self.intercepts.iter().all(Zero::is_zero) && self.slopes.windows(2).all(|w| w[0] == w[1])
    }
}

/// Order-preserving bijection `zeta` of a value group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonotoneMap {
    desc: GroupDescriptor,
    rule: MonotoneRule,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MonotoneRule {
    Translation(GroupElement),
    /// Rationals only.
    PiecewiseLinear(PiecewiseLinear),
    /// Applied right to left: `[f, g]` maps `x` to `f(g(x))`.
    Composite(Vec<MonotoneMap>),
}

impl MonotoneMap {
    pub fn identity(desc: GroupDescriptor) -> Self {
        MonotoneMap {
            desc,
            rule: MonotoneRule::Translation(desc.zero()),
        }
    }

    pub fn translation(by: GroupElement) -> Self {
        MonotoneMap {
            desc: by.descriptor(),
            rule: MonotoneRule::Translation(by),
        }
    }

    pub fn piecewise(desc: GroupDescriptor, map: PiecewiseLinear) -> Result<Self> {
        if desc != GroupDescriptor::Rationals {
            return Err(Error::InvalidMap(format!(
                "piecewise-linear maps are defined on Q only, not {desc}"
            )));
        }
        Ok(MonotoneMap {
            desc,
            rule: MonotoneRule::PiecewiseLinear(map),
        })
    }

    pub fn composite(desc: GroupDescriptor, maps: Vec<MonotoneMap>) -> Result<Self> {
        for m in &maps {
            desc.check(m.desc)?;
        }
        Ok(MonotoneMap {
            desc,
            rule: MonotoneRule::Composite(maps),
        })
    }

    pub fn descriptor(&self) -> GroupDescriptor {
        self.desc
    }

    pub fn rule(&self) -> &MonotoneRule {
        &self.rule
    }

    pub fn apply(&self, g: &GroupElement, direction: Direction) -> Result<GroupElement> {
        self.desc.check(g.descriptor())?;
        Ok(self.apply_unchecked(g, direction))
    }

    pub(crate) fn apply_unchecked(&self, g: &GroupElement, direction: Direction) -> GroupElement {
        match (&self.rule, direction) {
            (MonotoneRule::Translation(c), Direction::Forward) => g.plus(c),
            (MonotoneRule::Translation(c), Direction::Inverse) => g.minus(c),
            (MonotoneRule::PiecewiseLinear(p), dir) => {
                let x = g.as_rational().expect("piecewise maps live on Q");
                let y = match dir {
                    Direction::Forward => p.apply(&x),
                    Direction::Inverse => p.inverse().apply(&x),
                };
                GroupElement::rational(y)
            }
            (MonotoneRule::Composite(maps), Direction::Forward) => {
                maps.iter().rev().fold(g.clone(), |acc, m| m.apply_unchecked(&acc, direction))
            }
            (MonotoneRule::Composite(maps), Direction::Inverse) => {
                maps.iter().fold(g.clone(), |acc, m| m.apply_unchecked(&acc, direction))
            }
        }
    }

    pub fn inverse(&self) -> MonotoneMap {
        let rule = match &self.rule {
            MonotoneRule::Translation(c) => MonotoneRule::Translation(c.neg()),
            MonotoneRule::PiecewiseLinear(p) => MonotoneRule::PiecewiseLinear(p.inverse()),
            MonotoneRule::Composite(maps) => MonotoneRule::Composite(maps.iter().rev().map(MonotoneMap::inverse).collect()),
        };
        MonotoneMap { desc: self.desc, rule }
    }

    /// Whether the map is also additive, i.e. a group automorphism.
    pub fn is_additive(&self) -> bool {
        match &self.rule {
            MonotoneRule::Translation(c) => c.is_zero(),
            MonotoneRule::PiecewiseLinear(p) => p.is_linear(),
            MonotoneRule::Composite(maps) => maps.iter().all(MonotoneMap::is_additive),
        }
    }

    pub fn is_identity(&self) -> bool {
        match &self.rule {
            MonotoneRule::Translation(c) => c.is_zero(),
            MonotoneRule::PiecewiseLinear(p) => p.is_linear() && p.slopes[0].is_one(),
            MonotoneRule::Composite(maps) => maps.iter().all(MonotoneMap::is_identity),
        }
    }
}

/// Order-preserving additive automorphism `tau` of a value group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AdditiveAutomorphism {
    desc: GroupDescriptor,
    rule: AdditiveRule,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AdditiveRule {
    PositiveScalar(Rational),
    /// `LexPower` only; acts on column vectors, so row `i` gives output
    /// coordinate `i`. Entries above the diagonal must vanish.
    TriangularMatrix(Vec<Vec<Rational>>),
    /// Applied right to left.
    Composite(Vec<AdditiveAutomorphism>),
}

impl AdditiveAutomorphism {
    pub fn identity(desc: GroupDescriptor) -> Self {
        AdditiveAutomorphism {
            desc,
            rule: AdditiveRule::PositiveScalar(Rational::one()),
        }
    }

    pub fn scalar(desc: GroupDescriptor, q: Rational) -> Result<Self> {
        if !q.is_positive() {
            return Err(Error::InvalidMap(format!("scalar {q} does not preserve the order")));
        }
        if desc == GroupDescriptor::Integers && !q.is_one() {
            return Err(Error::InvalidMap(format!("scalar {q} is not a bijection of Z")));
        }
        Ok(AdditiveAutomorphism {
            desc,
            rule: AdditiveRule::PositiveScalar(q),
        })
    }

    pub fn triangular(desc: GroupDescriptor, rows: Vec<Vec<Rational>>) -> Result<Self> {
        let GroupDescriptor::LexPower(n) = desc else {
            return Err(Error::InvalidMap(format!("matrix rules need a LexPower group, not {desc}")));
        };
        let n = n as usize;
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidMap(format!("expected a {n}x{n} matrix")));
        }
        for (i, row) in rows.iter().enumerate() {
            if !row[i].is_positive() {
                return Err(Error::InvalidMap(format!("diagonal entry {i} is not positive")));
            }
            if let Some(j) = (i + 1..n).find(|&j| !row[j].is_zero()) {
                return Err(Error::InvalidMap(format!(
                    "entry ({i},{j}) lets a less dominant coordinate move a more dominant one"
                )));
            }
        }
        Ok(AdditiveAutomorphism {
            desc,
            rule: AdditiveRule::TriangularMatrix(rows),
        })
    }

    pub fn composite(desc: GroupDescriptor, parts: Vec<AdditiveAutomorphism>) -> Result<Self> {
        for p in &parts {
            desc.check(p.desc)?;
        }
        Ok(AdditiveAutomorphism {
            desc,
            rule: AdditiveRule::Composite(parts),
        })
    }

    pub fn descriptor(&self) -> GroupDescriptor {
        self.desc
    }

    pub fn rule(&self) -> &AdditiveRule {
        &self.rule
    }

    pub fn is_identity(&self) -> bool {
        match &self.rule {
            AdditiveRule::PositiveScalar(q) => q.is_one(),
            AdditiveRule::TriangularMatrix(m) => m
                .iter()
                .enumerate()
                .all(|(i, row)| row.iter().enumerate().all(|(j, c)| if i == j { c.is_one() } else { c.is_zero() })),
            AdditiveRule::Composite(parts) => parts.iter().all(AdditiveAutomorphism::is_identity),
        }
    }

    pub fn apply(&self, g: &GroupElement, direction: Direction) -> Result<GroupElement> {
        self.desc.check(g.descriptor())?;
        Ok(self.apply_unchecked(g, direction))
    }

    pub(crate) fn apply_unchecked(&self, g: &GroupElement, direction: Direction) -> GroupElement {
        match (&self.rule, direction) {
            (AdditiveRule::PositiveScalar(q), Direction::Forward) => g.scale(q).expect("validated scalar"),
            (AdditiveRule::PositiveScalar(q), Direction::Inverse) => g.scale(&q.recip()).expect("validated scalar"),
            (AdditiveRule::TriangularMatrix(m), dir) => {
                let matrix = match dir {
                    Direction::Forward => m.clone(),
                    Direction::Inverse => invert_lower_triangular(m),
                };
                let Value::Tuple(v) = g.value() else {
                    unreachable!("matrix rules live on LexPower")
                };
                let out = matrix
                    .iter()
                    .map(|row| row.iter().zip(v).fold(Rational::zero(), |acc, (a, b)| acc + a * b))
                    .collect();
                GroupElement::from_tuple(self.desc, out).expect("square matrix")
            }
            (AdditiveRule::Composite(parts), Direction::Forward) => {
                parts.iter().rev().fold(g.clone(), |acc, p| p.apply_unchecked(&acc, direction))
            }
            (AdditiveRule::Composite(parts), Direction::Inverse) => {
                parts.iter().fold(g.clone(), |acc, p| p.apply_unchecked(&acc, direction))
            }
        }
    }

    pub fn inverse(&self) -> AdditiveAutomorphism {
        let rule = match &self.rule {
            AdditiveRule::PositiveScalar(q) => AdditiveRule::PositiveScalar(q.recip()),
            AdditiveRule::TriangularMatrix(m) => AdditiveRule::TriangularMatrix(invert_lower_triangular(m)),
            AdditiveRule::Composite(parts) => {
                AdditiveRule::Composite(parts.iter().rev().map(AdditiveAutomorphism::inverse).collect())
            }
        };
        AdditiveAutomorphism { desc: self.desc, rule }
    }
}

#[allow(clippy::needless_range_loop)]
fn invert_lower_triangular(m: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = m.len();
    let mut inv = vec![vec![Rational::zero(); n]; n];
    // column by column forward substitution of m * x = e_j
    for j in 0..n {
        for i in j..n {
            let mut acc = if i == j { Rational::one() } else { Rational::zero() };
            for k in j..i {
                acc -= &m[i][k] * &inv[k][j];
            }
            inv[i][j] = acc / &m[i][i];
        }
    }
    inv
}
