//! Ordered abelian value groups.
//!
//! Four concrete kinds are supported: the integers, the rationals,
//! lexicographically ordered `Q^n`, and the bounded-depth surreal groups
//! `SD(d)`. An element of `SD(d)` for `d >= 1` is an exact Hahn series with
//! rational coefficients whose exponents lie in `SD(d - 1)`; `SD(0)` is the
//! rational line `Q((t^{0}))` of constants.

mod functional;
pub(crate) mod linear;
mod maps;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::series::Series;
use crate::Rational;

pub use functional::LinearFunctional;
pub use linear::CoordKey;
pub use maps::{AdditiveAutomorphism, AdditiveRule, Direction, MonotoneMap, MonotoneRule, PiecewiseLinear};

/// The kind of a value group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupDescriptor {
    Integers,
    Rationals,
    /// `Q^n` ordered lexicographically, first coordinate dominant.
    LexPower(u32),
    /// Exact Hahn series over `SD(d - 1)`; depth 0 is the rationals.
    SurrealDepth(u32),
}

impl GroupDescriptor {
    pub fn lex_power(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDescriptor("LexPower needs n >= 1".into()));
        }
        Ok(GroupDescriptor::LexPower(n))
    }

    /// Exponent group of the series representing elements of this group.
    pub fn lower(self) -> Option<GroupDescriptor> {
        match self {
            GroupDescriptor::SurrealDepth(d) if d > 0 => Some(GroupDescriptor::SurrealDepth(d - 1)),
            _ => None,
        }
    }

    pub fn zero(self) -> GroupElement {
        let value = match self {
            GroupDescriptor::Integers => Value::Int(BigInt::zero()),
            GroupDescriptor::Rationals | GroupDescriptor::SurrealDepth(0) => Value::Rat(Rational::zero()),
            GroupDescriptor::LexPower(n) => Value::Tuple(vec![Rational::zero(); n as usize]),
            GroupDescriptor::SurrealDepth(d) => {
                Value::Series(Box::new(Series::zero(GroupDescriptor::SurrealDepth(d - 1))))
            }
        };
        GroupElement { desc: self, value }
    }

    /// Embeds a rational into the least-dominant archimedean class that the
    /// kind singles out: the last coordinate for `LexPower`, the constants
    /// for `SurrealDepth`.
    pub fn scalar(self, q: Rational) -> Result<GroupElement> {
        let value = match self {
            GroupDescriptor::Integers => {
                if !q.is_integer() {
                    return Err(Error::ShapeMismatch {
                        group: self,
                        detail: format!("{q} is not an integer"),
                    });
                }
                Value::Int(q.to_integer())
            }
            GroupDescriptor::Rationals | GroupDescriptor::SurrealDepth(0) => Value::Rat(q),
            GroupDescriptor::LexPower(n) => {
                let mut v = vec![Rational::zero(); n as usize];
                v[n as usize - 1] = q;
                Value::Tuple(v)
            }
            GroupDescriptor::SurrealDepth(d) => {
                let lower = GroupDescriptor::SurrealDepth(d - 1);
                Value::Series(Box::new(Series::monomial(lower, lower.zero(), q)))
            }
        };
        Ok(GroupElement { desc: self, value })
    }

    pub fn one(self) -> GroupElement {
        self.scalar(Rational::one()).expect("1 fits every kind")
    }

    /// Standard generators: `1` for one-dimensional kinds, unit vectors for
    /// `LexPower`. Surreal groups have no finite generating set.
    pub fn standard_generators(self) -> Option<Vec<GroupElement>> {
        match self {
            GroupDescriptor::Integers | GroupDescriptor::Rationals | GroupDescriptor::SurrealDepth(0) => {
                Some(vec![self.one()])
            }
            GroupDescriptor::LexPower(n) => Some(
                (0..n as usize)
                    .map(|i| {
                        let mut v = vec![Rational::zero(); n as usize];
                        v[i] = Rational::one();
                        GroupElement {
                            desc: self,
                            value: Value::Tuple(v),
                        }
                    })
                    .collect(),
            ),
            GroupDescriptor::SurrealDepth(_) => None,
        }
    }

    pub fn is_archimedean(self) -> bool {
        matches!(
            self,
            GroupDescriptor::Integers | GroupDescriptor::Rationals | GroupDescriptor::SurrealDepth(0) | GroupDescriptor::LexPower(1)
        )
    }

    pub(crate) fn check(self, other: GroupDescriptor) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::mismatch(self, other))
        }
    }
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupDescriptor::Integers => write!(f, "Z"),
            GroupDescriptor::Rationals => write!(f, "Q"),
            GroupDescriptor::LexPower(n) => write!(f, "Lex({n})"),
            GroupDescriptor::SurrealDepth(d) => write!(f, "SD({d})"),
        }
    }
}

impl FromStr for GroupDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "z" | "int" | "integers" => return Ok(GroupDescriptor::Integers),
            "q" | "rat" | "rationals" => return Ok(GroupDescriptor::Rationals),
            _ => {}
        }
        let bad = || Error::InvalidDescriptor(format!("unknown group `{s}`"));
        let (name, arg) = match lower.split_once('(') {
            Some((name, rest)) => (name.trim(), rest.strip_suffix(')').ok_or_else(bad)?.trim()),
            None => {
                let split = lower.find(|c: char| c.is_ascii_digit()).ok_or_else(bad)?;
                (&lower[..split], &lower[split..])
            }
        };
        let n: u32 = arg.parse().map_err(|_| bad())?;
        match name {
            "lex" | "lexpower" => GroupDescriptor::lex_power(n),
            "sd" | "surreal" | "surrealdepth" => Ok(GroupDescriptor::SurrealDepth(n)),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Value {
    Int(BigInt),
    Rat(Rational),
    Tuple(Vec<Rational>),
    Series(Box<Series>),
}

/// An element of one of the value groups.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    desc: GroupDescriptor,
    value: Value,
}

impl GroupElement {
    pub fn integer(n: impl Into<BigInt>) -> Self {
        GroupElement {
            desc: GroupDescriptor::Integers,
            value: Value::Int(n.into()),
        }
    }

    pub fn rational(q: Rational) -> Self {
        GroupElement {
            desc: GroupDescriptor::Rationals,
            value: Value::Rat(q),
        }
    }

    /// Element of a one-dimensional kind (`Z`, `Q`, `SD(0)`).
    pub fn from_rational(desc: GroupDescriptor, q: Rational) -> Result<Self> {
        match desc {
            GroupDescriptor::Integers | GroupDescriptor::Rationals | GroupDescriptor::SurrealDepth(0) => desc.scalar(q),
            _ => Err(Error::ShapeMismatch {
                group: desc,
                detail: "expected a tuple or series literal".into(),
            }),
        }
    }

    pub fn from_tuple(desc: GroupDescriptor, coords: Vec<Rational>) -> Result<Self> {
        match desc {
            GroupDescriptor::LexPower(n) if coords.len() == n as usize => Ok(GroupElement {
                desc,
                value: Value::Tuple(coords),
            }),
            _ => Err(Error::ShapeMismatch {
                group: desc,
                detail: format!("tuple of length {}", coords.len()),
            }),
        }
    }

    /// Element of `SD(d)`, `d >= 1`. The series must be exact.
    pub fn from_series(desc: GroupDescriptor, s: Series) -> Result<Self> {
        match desc.lower() {
            Some(lower) if lower == s.group() => {
                if !s.is_exact() {
                    return Err(Error::ShapeMismatch {
                        group: desc,
                        detail: "group elements must be exact series".into(),
                    });
                }
                Ok(GroupElement {
                    desc,
                    value: Value::Series(Box::new(s)),
                })
            }
            _ => Err(Error::ShapeMismatch {
                group: desc,
                detail: format!("series over {} does not belong here", s.group()),
            }),
        }
    }

    pub fn descriptor(&self) -> GroupDescriptor {
        self.desc
    }

    pub(crate) fn value(&self) -> &Value {
        &self.value
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match &self.value {
            Value::Int(n) => Some(Rational::from_integer(n.clone())),
            Value::Rat(q) => Some(q.clone()),
            _ => None,
        }
    }

    pub fn as_tuple(&self) -> Option<&[Rational]> {
        match &self.value {
            Value::Tuple(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_series(&self) -> Option<&Series> {
        match &self.value {
            Value::Series(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.value {
            Value::Int(n) => n.is_zero(),
            Value::Rat(q) => q.is_zero(),
            Value::Tuple(v) => v.iter().all(Zero::is_zero),
            Value::Series(s) => s.terms().is_empty(),
        }
    }

    pub fn signum(&self) -> Ordering {
        match &self.value {
            Value::Int(n) => n.cmp(&BigInt::zero()),
            Value::Rat(q) => q.cmp(&Rational::zero()),
            Value::Tuple(v) => v.iter().find(|c| !c.is_zero()).map_or(Ordering::Equal, |c| c.cmp(&Rational::zero())),
            Value::Series(s) => s.terms().first().map_or(Ordering::Equal, |(_, c)| c.cmp(&Rational::zero())),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn add(&self, other: &GroupElement) -> Result<GroupElement> {
        self.desc.check(other.desc)?;
        Ok(self.plus(other))
    }

    pub fn sub(&self, other: &GroupElement) -> Result<GroupElement> {
        self.desc.check(other.desc)?;
        Ok(self.minus(other))
    }

    pub fn neg(&self) -> GroupElement {
        let value = match &self.value {
            Value::Int(n) => Value::Int(-n),
            Value::Rat(q) => Value::Rat(-q),
            Value::Tuple(v) => Value::Tuple(v.iter().map(|c| -c).collect()),
            Value::Series(s) => Value::Series(Box::new(s.neg())),
        };
        GroupElement { desc: self.desc, value }
    }

    /// Group operation; callers guarantee matching descriptors.
    pub(crate) fn plus(&self, other: &GroupElement) -> GroupElement {
        debug_assert_eq!(self.desc, other.desc);
        let value = match (&self.value, &other.value) {
            (Value::Int(a), Value::Int(b)) => Value::Int(a + b),
            (Value::Rat(a), Value::Rat(b)) => Value::Rat(a + b),
            (Value::Tuple(a), Value::Tuple(b)) => Value::Tuple(a.iter().zip(b).map(|(x, y)| x + y).collect()),
            (Value::Series(a), Value::Series(b)) => Value::Series(Box::new(a.add_exact(b))),
            _ => unreachable!("descriptor check guarantees matching shapes"),
        };
        GroupElement { desc: self.desc, value }
    }

    pub(crate) fn minus(&self, other: &GroupElement) -> GroupElement {
        self.plus(&other.neg())
    }

    /// `n * self` for an integer `n`.
    pub fn mul_int(&self, n: &BigInt) -> GroupElement {
        let q = Rational::from_integer(n.clone());
        self.scale(&q).expect("integer multiples stay in every kind")
    }

    /// `q * self`; `None` when the result leaves the group (non-integral
    /// multiples in `Z`).
    pub fn scale(&self, q: &Rational) -> Option<GroupElement> {
        let value = match &self.value {
            Value::Int(n) => {
                let r = q * Rational::from_integer(n.clone());
                if !r.is_integer() {
                    return None;
                }
                Value::Int(r.to_integer())
            }
            Value::Rat(a) => Value::Rat(a * q),
            Value::Tuple(v) => Value::Tuple(v.iter().map(|c| c * q).collect()),
            Value::Series(s) => Value::Series(Box::new(s.scale(q))),
        };
        Some(GroupElement { desc: self.desc, value })
    }

    pub fn compare(&self, other: &GroupElement) -> Result<Ordering> {
        self.desc.check(other.desc)?;
        Ok(self.cmp(other))
    }

    /// Compares natural valuations: `Less` means `v_G(self) < v_G(other)`,
    /// i.e. `|self|` dominates every integer multiple of `|other|`.
    pub fn arch_compare(&self, other: &GroupElement) -> Result<Ordering> {
        self.desc.check(other.desc)?;
        if self.is_zero() || other.is_zero() {
            return Err(Error::ZeroArgument);
        }
        Ok(match (&self.value, &other.value) {
            (Value::Int(_), Value::Int(_)) | (Value::Rat(_), Value::Rat(_)) => Ordering::Equal,
            (Value::Tuple(a), Value::Tuple(b)) => {
                let lead = |v: &[Rational]| v.iter().position(|c| !c.is_zero());
                lead(a).cmp(&lead(b))
            }
            (Value::Series(a), Value::Series(b)) => a.terms()[0].0.cmp(&b.terms()[0].0),
            _ => unreachable!("descriptor check guarantees matching shapes"),
        })
    }

    /// Smallest `n >= 0` with `n * self >= target`, for `self > 0`.
    /// `None` when `self` lies in a strictly smaller archimedean class than
    /// a positive `target`, so that no multiple reaches it.
    pub(crate) fn multiples_to_reach(&self, target: &GroupElement) -> Option<u64> {
        debug_assert!(self.is_positive());
        if target.signum() != Ordering::Greater {
            return Some(0);
        }
        if self.arch_compare(target).ok()? == Ordering::Greater {
            return None;
        }
        let lead = |g: &GroupElement| -> Rational {
            match &g.value {
                Value::Int(n) => Rational::from_integer(n.clone()),
                Value::Rat(q) => q.clone(),
                Value::Tuple(v) => v.iter().find(|c| !c.is_zero()).cloned().unwrap_or_else(Rational::zero),
                Value::Series(s) => s.terms()[0].1.clone(),
            }
        };
        // Same class as `target` or dominating it: the ratio of leading
        // coefficients (clamped at 1) is within one step of the answer.
        let mut n = if self.arch_compare(target).ok()? == Ordering::Equal {
            let ratio = lead(target) / lead(self);
            let c = ratio.ceil().to_integer();
            if c.is_positive() {
                u64::try_from(c).ok()?
            } else {
                1
            }
        } else {
            1
        };
        n = n.saturating_sub(1).max(1);
        loop {
            if self.mul_int(&BigInt::from(n)) >= *target {
                return Some(n);
            }
            n += 1;
        }
    }

    pub(crate) fn coords(&self) -> Vec<(CoordKey, Rational)> {
        match &self.value {
            Value::Int(n) if n.is_zero() => vec![],
            Value::Int(n) => vec![(CoordKey::Index(0), Rational::from_integer(n.clone()))],
            Value::Rat(q) if q.is_zero() => vec![],
            Value::Rat(q) => vec![(CoordKey::Index(0), q.clone())],
            Value::Tuple(v) => v
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (CoordKey::Index(i), c.clone()))
                .collect(),
            Value::Series(s) => s.terms().iter().map(|(e, c)| (CoordKey::Exponent(e.clone()), c.clone())).collect(),
        }
    }
}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order: the group order within a descriptor, descriptor order across.
impl Ord for GroupElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.desc.cmp(&other.desc).then_with(|| match (&self.value, &other.value) {
            (Value::Int(a), Value::Int(b)) => a.cmp(b),
            (Value::Rat(a), Value::Rat(b)) => a.cmp(b),
            (Value::Tuple(a), Value::Tuple(b)) => a.cmp(b),
            (Value::Series(a), Value::Series(b)) => a.cmp_exact(b),
            _ => unreachable!("equal descriptors imply equal shapes"),
        })
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::format_group_element(self, crate::syntax::Notation::T))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Precision;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn lex(v: &[i64]) -> GroupElement {
        GroupElement::from_tuple(GroupDescriptor::LexPower(v.len() as u32), v.iter().map(|&c| q(c, 1)).collect()).unwrap()
    }

    fn sd1(terms: &[(i64, i64)]) -> GroupElement {
        let lower = GroupDescriptor::SurrealDepth(0);
        let s = Series::from_terms(
            lower,
            terms.iter().map(|&(e, c)| (lower.scalar(q(e, 1)).unwrap(), q(c, 1))).collect(),
            Precision::Infinite,
        )
        .unwrap();
        GroupElement::from_series(GroupDescriptor::SurrealDepth(1), s).unwrap()
    }

    #[test]
    fn add_examples() {
        let a = GroupElement::rational(q(1, 2));
        let b = GroupElement::rational(q(-1, 3));
        assert_eq!(a.add(&b).unwrap(), GroupElement::rational(q(1, 6)));
        assert_eq!(lex(&[1, -5]).add(&lex(&[0, 5])).unwrap(), lex(&[1, 0]));
        let x = sd1(&[(-1, 1)]);
        let y = sd1(&[(-1, 1), (0, 1)]);
        assert_eq!(x.add(&y).unwrap(), sd1(&[(-1, 2), (0, 1)]));
    }

    #[test]
    fn mismatch_is_reported() {
        let err = GroupElement::integer(1).add(&GroupElement::rational(q(1, 1))).unwrap_err();
        assert!(matches!(err, Error::DescriptorMismatch { .. }));
        assert!(GroupElement::integer(1).compare(&lex(&[1])).is_err());
    }

    #[test]
    fn compare_examples() {
        assert_eq!(lex(&[1, -5]).compare(&lex(&[0, 100])).unwrap(), Ordering::Greater);
        assert_eq!(
            GroupElement::rational(q(-1, 2)).compare(&GroupElement::rational(q(1, 3))).unwrap(),
            Ordering::Less
        );
        // t^{-1} is infinite: it exceeds every constant.
        assert_eq!(sd1(&[(-1, 1)]).compare(&sd1(&[(0, 5)])).unwrap(), Ordering::Greater);
        assert_eq!(sd1(&[(1, 7)]).compare(&sd1(&[(0, 1)])).unwrap(), Ordering::Less);
    }

    #[test]
    fn arch_compare_examples() {
        let one = GroupElement::rational(q(1, 1));
        let hundred = GroupElement::rational(q(100, 1));
        assert_eq!(one.arch_compare(&hundred).unwrap(), Ordering::Equal);
        assert_eq!(lex(&[1, 0]).arch_compare(&lex(&[0, 1])).unwrap(), Ordering::Less);
        assert_eq!(lex(&[0, -3]).arch_compare(&lex(&[0, 1])).unwrap(), Ordering::Equal);
        assert_eq!(
            GroupDescriptor::Rationals.zero().arch_compare(&one).unwrap_err(),
            Error::ZeroArgument
        );
        assert_eq!(sd1(&[(-1, 1)]).arch_compare(&sd1(&[(0, 5)])).unwrap(), Ordering::Less);
        assert_eq!(sd1(&[(1, -2), (3, 1)]).arch_compare(&sd1(&[(1, 9)])).unwrap(), Ordering::Equal);
    }

    #[test]
    fn descriptor_parsing() {
        assert_eq!("Q".parse::<GroupDescriptor>().unwrap(), GroupDescriptor::Rationals);
        assert_eq!("z".parse::<GroupDescriptor>().unwrap(), GroupDescriptor::Integers);
        assert_eq!("Lex(2)".parse::<GroupDescriptor>().unwrap(), GroupDescriptor::LexPower(2));
        assert_eq!("lex3".parse::<GroupDescriptor>().unwrap(), GroupDescriptor::LexPower(3));
        assert_eq!("SD(1)".parse::<GroupDescriptor>().unwrap(), GroupDescriptor::SurrealDepth(1));
        assert!("Lex(0)".parse::<GroupDescriptor>().is_err());
        assert!("R".parse::<GroupDescriptor>().is_err());
    }

    #[test]
    fn multiples_to_reach() {
        let gain = GroupElement::rational(q(1, 3));
        assert_eq!(gain.multiples_to_reach(&GroupElement::rational(q(2, 1))), Some(6));
        assert_eq!(gain.multiples_to_reach(&GroupElement::rational(q(-2, 1))), Some(0));
        assert_eq!(lex(&[0, 1]).multiples_to_reach(&lex(&[1, 0])), None);
        assert_eq!(lex(&[1, -9]).multiples_to_reach(&lex(&[0, 4])), Some(1));
        assert_eq!(lex(&[0, 2]).multiples_to_reach(&lex(&[0, 5])), Some(3));
    }

    #[test]
    fn integers_reject_fractional_scaling() {
        assert!(GroupElement::integer(3).scale(&q(1, 2)).is_none());
        assert_eq!(GroupElement::integer(4).scale(&q(1, 2)), Some(GroupElement::integer(2)));
    }
}
