//! Truncated Hahn series with rational coefficients.
//!
//! A [`Series`] stores finitely many terms together with a precision bound
//! `P`: every term with exponent below `P` is present and correct, nothing
//! is known at or above `P`. Exact series have `P = Infinite`. All
//! operations propagate the bound so that no uncertified coefficient is
//! ever reported.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::group::{GroupDescriptor, GroupElement};
use crate::Rational;

/// Truncation bound of a series. `Finite` sorts below `Infinite`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Precision {
    Finite(GroupElement),
    Infinite,
}

impl Precision {
    pub fn is_finite(&self) -> bool {
        matches!(self, Precision::Finite(_))
    }

    pub fn finite(&self) -> Option<&GroupElement> {
        match self {
            Precision::Finite(p) => Some(p),
            Precision::Infinite => None,
        }
    }

    pub(crate) fn shifted(&self, by: &GroupElement) -> Precision {
        match self {
            Precision::Finite(p) => Precision::Finite(p.plus(by)),
            Precision::Infinite => Precision::Infinite,
        }
    }

    /// True when exponent `e` lies strictly below the bound.
    pub fn covers(&self, e: &GroupElement) -> bool {
        match self {
            Precision::Finite(p) => e < p,
            Precision::Infinite => true,
        }
    }
}

impl From<GroupElement> for Precision {
    fn from(g: GroupElement) -> Self {
        Precision::Finite(g)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LeadingTerm {
    pub valuation: GroupElement,
    pub coefficient: Rational,
}

pub type Term = (GroupElement, Rational);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Series {
    group: GroupDescriptor,
    terms: Vec<Term>,
    precision: Precision,
}

impl Series {
    pub fn zero(group: GroupDescriptor) -> Self {
        Series {
            group,
            terms: Vec::new(),
            precision: Precision::Infinite,
        }
    }

    pub fn one(group: GroupDescriptor) -> Self {
        Series::constant(group, Rational::one())
    }

    pub fn constant(group: GroupDescriptor, c: Rational) -> Self {
        Series::monomial(group, group.zero(), c)
    }

    /// `c * t^e`; the exponent must belong to `group`.
    pub fn monomial(group: GroupDescriptor, e: GroupElement, c: Rational) -> Self {
        assert_eq!(group, e.descriptor(), "exponent outside the value group");
        let terms = if c.is_zero() { Vec::new() } else { vec![(e, c)] };
        Series {
            group,
            terms,
            precision: Precision::Infinite,
        }
    }

    /// Builds a series from arbitrary terms: like exponents are merged, zero
    /// coefficients and terms at or above `precision` are dropped.
    pub fn from_terms(group: GroupDescriptor, terms: Vec<Term>, precision: Precision) -> Result<Self> {
        for (e, _) in &terms {
            group.check(e.descriptor())?;
        }
        if let Precision::Finite(p) = &precision {
            group.check(p.descriptor())?;
        }
        let mut merged: BTreeMap<GroupElement, Rational> = BTreeMap::new();
        for (e, c) in terms {
            *merged.entry(e).or_insert_with(Rational::zero) += c;
        }
        Ok(Series::from_map(group, merged, precision))
    }

    fn from_map(group: GroupDescriptor, map: BTreeMap<GroupElement, Rational>, precision: Precision) -> Self {
        let terms = map
            .into_iter()
            .filter(|(e, c)| !c.is_zero() && precision.covers(e))
            .collect();
        Series {
            group,
            terms,
            precision,
        }
    }

    /// Terms already sorted, distinct, nonzero, and below `precision`.
    pub(crate) fn from_sorted(group: GroupDescriptor, terms: Vec<Term>, precision: Precision) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(terms.iter().all(|(e, c)| !c.is_zero() && precision.covers(e)));
        Series {
            group,
            terms,
            precision,
        }
    }

    pub fn group(&self) -> GroupDescriptor {
        self.group
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn precision(&self) -> &Precision {
        &self.precision
    }

    pub fn is_exact(&self) -> bool {
        self.precision == Precision::Infinite
    }

    /// Exactly zero: no terms and no unknown tail.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.is_exact()
    }

    /// `v(s)`, when a term is known.
    pub fn valuation(&self) -> Option<&GroupElement> {
        self.terms.first().map(|(e, _)| e)
    }

    /// Certified lower bound for `v(s)`: the valuation if a term is known,
    /// else the precision. `None` for exact zero.
    pub(crate) fn valuation_bound(&self) -> Option<&GroupElement> {
        self.valuation().or(self.precision.finite())
    }

    pub fn leading_term(&self) -> Result<LeadingTerm> {
        match self.terms.first() {
            Some((e, c)) => Ok(LeadingTerm {
                valuation: e.clone(),
                coefficient: c.clone(),
            }),
            None if self.is_exact() => Err(Error::ZeroSeries),
            None => Err(Error::InsufficientPrecision(format!(
                "no term known below {}",
                self.precision.finite().expect("inexact")
            ))),
        }
    }

    pub fn coefficient_at(&self, g: &GroupElement) -> Result<Rational> {
        self.group.check(g.descriptor())?;
        if !self.precision.covers(g) {
            return Err(Error::InsufficientPrecision(format!(
                "coefficient at {g} lies beyond precision {}",
                self.precision.finite().expect("inexact")
            )));
        }
        Ok(self
            .terms
            .binary_search_by(|(e, _)| e.cmp(g))
            .map_or_else(|_| Rational::zero(), |i| self.terms[i].1.clone()))
    }

    /// Drops terms at or above `p`; the precision becomes `min(P, p)`.
    pub fn truncate_to(&self, p: &GroupElement) -> Series {
        let bound = Precision::Finite(p.clone()).min(self.precision.clone());
        self.with_bound(bound)
    }

    pub(crate) fn with_bound(&self, bound: Precision) -> Series {
        let bound = bound.min(self.precision.clone());
        Series {
            group: self.group,
            terms: self.terms.iter().filter(|(e, _)| bound.covers(e)).cloned().collect(),
            precision: bound,
        }
    }

    pub fn neg(&self) -> Series {
        Series {
            group: self.group,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
            precision: self.precision.clone(),
        }
    }

    pub fn scale(&self, q: &Rational) -> Series {
        if q.is_zero() {
            return Series {
                group: self.group,
                terms: Vec::new(),
                precision: self.precision.clone(),
            };
        }
        Series {
            group: self.group,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * q)).collect(),
            precision: self.precision.clone(),
        }
    }

    /// Multiplication by `t^g`.
    pub fn shift(&self, g: &GroupElement) -> Series {
        Series {
            group: self.group,
            terms: self.terms.iter().map(|(e, c)| (e.plus(g), c.clone())).collect(),
            precision: self.precision.shifted(g),
        }
    }

    pub fn add(&self, other: &Series) -> Result<Series> {
        self.group.check(other.group)?;
        Ok(self.add_unchecked(other))
    }

    pub fn sub(&self, other: &Series) -> Result<Series> {
        self.add(&other.neg())
    }

    pub(crate) fn add_unchecked(&self, other: &Series) -> Series {
        let precision = self.precision.clone().min(other.precision.clone());
        let mut terms = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let next = match (self.terms.get(i), other.terms.get(j)) {
                (Some(a), Some(b)) => match a.0.cmp(&b.0) {
                    Ordering::Less => {
                        i += 1;
                        a.clone()
                    }
                    Ordering::Greater => {
                        j += 1;
                        b.clone()
                    }
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                        (a.0.clone(), &a.1 + &b.1)
                    }
                },
                (Some(a), None) => {
                    i += 1;
                    a.clone()
                }
                (None, Some(b)) => {
                    j += 1;
                    b.clone()
                }
                (None, None) => unreachable!(),
            };
            if !next.1.is_zero() && precision.covers(&next.0) {
                terms.push(next);
            }
        }
        Series {
            group: self.group,
            terms,
            precision,
        }
    }

    /// Sum of exact series (group operation of the surreal value groups).
    pub(crate) fn add_exact(&self, other: &Series) -> Series {
        debug_assert!(self.is_exact() && other.is_exact());
        self.add_unchecked(other)
    }

    pub fn mul(&self, other: &Series) -> Result<Series> {
        self.group.check(other.group)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Series) -> Series {
        let (Some(va), Some(vb)) = (self.valuation_bound(), other.valuation_bound()) else {
            return Series::zero(self.group);
        };
        let precision = self.precision.shifted(vb).min(other.precision.shifted(va));
        let mut acc: BTreeMap<GroupElement, Rational> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.plus(eb);
                if precision.covers(&e) {
                    *acc.entry(e).or_insert_with(Rational::zero) += ca * cb;
                }
            }
        }
        Series::from_map(self.group, acc, precision)
    }

    /// Multiplicative inverse, certified so that `self * inverse` agrees
    /// with 1 below `target`.
    ///
    /// Writes `s = r t^g (1 + e)` with `v(e) > 0` and sums the geometric
    /// series `r^-1 t^-g sum (-e)^n` until the powers of `e` pass `target`.
    pub fn invert(&self, target: &GroupElement) -> Result<Series> {
        self.group.check(target.descriptor())?;
        let lead = match self.leading_term() {
            Ok(lt) => lt,
            Err(Error::ZeroSeries) => return Err(Error::DivisionByZero),
            Err(e) => return Err(e),
        };
        let g = &lead.valuation;
        if let Precision::Finite(p) = &self.precision {
            if p.minus(g) < *target {
                return Err(Error::InsufficientPrecision(format!(
                    "precision {p} cannot certify an inverse to {target}"
                )));
            }
        }
        let r_inv = lead.coefficient.recip();
        let normalizer = Series::monomial(self.group, g.neg(), r_inv.clone());
        // 1 + e, exact when `self` is
        let unit = self.mul_unchecked(&normalizer);
        let eps = unit.add_unchecked(&Series::one(self.group).neg());
        let geometric = if eps.is_zero() {
            Series::one(self.group)
        } else {
            if let Some(ve) = eps.valuation() {
                if ve.multiples_to_reach(target).is_none() {
                    return Err(Error::NonTerminating(format!(
                        "powers of an infinitesimal of valuation {ve} never reach {target}"
                    )));
                }
            }
            let minus_eps = eps.neg();
            let mut acc = Series::one(self.group).truncate_to(target);
            let mut power = Series::one(self.group);
            loop {
                power = power.mul_unchecked(&minus_eps).truncate_to(target);
                acc = acc.add_unchecked(&power);
                if power.terms.is_empty() {
                    break;
                }
            }
            acc
        };
        Ok(geometric.mul_unchecked(&normalizer))
    }

    /// Sign of `self - other` read off its leading coefficient.
    pub fn compare(&self, other: &Series) -> Result<Ordering> {
        let d = self.sub(other)?;
        match d.terms.first() {
            Some((_, c)) => Ok(c.cmp(&Rational::zero())),
            None if d.is_exact() => Ok(Ordering::Equal),
            None => Err(Error::InsufficientPrecision(format!(
                "the series agree below {} but are not exact",
                d.precision.finite().expect("inexact")
            ))),
        }
    }

    /// Order of exact series, without allocating the difference.
    pub(crate) fn cmp_exact(&self, other: &Series) -> Ordering {
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.terms.get(i), other.terms.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some((_, c)), None) => return c.cmp(&Rational::zero()),
                (None, Some((_, c))) => return Rational::zero().cmp(c),
                (Some((ea, ca)), Some((eb, cb))) => match ea.cmp(eb) {
                    Ordering::Less => return ca.cmp(&Rational::zero()),
                    Ordering::Greater => return Rational::zero().cmp(cb),
                    Ordering::Equal => {
                        if ca != cb {
                            return ca.cmp(cb);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }

    pub fn signum(&self) -> Result<Ordering> {
        match self.terms.first() {
            Some((_, c)) => Ok(if c.is_positive() { Ordering::Greater } else { Ordering::Less }),
            None if self.is_exact() => Ok(Ordering::Equal),
            None => Err(Error::InsufficientPrecision("sign hidden beyond precision".into())),
        }
    }

    /// Agreement below the joint precision. Exact series must be equal.
    pub fn agrees(&self, other: &Series) -> bool {
        if self.group != other.group {
            return false;
        }
        let bound = self.precision.clone().min(other.precision.clone());
        let cut = |s: &Series| s.terms.iter().filter(|(e, _)| bound.covers(e)).cloned().collect::<Vec<_>>();
        cut(self) == cut(other)
    }

    /// Applies `f` to every exponent. `f` must be strictly increasing; the
    /// precision bound is mapped along with the terms.
    pub(crate) fn map_exponents(&self, f: impl Fn(&GroupElement) -> GroupElement) -> Series {
        let precision = match &self.precision {
            Precision::Finite(p) => Precision::Finite(f(p)),
            Precision::Infinite => Precision::Infinite,
        };
        Series {
            group: self.group,
            terms: self.terms.iter().map(|(e, c)| (f(e), c.clone())).collect(),
            precision,
        }
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::format_series(self, crate::syntax::Notation::T))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: GroupDescriptor = GroupDescriptor::Rationals;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn e(n: i64, d: i64) -> GroupElement {
        GroupElement::rational(q(n, d))
    }

    fn s(terms: &[(i64, i64)]) -> Series {
        Series::from_terms(Q, terms.iter().map(|&(x, c)| (e(x, 1), q(c, 1))).collect(), Precision::Infinite).unwrap()
    }

    fn with_prec(series: Series, p: i64) -> Series {
        series.truncate_to(&e(p, 1))
    }

    #[test]
    fn add_examples() {
        assert_eq!(s(&[(0, 1), (1, 1)]).add(&s(&[(0, -1), (2, 1)])).unwrap(), s(&[(1, 1), (2, 1)]));
        assert!(s(&[(1, 1)]).add(&s(&[(1, -1)])).unwrap().is_zero());
        let a = with_prec(s(&[(0, 1), (1, 1)]), 2);
        let sum = a.add(&s(&[(2, 1)])).unwrap();
        assert_eq!(sum, with_prec(s(&[(0, 1), (1, 1)]), 2));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(
            s(&[(0, 1), (1, 1)]).mul(&s(&[(0, 1), (1, -1)])).unwrap(),
            s(&[(0, 1), (2, -1)])
        );
        let a = Series::monomial(Q, e(-1, 1), q(1, 1));
        let b = Series::monomial(Q, e(1, 2), q(2, 1));
        assert_eq!(a.mul(&b).unwrap(), Series::monomial(Q, e(-1, 2), q(2, 1)));
        // unknown tail of 1 + t + O(t^2) times t^{-1} lands at exponent >= 1
        let inexact = with_prec(s(&[(0, 1), (1, 1)]), 2);
        let prod = inexact.mul(&s(&[(-1, 1)])).unwrap();
        assert_eq!(prod, with_prec(s(&[(-1, 1), (0, 1)]), 1));
    }

    #[test]
    fn mul_by_exact_zero_is_exact_zero() {
        let inexact = with_prec(s(&[(0, 1)]), 3);
        assert!(inexact.mul(&Series::zero(Q)).unwrap().is_zero());
    }

    #[test]
    fn mul_of_unknown_series_keeps_bound() {
        let unknown = Series::zero(Q).truncate_to(&e(2, 1));
        let prod = unknown.mul(&with_prec(s(&[(1, 1)]), 5)).unwrap();
        assert!(prod.terms().is_empty());
        assert_eq!(prod.precision(), &Precision::Finite(e(3, 1)));
    }

    #[test]
    fn invert_examples() {
        let m = Series::monomial(Q, e(-1, 1), q(2, 1));
        let inv = m.invert(&e(4, 1)).unwrap();
        assert_eq!(inv, Series::monomial(Q, e(1, 1), q(1, 2)));
        assert!(inv.is_exact());

        let inv = s(&[(0, 1), (1, 1)]).invert(&e(4, 1)).unwrap();
        assert_eq!(inv, with_prec(s(&[(0, 1), (1, -1), (2, 1), (3, -1)]), 4));
        let back = inv.mul(&s(&[(0, 1), (1, 1)])).unwrap();
        assert_eq!(back, with_prec(s(&[(0, 1)]), 4));

        assert_eq!(Series::zero(Q).invert(&e(4, 1)), Err(Error::DivisionByZero));
    }

    #[test]
    fn invert_shifted_series() {
        // s = 2t^{-2}(1 + t/2): product must be 1 below the target
        let series = s(&[(-2, 2), (-1, 1)]);
        let inv = series.invert(&e(3, 1)).unwrap();
        let prod = series.mul(&inv).unwrap();
        assert!(prod.agrees(&Series::one(Q)));
        assert!(prod.precision() >= &Precision::Finite(e(3, 1)));
    }

    #[test]
    fn invert_needs_precision() {
        let inexact = with_prec(s(&[(0, 1), (1, 1)]), 2);
        assert!(matches!(inexact.invert(&e(4, 1)), Err(Error::InsufficientPrecision(_))));
        assert!(inexact.invert(&e(2, 1)).is_ok());
        let unknown = Series::zero(Q).truncate_to(&e(5, 1));
        assert!(matches!(unknown.invert(&e(1, 1)), Err(Error::InsufficientPrecision(_))));
    }

    #[test]
    fn invert_detects_non_archimedean_tail() {
        let d = GroupDescriptor::LexPower(2);
        let lex = |a: i64, b: i64| GroupElement::from_tuple(d, vec![q(a, 1), q(b, 1)]).unwrap();
        let series = Series::from_terms(d, vec![(lex(0, 0), q(1, 1)), (lex(0, 1), q(1, 1))], Precision::Infinite).unwrap();
        assert!(matches!(series.invert(&lex(1, 0)), Err(Error::NonTerminating(_))));
        let inv = series.invert(&lex(0, 3)).unwrap();
        assert_eq!(inv.terms().len(), 3);
    }

    #[test]
    fn leading_term_examples() {
        let lt = s(&[(-2, 3), (1, 5)]).leading_term().unwrap();
        assert_eq!((lt.valuation, lt.coefficient), (e(-2, 1), q(3, 1)));
        let lt = s(&[(0, 7)]).leading_term().unwrap();
        assert_eq!((lt.valuation, lt.coefficient), (e(0, 1), q(7, 1)));
        assert_eq!(Series::zero(Q).leading_term(), Err(Error::ZeroSeries));
        let unknown = Series::zero(Q).truncate_to(&e(5, 1));
        assert!(matches!(unknown.leading_term(), Err(Error::InsufficientPrecision(_))));
    }

    #[test]
    fn compare_examples() {
        let half = Series::constant(Q, q(1, 2));
        assert_eq!(s(&[(1, 1)]).compare(&half).unwrap(), Ordering::Less);
        assert_eq!(s(&[(-2, 3), (1, 5)]).compare(&Series::zero(Q)).unwrap(), Ordering::Greater);
        assert_eq!(s(&[(-1, 1)]).compare(&s(&[(-1, 1), (3, 1)])).unwrap(), Ordering::Less);
        let a = with_prec(s(&[(0, 1)]), 2);
        assert!(matches!(a.compare(&s(&[(0, 1)])), Err(Error::InsufficientPrecision(_))));
        assert_eq!(s(&[(0, 1)]).compare(&s(&[(0, 1)])).unwrap(), Ordering::Equal);
    }

    #[test]
    fn coefficient_examples() {
        let series = s(&[(-2, 3), (1, 5)]);
        assert_eq!(series.coefficient_at(&e(1, 1)).unwrap(), q(5, 1));
        assert_eq!(series.coefficient_at(&e(0, 1)).unwrap(), q(0, 1));
        let inexact = with_prec(series, 2);
        assert!(matches!(inexact.coefficient_at(&e(3, 1)), Err(Error::InsufficientPrecision(_))));
    }

    #[test]
    fn truncate_examples() {
        let t = s(&[(0, 1), (1, 1), (2, 1)]).truncate_to(&e(2, 1));
        assert_eq!(t.terms().len(), 2);
        assert_eq!(t.precision(), &Precision::Finite(e(2, 1)));
        let one = Series::one(Q).truncate_to(&e(5, 1));
        assert_eq!(one.terms().len(), 1);
        assert_eq!(one.precision(), &Precision::Finite(e(5, 1)));
        let low = with_prec(s(&[(0, 1)]), 1);
        assert_eq!(low.truncate_to(&e(3, 1)), low);
    }

    #[test]
    fn descriptor_mismatch() {
        let z = Series::one(GroupDescriptor::Integers);
        assert!(matches!(z.add(&Series::one(Q)), Err(Error::DescriptorMismatch { .. })));
        assert!(matches!(z.mul(&Series::one(Q)), Err(Error::DescriptorMismatch { .. })));
    }

    #[test]
    fn cmp_exact_matches_compare() {
        let xs = [s(&[(-1, 1)]), s(&[(0, 2), (3, -1)]), s(&[(0, 2)]), Series::zero(Q), s(&[(1, -4)])];
        for a in &xs {
            for b in &xs {
                assert_eq!(a.cmp_exact(b), a.compare(b).unwrap());
            }
        }
    }
}
