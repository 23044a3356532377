//! Exact linear algebra over group coordinates.
//!
//! Every kind embeds into a rational vector space with a canonical
//! coordinate system: a single coordinate for the one-dimensional kinds,
//! one per position for `LexPower`, one per exponent for `SurrealDepth`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{GroupDescriptor, GroupElement};
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CoordKey {
    Index(usize),
    Exponent(GroupElement),
}

type Vector = BTreeMap<CoordKey, Rational>;

fn to_vector(g: &GroupElement) -> Vector {
    g.coords().into_iter().collect()
}

fn axpy(target: &mut Vector, factor: &Rational, row: &Vector) {
    for (k, c) in row {
        let entry = target.entry(k.clone()).or_insert_with(Rational::zero);
        *entry += factor * c;
        if entry.is_zero() {
            target.remove(k);
        }
    }
}

/// Row echelon form of rational generators with attached additive values.
///
/// Supports evaluating the unique Q-linear extension of the values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct RationalBasis {
    rows: Vec<(CoordKey, Vector, Rational)>,
}

impl RationalBasis {
    /// Returns the index of the first generator that is dependent on the
    /// previous ones as the error.
    pub(crate) fn new(generators: &[(GroupElement, Rational)]) -> Result<Self, usize> {
        let mut basis = RationalBasis { rows: Vec::new() };
        for (i, (g, value)) in generators.iter().enumerate() {
            let (mut v, mut val) = basis.reduce(to_vector(g), value.clone());
            let Some((pivot, lead)) = v.iter().next().map(|(k, c)| (k.clone(), c.clone())) else {
                return Err(i);
            };
            for c in v.values_mut() {
                *c /= &lead;
            }
            val /= &lead;
            basis.rows.push((pivot, v, val));
        }
        Ok(basis)
    }

    fn reduce(&self, mut v: Vector, mut value: Rational) -> (Vector, Rational) {
        for (pivot, row, row_value) in &self.rows {
            if let Some(c) = v.get(pivot).cloned() {
                axpy(&mut v, &-c.clone(), row);
                value -= c * row_value;
            }
        }
        (v, value)
    }

    /// Value of the linear extension at `g`, or `None` outside the span.
    pub(crate) fn eval(&self, g: &GroupElement) -> Option<Rational> {
        let (rest, value) = self.reduce(to_vector(g), Rational::zero());
        // reduce subtracts c * value for each pivot; the extension is the negation
        rest.is_empty().then(|| -value)
    }
}

/// Integer lattice spanned by generators, each carrying a positive rational
/// value, extended multiplicatively: `g = sum n_i g_i` maps to
/// `prod value_i^{n_i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct IntegerLattice {
    desc: GroupDescriptor,
    denominator: BigInt,
    rows: Vec<(CoordKey, BTreeMap<CoordKey, BigInt>, Rational)>,
}

#[derive(Debug, PartialEq, Eq)]
pub(crate) enum LatticeError {
    /// An integer relation among generators whose values do not multiply
    /// to 1; carries the offending product.
    Inconsistent(Rational),
}

fn pow(value: &Rational, n: &BigInt) -> Rational {
    let e: i32 = n.try_into().expect("lattice exponents stay small");
    num_traits::Pow::pow(value, e)
}

impl IntegerLattice {
    pub(crate) fn new(desc: GroupDescriptor, generators: &[(GroupElement, Rational)]) -> Result<Self, LatticeError> {
        let vectors: Vec<Vector> = generators.iter().map(|(g, _)| to_vector(g)).collect();
        let denominator = vectors
            .iter()
            .flat_map(|v| v.values())
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut pending: Vec<(BTreeMap<CoordKey, BigInt>, Rational)> = vectors
            .into_iter()
            .zip(generators)
            .map(|(v, (_, value))| {
                let ints = v
                    .into_iter()
                    .map(|(k, c)| {
                        let scaled = c * Rational::from_integer(denominator.clone());
                        (k, scaled.to_integer())
                    })
                    .collect();
                (ints, value.clone())
            })
            .collect();
        let mut rows = Vec::new();
        loop {
            pending.retain(|(v, value)| !v.is_empty() || !value.is_one());
            if let Some((_, value)) = pending.iter().find(|(v, _)| v.is_empty()) {
                return Err(LatticeError::Inconsistent(value.clone()));
            }
            let Some(key) = pending.iter().filter_map(|(v, _)| v.keys().next()).min().cloned() else {
                break;
            };
            // Euclid on column `key` among rows whose leading key is `key`.
            loop {
                let mut active: Vec<usize> = (0..pending.len()).filter(|&i| pending[i].0.contains_key(&key)).collect();
                active.sort_by_key(|&i| pending[i].0[&key].abs());
                let Some((&pivot, others)) = active.split_first() else {
                    break;
                };
                if others.is_empty() {
                    let (mut v, mut value) = pending.swap_remove(pivot);
                    if v[&key].is_negative() {
                        for c in v.values_mut() {
                            *c = -c.clone();
                        }
                        value = value.recip();
                    }
                    rows.push((key.clone(), v, value));
                    break;
                }
                let (pv, pval) = pending[pivot].clone();
                let p = pv[&key].clone();
                for &i in others {
                    let (v, value) = &mut pending[i];
                    let factor = v[&key].div_floor(&p);
                    for (k, c) in &pv {
                        let entry = v.entry(k.clone()).or_insert_with(BigInt::zero);
                        *entry -= &factor * c;
                        if entry.is_zero() {
                            v.remove(k);
                        }
                    }
                    *value = value.clone() / pow(&pval, &factor);
                }
            }
            pending.retain(|(v, value)| !v.is_empty() || !value.is_one());
            if let Some((_, value)) = pending.iter().find(|(v, _)| v.is_empty()) {
                return Err(LatticeError::Inconsistent(value.clone()));
            }
        }
        Ok(IntegerLattice { desc, denominator, rows })
    }

    pub(crate) fn descriptor(&self) -> GroupDescriptor {
        self.desc
    }

    /// Multiplicative value at `g`, or `None` outside the integer span.
    pub(crate) fn eval(&self, g: &GroupElement) -> Option<Rational> {
        let mut v: BTreeMap<CoordKey, BigInt> = BTreeMap::new();
        for (k, c) in g.coords() {
            let scaled = c * Rational::from_integer(self.denominator.clone());
            if !scaled.is_integer() {
                return None;
            }
            v.insert(k, scaled.to_integer());
        }
        let mut value = Rational::one();
        for (pivot, row, row_value) in &self.rows {
            let Some(c) = v.get(pivot).cloned() else { continue };
            let p = &row[pivot];
            if !c.is_multiple_of(p) {
                return None;
            }
            let n = c / p;
            for (k, rc) in row {
                let entry = v.entry(k.clone()).or_insert_with(BigInt::zero);
                *entry -= &n * rc;
                if entry.is_zero() {
                    v.remove(k);
                }
            }
            value *= pow(row_value, &n);
        }
        v.is_empty().then_some(value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn qe(n: i64, d: i64) -> GroupElement {
        GroupElement::rational(q(n, d))
    }

    fn lex(v: &[i64]) -> GroupElement {
        GroupElement::from_tuple(GroupDescriptor::LexPower(v.len() as u32), v.iter().map(|&c| q(c, 1)).collect()).unwrap()
    }

    #[test]
    fn rational_basis_extends_linearly() {
        let b = RationalBasis::new(&[(lex(&[1, 0]), q(1, 1)), (lex(&[0, 1]), q(-2, 1))]).unwrap();
        let g = GroupElement::from_tuple(GroupDescriptor::LexPower(2), vec![q(3, 1), q(1, 2)]).unwrap();
        assert_eq!(b.eval(&g), Some(q(2, 1)));
        let skew = RationalBasis::new(&[(lex(&[1, 1]), q(5, 1)), (lex(&[1, -1]), q(1, 1))]).unwrap();
        assert_eq!(skew.eval(&lex(&[2, 0])), Some(q(6, 1)));
        assert_eq!(skew.eval(&lex(&[0, 2])), Some(q(4, 1)));
    }

    #[test]
    fn rational_basis_detects_dependence_and_span() {
        assert_eq!(RationalBasis::new(&[(qe(1, 1), q(1, 1)), (qe(2, 1), q(2, 1))]), Err(1));
        let b = RationalBasis::new(&[(lex(&[1, 0, 0]), q(1, 1))]).unwrap();
        assert_eq!(b.eval(&lex(&[0, 1, 0])), None);
    }

    #[test]
    fn lattice_handles_redundant_generators() {
        let l = IntegerLattice::new(GroupDescriptor::Rationals, &[(qe(1, 1), q(2, 1)), (qe(2, 1), q(4, 1))]).unwrap();
        assert_eq!(l.eval(&qe(3, 1)), Some(q(8, 1)));
        assert_eq!(l.eval(&qe(-2, 1)), Some(q(1, 4)));
        assert_eq!(l.eval(&qe(1, 2)), None);
    }

    #[test]
    fn lattice_gcd_of_generators() {
        // 4Z + 6Z = 2Z with chi(4) = 9, chi(6) = 27 forces chi(2) = 3.
        let l = IntegerLattice::new(GroupDescriptor::Rationals, &[(qe(4, 1), q(9, 1)), (qe(6, 1), q(27, 1))]).unwrap();
        assert_eq!(l.eval(&qe(2, 1)), Some(q(3, 1)));
        assert_eq!(l.eval(&qe(1, 1)), None);
    }

    #[test]
    fn lattice_rejects_inconsistent_values() {
        let err = IntegerLattice::new(GroupDescriptor::Rationals, &[(qe(1, 1), q(2, 1)), (qe(2, 1), q(3, 1))]).unwrap_err();
        assert_eq!(err, LatticeError::Inconsistent(q(3, 4)));
        assert!(IntegerLattice::new(GroupDescriptor::Rationals, &[(qe(0, 1), q(2, 1))]).is_err());
    }

    #[test]
    fn lattice_in_two_dimensions() {
        let l = IntegerLattice::new(
            GroupDescriptor::LexPower(2),
            &[(lex(&[1, 1]), q(2, 1)), (lex(&[0, 1]), q(3, 1))],
        )
        .unwrap();
        assert_eq!(l.eval(&lex(&[1, 0])), Some(q(2, 3)));
        assert_eq!(l.eval(&lex(&[2, 5])), Some(q(4 * 27, 1)));
    }
}
