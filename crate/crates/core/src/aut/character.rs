use std::collections::BTreeMap;

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::group::linear::{IntegerLattice, LatticeError};
use crate::group::{GroupDescriptor, GroupElement};
use crate::Rational;

/// Positive multiplicative character on the integer span of finitely many
/// generators: `sum n_i g_i` maps to `prod value_i^{n_i}`.
///
/// Values are positive because a homomorphism from a divisible ordered
/// group into the multiplicative group of an ordered field lands in the
/// positive elements; on a bare lattice that cannot be derived, so it is
/// required up front.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialCharacter {
    desc: GroupDescriptor,
    generators: Vec<(GroupElement, Rational)>,
    lattice: IntegerLattice,
}

impl PartialCharacter {
    pub fn new(desc: GroupDescriptor, generators: Vec<(GroupElement, Rational)>) -> Result<Self> {
        for (g, value) in &generators {
            desc.check(g.descriptor())?;
            if !value.is_positive() {
                return Err(Error::InvalidCharacter(format!("value {value} at {g} is not positive")));
            }
        }
        let lattice = IntegerLattice::new(desc, &generators).map_err(|LatticeError::Inconsistent(v)| {
            Error::InvalidCharacter(format!(
                "values are not multiplicative: an integer relation among the generators evaluates to {v}"
            ))
        })?;
        Ok(PartialCharacter {
            desc,
            generators,
            lattice,
        })
    }

    pub fn trivial(desc: GroupDescriptor) -> Self {
        PartialCharacter::new(desc, Vec::new()).expect("empty character")
    }

    pub fn descriptor(&self) -> GroupDescriptor {
        self.desc
    }

    pub fn generators(&self) -> &[(GroupElement, Rational)] {
        &self.generators
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.iter().all(|(_, v)| v.is_one())
    }

    pub fn eval(&self, g: &GroupElement) -> Result<Rational> {
        self.desc.check(g.descriptor())?;
        debug_assert_eq!(self.lattice.descriptor(), self.desc);
        // all-one values extend to the trivial character on the whole group
        if g.is_zero() || self.is_trivial() {
            return Ok(Rational::one());
        }
        self.lattice
            .eval(g)
            .ok_or_else(|| Error::DomainError(format!("{g} is outside the integer span of the character's lattice")))
    }

    pub fn inverse(&self) -> PartialCharacter {
        PartialCharacter::new(
            self.desc,
            self.generators.iter().map(|(g, v)| (g.clone(), v.recip())).collect(),
        )
        .expect("reciprocals of a consistent character are consistent")
    }
}

/// Per-exponent positive scaling `c(gamma)`: a default plus finitely many
/// exceptions. No homomorphism law is imposed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalingFamily {
    desc: GroupDescriptor,
    default: Rational,
    exceptions: BTreeMap<GroupElement, Rational>,
}

impl ScalingFamily {
    pub fn new(desc: GroupDescriptor, default: Rational, exceptions: BTreeMap<GroupElement, Rational>) -> Result<Self> {
        if !default.is_positive() {
            return Err(Error::InvalidMap(format!("default scale {default} is not positive")));
        }
        for (g, c) in &exceptions {
            desc.check(g.descriptor())?;
            if !c.is_positive() {
                return Err(Error::InvalidMap(format!("scale {c} at {g} is not positive")));
            }
        }
        Ok(ScalingFamily {
            desc,
            default,
            exceptions,
        })
    }

    pub fn unit(desc: GroupDescriptor) -> Self {
        ScalingFamily {
            desc,
            default: Rational::one(),
            exceptions: BTreeMap::new(),
        }
    }

    pub fn descriptor(&self) -> GroupDescriptor {
        self.desc
    }

    pub fn default_value(&self) -> &Rational {
        &self.default
    }

    pub fn exceptions(&self) -> &BTreeMap<GroupElement, Rational> {
        &self.exceptions
    }

    pub fn at(&self, g: &GroupElement) -> &Rational {
        self.exceptions.get(g).unwrap_or(&self.default)
    }

    pub fn is_unit(&self) -> bool {
        self.default.is_one() && self.exceptions.values().all(One::is_one)
    }

    /// Scaling for the inverse external map: keyed by image exponents.
    pub(crate) fn inverse_along(&self, image: impl Fn(&GroupElement) -> GroupElement) -> ScalingFamily {
        ScalingFamily {
            desc: self.desc,
            default: self.default.recip(),
            exceptions: self.exceptions.iter().map(|(g, c)| (image(g), c.recip())).collect(),
        }
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

    #[test]
    fn character_on_integer_span() {
        let chi = PartialCharacter::new(GroupDescriptor::Rationals, vec![(qe(1, 1), q(2, 1))]).unwrap();
        assert_eq!(chi.eval(&qe(-1, 1)).unwrap(), q(1, 2));
        assert_eq!(chi.eval(&qe(2, 1)).unwrap(), q(4, 1));
        assert!(matches!(chi.eval(&qe(1, 2)), Err(Error::DomainError(_))));
        assert_eq!(chi.inverse().eval(&qe(1, 1)).unwrap(), q(1, 2));
    }

    #[test]
    fn character_rejects_nonpositive_values() {
        let err = PartialCharacter::new(GroupDescriptor::Rationals, vec![(qe(1, 1), q(-2, 1))]).unwrap_err();
        assert!(matches!(err, Error::InvalidCharacter(_)));
    }

    #[test]
    fn character_accepts_consistent_redundant_lattice() {
        let chi = PartialCharacter::new(GroupDescriptor::Rationals, vec![(qe(1, 1), q(2, 1)), (qe(2, 1), q(4, 1))]).unwrap();
        assert_eq!(chi.eval(&qe(2, 1)).unwrap(), q(4, 1));
        assert!(PartialCharacter::new(GroupDescriptor::Rationals, vec![(qe(1, 1), q(2, 1)), (qe(2, 1), q(5, 1))]).is_err());
    }

    #[test]
    fn trivial_character_is_one_everywhere_on_zero() {
        let chi = PartialCharacter::trivial(GroupDescriptor::Rationals);
        assert_eq!(chi.eval(&qe(0, 1)).unwrap(), q(1, 1));
        assert!(chi.is_trivial());
    }

    #[test]
    fn scaling_family() {
        let c = ScalingFamily::new(GroupDescriptor::Rationals, q(1, 1), BTreeMap::from([(qe(0, 1), q(3, 1))])).unwrap();
        assert_eq!(c.at(&qe(0, 1)), &q(3, 1));
        assert_eq!(c.at(&qe(5, 1)), &q(1, 1));
        assert!(ScalingFamily::new(GroupDescriptor::Rationals, q(0, 1), BTreeMap::new()).is_err());
    }
}
