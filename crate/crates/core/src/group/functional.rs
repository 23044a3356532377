use std::collections::BTreeMap;

use num_traits::Zero;

use super::linear::RationalBasis;
use super::{GroupDescriptor, GroupElement};
use crate::error::{Error, Result};
use crate::Rational;

/// A Q-linear map from a value group into the rationals.
///
/// Stored on a finite list of linearly independent generators and extended
/// linearly; evaluation outside their span is an error. For surreal groups
/// the monomials `t^e` form a basis, so a functional may also be given by
/// its values on finitely many monomials (zero on all others), which makes
/// it total.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearFunctional {
    desc: GroupDescriptor,
    form: Form,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Form {
    Generators {
        pairs: Vec<(GroupElement, Rational)>,
        basis: RationalBasis,
    },
    Monomials(BTreeMap<GroupElement, Rational>),
}

impl LinearFunctional {
    pub fn from_generators(desc: GroupDescriptor, pairs: Vec<(GroupElement, Rational)>) -> Result<Self> {
        for (g, _) in &pairs {
            desc.check(g.descriptor())?;
        }
        let basis = RationalBasis::new(&pairs).map_err(|i| {
            Error::InvalidFunctional(format!("generator {} is linearly dependent on the others", pairs[i].0))
        })?;
        Ok(LinearFunctional {
            desc,
            form: Form::Generators { pairs, basis },
        })
    }

    /// Values on the standard generators (`1`, or the unit vectors of
    /// `LexPower`).
    pub fn standard(desc: GroupDescriptor, values: Vec<Rational>) -> Result<Self> {
        let gens = desc
            .standard_generators()
            .ok_or_else(|| Error::InvalidFunctional(format!("{desc} has no standard generators")))?;
        if gens.len() != values.len() {
            return Err(Error::InvalidFunctional(format!(
                "{desc} needs {} values, got {}",
                gens.len(),
                values.len()
            )));
        }
        LinearFunctional::from_generators(desc, gens.into_iter().zip(values).collect())
    }

    /// The identity `g -> g` of a one-dimensional kind.
    pub fn identity(desc: GroupDescriptor) -> Result<Self> {
        LinearFunctional::standard(desc, vec![Rational::from_integer(1.into())])
    }

    /// Functional on `SD(d)`, `d >= 1`, given by values on monomials `t^e`.
    pub fn on_monomials(desc: GroupDescriptor, values: BTreeMap<GroupElement, Rational>) -> Result<Self> {
        let lower = desc
            .lower()
            .ok_or_else(|| Error::InvalidFunctional(format!("{desc} is not a series group")))?;
        for e in values.keys() {
            lower.check(e.descriptor())?;
        }
        let values = values.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Ok(LinearFunctional {
            desc,
            form: Form::Monomials(values),
        })
    }

    /// Coefficient extraction `s -> s_e` on a surreal group.
    pub fn coefficient_at(desc: GroupDescriptor, exponent: GroupElement) -> Result<Self> {
        LinearFunctional::on_monomials(desc, BTreeMap::from([(exponent, Rational::from_integer(1.into()))]))
    }

    /// The zero functional, total on every kind.
    pub fn zero(desc: GroupDescriptor) -> Self {
        match desc.standard_generators() {
            Some(gens) => LinearFunctional::from_generators(desc, gens.into_iter().map(|g| (g, Rational::zero())).collect())
                .expect("standard generators are independent"),
            None => LinearFunctional {
                desc,
                form: Form::Monomials(BTreeMap::new()),
            },
        }
    }

    pub fn descriptor(&self) -> GroupDescriptor {
        self.desc
    }

    pub fn is_zero(&self) -> bool {
        match &self.form {
            Form::Generators { pairs, .. } => pairs.iter().all(|(_, v)| v.is_zero()),
            Form::Monomials(m) => m.is_empty(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scaled(&Rational::from_integer((-1).into()))
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        match &self.form {
            Form::Generators { pairs, .. } => LinearFunctional::from_generators(
                self.desc,
                pairs.iter().map(|(g, v)| (g.clone(), v * factor)).collect(),
            )
            .expect("scaling keeps generators independent"),
            Form::Monomials(m) => LinearFunctional::on_monomials(
                self.desc,
                m.iter().map(|(e, v)| (e.clone(), v * factor)).collect(),
            )
            .expect("same exponents"),
        }
    }

    /// Generator pairs, or monomial values for the monomial form.
    pub fn pairs(&self) -> Vec<(GroupElement, Rational)> {
        match &self.form {
            Form::Generators { pairs, .. } => pairs.clone(),
            Form::Monomials(m) => m.iter().map(|(e, v)| (e.clone(), v.clone())).collect(),
        }
    }

    pub fn is_monomial_form(&self) -> bool {
        matches!(self.form, Form::Monomials(_))
    }

    pub fn eval(&self, g: &GroupElement) -> Result<Rational> {
        self.desc.check(g.descriptor())?;
        match &self.form {
            Form::Generators { basis, .. } => basis.eval(g).ok_or_else(|| Error::OutsideSpan(g.to_string())),
            Form::Monomials(m) => {
                let s = g.as_series().expect("surreal group elements are series");
                Ok(s.terms()
                    .iter()
                    .filter_map(|(e, c)| m.get(e).map(|v| v * c))
                    .fold(Rational::zero(), |acc, x| acc + x))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{Precision, Series};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn rationals_generator_one() {
        let phi = LinearFunctional::standard(GroupDescriptor::Rationals, vec![q(6, 1)]).unwrap();
        assert_eq!(phi.eval(&GroupElement::rational(q(1, 3))).unwrap(), q(2, 1));
    }

    #[test]
    fn lex_dot_product() {
        let d = GroupDescriptor::LexPower(2);
        let phi = LinearFunctional::standard(d, vec![q(1, 1), q(-2, 1)]).unwrap();
        let g = GroupElement::from_tuple(d, vec![q(3, 1), q(1, 2)]).unwrap();
        assert_eq!(phi.eval(&g).unwrap(), q(2, 1));
    }

    #[test]
    fn surreal_coefficient_extraction() {
        let d = GroupDescriptor::SurrealDepth(1);
        let lower = GroupDescriptor::SurrealDepth(0);
        let phi = LinearFunctional::coefficient_at(d, lower.zero()).unwrap();
        let s = Series::from_terms(
            lower,
            vec![(lower.zero(), q(3, 1)), (lower.one(), q(2, 1))],
            Precision::Infinite,
        )
        .unwrap();
        let g = GroupElement::from_series(d, s).unwrap();
        assert_eq!(phi.eval(&g).unwrap(), q(3, 1));
    }

    #[test]
    fn surreal_generators_outside_span() {
        let d = GroupDescriptor::SurrealDepth(1);
        let phi = LinearFunctional::from_generators(d, vec![(d.one(), q(1, 1))]).unwrap();
        let lower = GroupDescriptor::SurrealDepth(0);
        let t = Series::monomial(lower, lower.one(), q(1, 1));
        let g = GroupElement::from_series(d, t).unwrap();
        assert!(matches!(phi.eval(&g), Err(Error::OutsideSpan(_))));
        assert_eq!(phi.eval(&d.scalar(q(5, 2)).unwrap()).unwrap(), q(5, 2));
    }

    #[test]
    fn dependent_generators_rejected() {
        let d = GroupDescriptor::Rationals;
        let err = LinearFunctional::from_generators(
            d,
            vec![(GroupElement::rational(q(1, 1)), q(1, 1)), (GroupElement::rational(q(3, 1)), q(0, 1))],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidFunctional(_)));
    }

    #[test]
    fn zero_functional_is_total() {
        let phi = LinearFunctional::zero(GroupDescriptor::LexPower(3));
        let g = GroupElement::from_tuple(GroupDescriptor::LexPower(3), vec![q(1, 1), q(2, 1), q(3, 1)]).unwrap();
        assert_eq!(phi.eval(&g).unwrap(), q(0, 1));
        assert!(phi.is_zero());
        let psi = LinearFunctional::zero(GroupDescriptor::SurrealDepth(2));
        assert_eq!(psi.eval(&GroupDescriptor::SurrealDepth(2).one()).unwrap(), q(0, 1));
    }
}
