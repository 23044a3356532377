//! Strongly linear derivations given by their action on monomials, and the
//! exponential `exp(d) = sum d^i / i!` of a contracting derivation.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::group::{GroupDescriptor, GroupElement, LinearFunctional};
use crate::report::{Check, Witness};
use crate::sample::{SampleSpec, Sampler};
use crate::series::{Precision, Series};
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DerivationRule {
    /// `d(t^g) = phi(g) t^(g + shift)`.
    PhiShift { phi: LinearFunctional, shift: GroupElement },
    /// Explicit images of monomials. Exponents missing from the table are
    /// an error unless `zero_default` sends them to 0.
    Table {
        images: BTreeMap<GroupElement, Series>,
        zero_default: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialDerivation {
    desc: GroupDescriptor,
    rule: DerivationRule,
    /// Least valuation increase `v(d(t^g)) - g` over the rule; `None` when
    /// every monomial maps to 0.
    gain: Option<GroupElement>,
}

impl MonomialDerivation {
    /// `d_phi` with the given shift, which must be positive so that the
    /// derivation is contracting.
    pub fn phi_shift(phi: LinearFunctional, shift: GroupElement) -> Result<Self> {
        let desc = phi.descriptor();
        desc.check(shift.descriptor())?;
        if !shift.is_positive() {
            return Err(Error::NonContracting(format!("shift {shift} is not positive")));
        }
        Ok(MonomialDerivation {
            desc,
            gain: if phi.is_zero() { None } else { Some(shift.clone()) },
            rule: DerivationRule::PhiShift { phi, shift },
        })
    }

    /// Table rule. The gain is computed from the images and may be
    /// nonpositive; such derivations are rejected by [`exp_apply`] and
    /// reported by [`check_derivation`].
    pub fn table(desc: GroupDescriptor, images: BTreeMap<GroupElement, Series>, zero_default: bool) -> Result<Self> {
        let mut gain: Option<GroupElement> = None;
        for (g, image) in &images {
            desc.check(g.descriptor())?;
            desc.check(image.group())?;
            let Some(v) = image.valuation_bound() else { continue };
            let d = v.minus(g);
            gain = Some(match gain {
                Some(cur) if cur <= d => cur,
                _ => d,
            });
        }
        Ok(MonomialDerivation {
            desc,
            rule: DerivationRule::Table { images, zero_default },
            gain,
        })
    }

    pub fn zero(desc: GroupDescriptor) -> Self {
        MonomialDerivation {
            desc,
            rule: DerivationRule::Table {
                images: BTreeMap::new(),
                zero_default: true,
            },
            gain: None,
        }
    }

    pub fn descriptor(&self) -> GroupDescriptor {
        self.desc
    }

    pub fn rule(&self) -> &DerivationRule {
        &self.rule
    }

    pub fn gain(&self) -> Option<&GroupElement> {
        self.gain.as_ref()
    }

    pub fn is_contracting(&self) -> bool {
        self.gain.as_ref().is_none_or(GroupElement::is_positive)
    }

    pub fn is_zero(&self) -> bool {
        self.gain.is_none()
    }

    pub fn neg(&self) -> MonomialDerivation {
        let rule = match &self.rule {
            DerivationRule::PhiShift { phi, shift } => DerivationRule::PhiShift {
                phi: phi.neg(),
                shift: shift.clone(),
            },
            DerivationRule::Table { images, zero_default } => DerivationRule::Table {
                images: images.iter().map(|(g, s)| (g.clone(), s.neg())).collect(),
                zero_default: *zero_default,
            },
        };
        MonomialDerivation {
            desc: self.desc,
            rule,
            gain: self.gain.clone(),
        }
    }

    /// Termwise application. The unknown tail of `s` only contributes at
    /// or above `P + gain`, which becomes the result's precision.
    pub fn apply(&self, s: &Series) -> Result<Series> {
        self.desc.check(s.group())?;
        let Some(gain) = &self.gain else {
            if let DerivationRule::Table { images, zero_default: false } = &self.rule {
                for (e, _) in s.terms() {
                    if !images.contains_key(e) {
                        return Err(Error::UnmappedExponent(e.to_string()));
                    }
                }
            }
            return Ok(Series::zero(self.desc));
        };
        let precision = s.precision().shifted(gain);
        match &self.rule {
            DerivationRule::PhiShift { phi, shift } => {
                let mut terms = Vec::with_capacity(s.terms().len());
                for (e, c) in s.terms() {
                    let f = phi.eval(e)?;
                    if !f.is_zero() {
                        terms.push((e.plus(shift), c * f));
                    }
                }
                Ok(Series::from_terms(self.desc, terms, precision).expect("same group"))
            }
            DerivationRule::Table { images, zero_default } => {
                let mut acc = Series::zero(self.desc);
                for (e, c) in s.terms() {
                    match images.get(e) {
                        Some(image) => acc = acc.add_unchecked(&image.scale(c)),
                        None if *zero_default => {}
                        None => return Err(Error::UnmappedExponent(e.to_string())),
                    }
                }
                Ok(acc.with_bound(precision))
            }
        }
    }
}

/// `exp(d)(s) = sum_i d^i(s) / i!`, certified below `target`.
///
/// With gain `g > 0`, the summand `d^i(s)/i!` has valuation at least
/// `v(s) + i*g`, so only the indices with `v(s) + i*g < target` matter.
pub(crate) fn exp_apply(d: &MonomialDerivation, target: &GroupElement, s: &Series) -> Result<Series> {
    d.desc.check(s.group())?;
    d.desc.check(target.descriptor())?;
    let Some(gain) = d.gain() else {
        return Ok(s.clone());
    };
    if !gain.is_positive() {
        return Err(Error::NonContracting(format!("gain {gain} is not positive")));
    }
    let Some(v) = s.valuation_bound() else {
        return Ok(s.clone());
    };
    let steps = gain.multiples_to_reach(&target.minus(v)).ok_or_else(|| {
        Error::NonTerminating(format!("multiples of the gain {gain} never reach {target} from {v}"))
    })?;
    let mut acc = s.clone();
    let mut summand = s.clone();
    for i in 1..=steps {
        let next = d.apply(&summand)?;
        if next.is_zero() && next.is_exact() {
            return Ok(acc);
        }
        summand = next.scale(&Rational::new(1.into(), i.into())).truncate_to(target);
        acc = acc.add_unchecked(&summand);
    }
    // every later summand lies at or above the target
    Ok(acc.truncate_to(target))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationReport {
    pub spec: SampleSpec,
    pub leibniz: Check,
    pub contracting: Check,
    pub additive: Check,
}

impl DerivationReport {
    pub fn passed(&self) -> bool {
        self.leibniz.passed() && self.contracting.passed() && self.additive.passed()
    }
}

/// Sampled inputs on which `d` is defined: all exponents mapped.
fn sample_inputs(d: &MonomialDerivation, spec: &SampleSpec) -> (Vec<(Series, Series)>, Vec<Series>) {
    let basics = Sampler::basic_exponents(d.desc);
    let mapped = |g: &GroupElement| match &d.rule {
        DerivationRule::Table { images, zero_default } => *zero_default || images.contains_key(g),
        DerivationRule::PhiShift { .. } => true,
    };
    let mono = |g: &GroupElement| Series::monomial(d.desc, g.clone(), Rational::from_integer(1.into()));
    let mut pairs = Vec::new();
    for g in &basics {
        for h in &basics {
            if mapped(g) && mapped(h) && mapped(&g.plus(h)) {
                pairs.push((mono(g), mono(h)));
            }
        }
    }
    let mut singles: Vec<Series> = basics.iter().filter(|g| mapped(g)).map(mono).collect();
    let mut sampler = match &d.rule {
        DerivationRule::Table { images, zero_default: false } => {
            // keys whose pairwise sums stay inside the table
            let keys: Vec<GroupElement> = images.keys().cloned().collect();
            for g in &keys {
                for h in &keys {
                    if images.contains_key(&g.plus(h)) && !pairs.contains(&(mono(g), mono(h))) {
                        pairs.push((mono(g), mono(h)));
                    }
                }
                if !singles.contains(&mono(g)) {
                    singles.push(mono(g));
                }
            }
            None
        }
        _ => Some(Sampler::new(d.desc, spec.seed)),
    };
    if let Some(sampler) = sampler.as_mut() {
        while pairs.len() < spec.count {
            let a = sampler.nonzero_series(3);
            let a = sampler.maybe_truncate(a);
            let b = sampler.nonzero_series(3);
            let b = sampler.maybe_truncate(b);
            pairs.push((a, b));
        }
        while singles.len() < spec.count {
            let a = sampler.nonzero_series(4);
            singles.push(sampler.maybe_truncate(a));
        }
    }
    pairs.truncate(spec.count.max(1));
    singles.truncate(spec.count.max(1));
    (pairs, singles)
}

/// Evaluates the Leibniz rule, the contracting condition and additivity on
/// seeded samples. Failures are reported with the first counterexample.
pub fn check_derivation(d: &MonomialDerivation, spec: &SampleSpec) -> DerivationReport {
    let (pairs, singles) = sample_inputs(d, spec);
    let mut leibniz = Check::default();
    let mut additive = Check::default();
    let mut contracting = Check::default();

    for (a, b) in &pairs {
        let lhs = a.mul_unchecked(b);
        let sides = (|| -> Result<(Series, Series)> {
            let left = d.apply(&lhs)?;
            let right = a.mul_unchecked(&d.apply(b)?).add_unchecked(&b.mul_unchecked(&d.apply(a)?));
            Ok((left, right))
        })();
        match sides {
            Ok((left, right)) => leibniz.record(left.agrees(&right), || {
                Witness::new(
                    vec![("a", a.clone()), ("b", b.clone())],
                    vec![("d(a*b)", left), ("a*d(b) + b*d(a)", right)],
                )
            }),
            Err(_) => leibniz.skip(),
        }
        let sides = (|| -> Result<(Series, Series)> {
            let left = d.apply(&a.add_unchecked(b))?;
            let right = d.apply(a)?.add_unchecked(&d.apply(b)?);
            Ok((left, right))
        })();
        match sides {
            Ok((left, right)) => additive.record(left.agrees(&right), || {
                Witness::new(
                    vec![("a", a.clone()), ("b", b.clone())],
                    vec![("d(a+b)", left), ("d(a) + d(b)", right)],
                )
            }),
            Err(_) => additive.skip(),
        }
    }

    for a in &singles {
        let (Ok(image), Some(va)) = (d.apply(a), a.valuation()) else {
            contracting.skip();
            continue;
        };
        match image.valuation() {
            Some(vd) => contracting.record(vd > va, || {
                Witness::new(vec![("a", a.clone())], vec![("d(a)", image.clone())])
                    .with_note(format!("v(d(a)) = {vd} is not above v(a) = {va}"))
            }),
            // d(a) = 0, or vanishing below its precision, which lies above v(a)
            None if image.is_zero() || image.precision() > &Precision::Finite(va.clone()) => contracting.pass(),
            None => contracting.skip(),
        }
    }

    DerivationReport {
        spec: *spec,
        leibniz,
        contracting,
        additive,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Status;
    use crate::syntax::{parse_series, Notation};

    const Q: GroupDescriptor = GroupDescriptor::Rationals;

    fn s(text: &str) -> Series {
        parse_series(text, Q, Notation::T).unwrap()
    }

    fn qe(n: i64) -> GroupElement {
        GroupElement::rational(Rational::from_integer(n.into()))
    }

    fn d_id() -> MonomialDerivation {
        MonomialDerivation::phi_shift(LinearFunctional::identity(Q).unwrap(), qe(1)).unwrap()
    }

    #[test]
    fn phi_shift_application() {
        let d = d_id();
        assert_eq!(d.apply(&s("5 + 3*t^(2)")).unwrap(), s("6*t^(3)"));
        assert_eq!(d.apply(&Series::zero(Q)).unwrap(), Series::zero(Q));
        let lhs = d.apply(&s("t^(3)")).unwrap();
        let rhs = s("t^(1)").mul(&d.apply(&s("t^(2)")).unwrap()).unwrap()
            .add(&s("t^(2)").mul(&d.apply(&s("t^(1)")).unwrap()).unwrap())
            .unwrap();
        assert_eq!(lhs, s("3*t^(4)"));
        assert_eq!(rhs, lhs);
    }

    #[test]
    fn nonpositive_shift_is_rejected() {
        let err = MonomialDerivation::phi_shift(LinearFunctional::identity(Q).unwrap(), qe(0)).unwrap_err();
        assert_eq!(err.kind(), "NonContracting");
    }

    #[test]
    fn precision_shifts_by_gain() {
        let d = d_id();
        let out = d.apply(&s("t^(1) + t^(2) (mod t^(3))")).unwrap();
        assert_eq!(out, s("t^(2) + 2*t^(3) (mod t^(4))"));
    }

    #[test]
    fn exp_of_d_id() {
        let d = d_id();
        let out = exp_apply(&d, &qe(5), &s("t^(1)")).unwrap();
        assert_eq!(out, s("t^(1) + t^(2) + t^(3) + t^(4) (mod t^(5))"));
        let out = exp_apply(&d, &qe(5), &s("t^(2)")).unwrap();
        assert_eq!(out, s("t^(2) + 2*t^(3) + 3*t^(4) (mod t^(5))"));
        // constants are killed by d, so the sum is exact
        assert_eq!(exp_apply(&d, &qe(5), &s("7")).unwrap(), s("7"));
    }

    #[test]
    fn zero_derivation_exponentiates_to_identity() {
        let d = MonomialDerivation::phi_shift(LinearFunctional::zero(Q), qe(1)).unwrap();
        assert!(d.is_zero());
        assert_eq!(exp_apply(&d, &qe(5), &s("t^(1) + 3")).unwrap(), s("t^(1) + 3"));
    }

    #[test]
    fn report_for_d_id_passes() {
        let report = check_derivation(&d_id(), &SampleSpec::new(7, 50));
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.leibniz.evaluated + report.leibniz.skipped, 50);
    }

    #[test]
    fn non_additive_table_fails_leibniz_at_t_t() {
        let images = (-2..=6).map(|g| (qe(g), s(&format!("t^({})", g + 1)))).collect();
        let d = MonomialDerivation::table(Q, images, false).unwrap();
        let report = check_derivation(&d, &SampleSpec::new(0, 50));
        assert_eq!(report.leibniz.status, Status::Fail);
        let w = report.leibniz.witness.unwrap();
        assert_eq!(w.inputs[0].1, s("t^(1)"));
        assert_eq!(w.inputs[1].1, s("t^(1)"));
        assert_eq!(w.sides[0].1, s("t^(3)"));
        assert_eq!(w.sides[1].1, s("2*t^(3)"));
        assert!(report.contracting.passed());
    }

    #[test]
    fn identity_table_is_not_contracting() {
        let images = (-2..=4).map(|g| (qe(g), s(&format!("t^({g})")))).collect();
        let d = MonomialDerivation::table(Q, images, false).unwrap();
        assert!(!d.is_contracting());
        let report = check_derivation(&d, &SampleSpec::default());
        assert_eq!(report.contracting.status, Status::Fail);
    }
}
