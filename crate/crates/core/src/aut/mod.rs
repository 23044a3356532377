//! Automorphisms of truncated Hahn series: primitive factors, composition,
//! inversion, induced maps, classification and factorization.
//!
//! An [`Automorphism`] is a tree of nodes. Field nodes (external maps of
//! the exponents, character lifts, derivation exponentials) respect both
//! operations; group nodes (multiplication by a unit `1 + e`, exponent
//! bijections with per-exponent scaling) only respect addition and order.

pub mod character;
mod classify;
mod factorize;

use std::collections::BTreeMap;

use num_traits::One;

use crate::derivation::{check_derivation, exp_apply, DerivationRule, MonomialDerivation};
use crate::error::{AtNode, Error, Result};
use crate::group::{AdditiveAutomorphism, Direction, GroupDescriptor, GroupElement, MonotoneMap};
use crate::sample::SampleSpec;
use crate::series::{Precision, Series};
use crate::Rational;

pub use character::{PartialCharacter, ScalingFamily};
pub use classify::{classify, classify_pairs, class_samples, ClassReport};
pub use factorize::{factorize, FactorMode, Factorization};

/// Declared class of an automorphism.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AutClass {
    /// Respects `+`, `*` and the order.
    Field,
    /// Respects `+` and the order only.
    Group,
}

impl std::fmt::Display for AutClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AutClass::Field => "field",
            AutClass::Group => "group",
        })
    }
}

/// Evaluation settings shared by every node of a tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApplyContext {
    /// Bound used when an exact input meets a node whose output is an
    /// infinite expansion (division by a unit).
    pub precision: Precision,
}

impl Default for ApplyContext {
    fn default() -> Self {
        ApplyContext {
            precision: Precision::Infinite,
        }
    }
}

impl ApplyContext {
    pub fn with_precision(precision: Precision) -> Self {
        ApplyContext { precision }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Identity,
    /// `sum s_g t^g -> sum s_g t^tau(g)`.
    ExternalField(AdditiveAutomorphism),
    /// `sum s_g t^g -> sum chi(g) s_g t^g`.
    CharacterLift(PartialCharacter),
    /// Multiplication by `unit = 1 + e` (or division, when inverted).
    InternalMult { unit: Series, inverted: bool },
    /// `sum s_g t^g -> sum c(g) s_g t^zeta(g)`.
    ExternalGroup { zeta: MonotoneMap, scale: ScalingFamily },
    /// `exp(d)`, certified below `precision`.
    ExpDerivation { derivation: MonomialDerivation, precision: GroupElement },
    /// `sigma(sum chi(tau(y)) r t^tau(y))`.
    Theta {
        sigma: Box<Automorphism>,
        chi: PartialCharacter,
        tau: AdditiveAutomorphism,
    },
    /// `nu(sum c(y) r t^zeta(y))`.
    Tau {
        nu: Box<Automorphism>,
        zeta: MonotoneMap,
        scale: ScalingFamily,
    },
    /// Applied right to left: `Compose([f, g])(x) = f(g(x))`.
    Compose(Vec<Automorphism>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automorphism {
    desc: GroupDescriptor,
    node: Node,
}

/// One row of the induced-map table: `gamma -> (v(a(t^gamma)), [a(t^gamma)]_v)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedEntry {
    pub exponent: GroupElement,
    pub image: GroupElement,
    pub coefficient: Rational,
}

impl Automorphism {
    pub fn identity(desc: GroupDescriptor) -> Self {
        Automorphism {
            desc,
            node: Node::Identity,
        }
    }

    pub fn external_field(tau: AdditiveAutomorphism) -> Self {
        Automorphism {
            desc: tau.descriptor(),
            node: Node::ExternalField(tau),
        }
    }

    pub fn character_lift(chi: PartialCharacter) -> Self {
        Automorphism {
            desc: chi.descriptor(),
            node: Node::CharacterLift(chi),
        }
    }

    /// Multiplication by `1 + eps`; `eps` must be 0 or infinitesimal.
    pub fn internal_mult(eps: Series) -> Result<Self> {
        let desc = eps.group();
        let infinitesimal = match eps.valuation_bound() {
            None => true,
            Some(v) => v.is_positive(),
        };
        if !infinitesimal {
            return Err(Error::NotInfinitesimal(match eps.valuation() {
                Some(v) => format!("v(eps) = {v} is not positive"),
                None => "eps has no certified positive valuation".into(),
            }));
        }
        Ok(Automorphism {
            desc,
            node: Node::InternalMult {
                unit: Series::one(desc).add_unchecked(&eps),
                inverted: false,
            },
        })
    }

    pub fn external_group(zeta: MonotoneMap, scale: ScalingFamily) -> Result<Self> {
        let desc = zeta.descriptor();
        desc.check(scale.descriptor())?;
        Ok(Automorphism {
            desc,
            node: Node::ExternalGroup { zeta, scale },
        })
    }

    /// `exp(d)` certified below `precision`. Table derivations must pass
    /// the Leibniz check on the default sample set first.
    pub fn exp_derivation(derivation: MonomialDerivation, precision: GroupElement) -> Result<Self> {
        if let DerivationRule::Table { .. } = derivation.rule() {
            let report = check_derivation(&derivation, &SampleSpec::default());
            if report.leibniz.failed() {
                let w = report.leibniz.witness.as_ref().expect("failures carry witnesses");
                let inputs: Vec<String> = w.inputs.iter().map(|(k, s)| format!("{k} = {s}")).collect();
                return Err(Error::LeibnizFailure(format!("witness {}", inputs.join(", "))));
            }
        }
        Automorphism::exp_derivation_unchecked(derivation, precision)
    }

    /// Like [`Automorphism::exp_derivation`] without the Leibniz gate.
    pub fn exp_derivation_unchecked(derivation: MonomialDerivation, precision: GroupElement) -> Result<Self> {
        let desc = derivation.descriptor();
        desc.check(precision.descriptor())?;
        if !derivation.is_contracting() {
            return Err(Error::NonContracting(format!(
                "gain {} is not positive",
                derivation.gain().expect("non-contracting derivations have a gain")
            )));
        }
        Ok(Automorphism {
            desc,
            node: Node::ExpDerivation { derivation, precision },
        })
    }

    /// `s -> sigma(sum chi(tau(y)) r t^tau(y))`. `sigma` must be a
    /// 1-automorphism: structurally, or by passing the classifier on
    /// `spec`.
    pub fn construct_theta(
        sigma: Automorphism,
        chi: PartialCharacter,
        tau: AdditiveAutomorphism,
        spec: &SampleSpec,
        ctx: &ApplyContext,
    ) -> Result<Self> {
        let desc = sigma.desc;
        desc.check(chi.descriptor())?;
        desc.check(tau.descriptor())?;
        if !sigma.is_structurally_one_aut() {
            let report = classify(&sigma, spec, ctx);
            if !report.one_aut.passed() {
                return Err(Error::NotOneAut(gate_message("one_aut", &report.one_aut))).at_node("sigma");
            }
        }
        Ok(Automorphism {
            desc,
            node: Node::Theta {
                sigma: Box::new(sigma),
                chi,
                tau,
            },
        })
    }

    /// `s -> nu(sum c(y) r t^zeta(y))`. `nu` must be an internal group
    /// automorphism (leading terms fixed): structurally, or on `spec`.
    pub fn construct_tau(
        nu: Automorphism,
        zeta: MonotoneMap,
        scale: ScalingFamily,
        spec: &SampleSpec,
        ctx: &ApplyContext,
    ) -> Result<Self> {
        let desc = nu.desc;
        desc.check(zeta.descriptor())?;
        desc.check(scale.descriptor())?;
        if !nu.is_structurally_internal() {
            let report = classify(&nu, spec, ctx);
            if !report.leading_term_fixed.passed() {
                return Err(Error::NotInternal(gate_message("leading_term_fixed", &report.leading_term_fixed)))
                    .at_node("nu");
            }
        }
        Ok(Automorphism {
            desc,
            node: Node::Tau {
                nu: Box::new(nu),
                zeta,
                scale,
            },
        })
    }

    pub fn compose(desc: GroupDescriptor, parts: Vec<Automorphism>) -> Result<Self> {
        for p in &parts {
            desc.check(p.desc)?;
        }
        Ok(Automorphism {
            desc,
            node: Node::Compose(parts),
        })
    }

    pub fn descriptor(&self) -> GroupDescriptor {
        self.desc
    }

    pub fn node(&self) -> &Node {
        &self.node
    }

    pub fn class(&self) -> AutClass {
        match &self.node {
            Node::Identity | Node::ExternalField(_) | Node::CharacterLift(_) | Node::ExpDerivation { .. } => {
                AutClass::Field
            }
            Node::InternalMult { unit, .. } if unit.is_exact() && unit.terms().len() == 1 => AutClass::Field,
            Node::InternalMult { .. } => AutClass::Group,
            Node::ExternalGroup { zeta, scale } if zeta.is_additive() && scale.is_unit() => AutClass::Field,
            Node::ExternalGroup { .. } | Node::Tau { .. } => AutClass::Group,
            Node::Theta { sigma, .. } => sigma.class(),
            Node::Compose(parts) => {
                if parts.iter().all(|p| p.class() == AutClass::Field) {
                    AutClass::Field
                } else {
                    AutClass::Group
                }
            }
        }
    }

    fn is_structurally_one_aut(&self) -> bool {
        match &self.node {
            Node::Identity | Node::ExpDerivation { .. } => true,
            Node::Compose(parts) => parts.iter().all(Automorphism::is_structurally_one_aut),
            _ => false,
        }
    }

    fn is_structurally_internal(&self) -> bool {
        match &self.node {
            Node::Identity | Node::ExpDerivation { .. } | Node::InternalMult { .. } => true,
            Node::Compose(parts) => parts.iter().all(Automorphism::is_structurally_internal),
            _ => false,
        }
    }

    pub fn inverse(&self) -> Automorphism {
        let desc = self.desc;
        let node = match &self.node {
            Node::Identity => Node::Identity,
            Node::ExternalField(tau) => Node::ExternalField(tau.inverse()),
            Node::CharacterLift(chi) => Node::CharacterLift(chi.inverse()),
            Node::InternalMult { unit, inverted } => Node::InternalMult {
                unit: unit.clone(),
                inverted: !inverted,
            },
            Node::ExternalGroup { zeta, scale } => Node::ExternalGroup {
                zeta: zeta.inverse(),
                scale: scale.inverse_along(|g| zeta.apply_unchecked(g, Direction::Forward)),
            },
            Node::ExpDerivation { derivation, precision } => Node::ExpDerivation {
                derivation: derivation.neg(),
                precision: precision.clone(),
            },
            Node::Theta { sigma, chi, tau } => Node::Compose(vec![
                Automorphism::external_field(tau.inverse()),
                Automorphism::character_lift(chi.inverse()),
                sigma.inverse(),
            ]),
            Node::Tau { nu, zeta, scale } => Node::Compose(vec![
                Automorphism::external_group(zeta.clone(), scale.clone())
                    .expect("validated at construction")
                    .inverse(),
                nu.inverse(),
            ]),
            Node::Compose(parts) => Node::Compose(parts.iter().rev().map(Automorphism::inverse).collect()),
        };
        Automorphism { desc, node }
    }

    /// Applies with the default context (no extra precision bound).
    pub fn apply(&self, s: &Series) -> Result<Series> {
        self.apply_with(s, &ApplyContext::default())
    }

    pub fn apply_with(&self, s: &Series, ctx: &ApplyContext) -> Result<Series> {
        self.desc.check(s.group())?;
        match &self.node {
            Node::Identity => Ok(s.clone()),
            Node::ExternalField(tau) => Ok(s.map_exponents(|e| tau.apply_unchecked(e, Direction::Forward))),
            Node::CharacterLift(chi) => lift(chi, s).at_node("character"),
            Node::InternalMult { unit, inverted: false } => Ok(s.mul_unchecked(unit)),
            Node::InternalMult { unit, inverted: true } => divide_by_unit(s, unit, ctx).at_node("inverse.internal_mult"),
            Node::ExternalGroup { zeta, scale } => Ok(external_group(zeta, scale, s)),
            Node::ExpDerivation { derivation, precision } => {
                exp_apply(derivation, precision, s).at_node("exp_derivation")
            }
            Node::Theta { sigma, chi, tau } => {
                let moved = s.map_exponents(|e| tau.apply_unchecked(e, Direction::Forward));
                let scaled = lift(chi, &moved).at_node("chi").at_node("construct_theta")?;
                sigma.apply_with(&scaled, ctx).at_node("sigma").at_node("construct_theta")
            }
            Node::Tau { nu, zeta, scale } => {
                let moved = external_group(zeta, scale, s);
                nu.apply_with(&moved, ctx).at_node("nu").at_node("construct_tau")
            }
            Node::Compose(parts) => {
                let mut acc = s.clone();
                for (i, p) in parts.iter().enumerate().rev() {
                    acc = p.apply_with(&acc, ctx).at_node(&format!("compose[{i}]"))?;
                }
                Ok(acc)
            }
        }
    }

    /// `gamma -> (v(a(t^gamma)), [a(t^gamma)]_v(a(t^gamma)))` on each sample.
    pub fn induced_maps(&self, samples: &[GroupElement], ctx: &ApplyContext) -> Result<Vec<InducedEntry>> {
        samples
            .iter()
            .map(|g| {
                self.desc.check(g.descriptor())?;
                let image = self.apply_with(&Series::monomial(self.desc, g.clone(), Rational::one()), ctx)?;
                let lt = image.leading_term()?;
                Ok(InducedEntry {
                    exponent: g.clone(),
                    image: lt.valuation,
                    coefficient: lt.coefficient,
                })
            })
            .collect()
    }
}

fn gate_message(name: &str, check: &crate::report::Check) -> String {
    match &check.witness {
        Some(w) => {
            let parts: Vec<String> = w.inputs.iter().chain(&w.sides).map(|(k, s)| format!("{k} = {s}")).collect();
            format!("{name} check {}: {}", check.status, parts.join(", "))
        }
        None => format!("{name} check {}", check.status),
    }
}

fn lift(chi: &PartialCharacter, s: &Series) -> Result<Series> {
    let mut terms = Vec::with_capacity(s.terms().len());
    for (e, c) in s.terms() {
        terms.push((e.clone(), c * chi.eval(e)?));
    }
    Ok(Series::from_sorted(s.group(), terms, s.precision().clone()))
}

fn external_group(zeta: &MonotoneMap, scale: &ScalingFamily, s: &Series) -> Series {
    let terms = s
        .terms()
        .iter()
        .map(|(e, c)| (zeta.apply_unchecked(e, Direction::Forward), c * scale.at(e)))
        .collect();
    let precision = match s.precision() {
        Precision::Finite(p) => Precision::Finite(zeta.apply_unchecked(p, Direction::Forward)),
        Precision::Infinite => Precision::Infinite,
    };
    Series::from_sorted(s.group(), terms, precision)
}

/// `s / unit`, certified below the smaller of `P(s)` and the context bound.
fn divide_by_unit(s: &Series, unit: &Series, ctx: &ApplyContext) -> Result<Series> {
    if unit.is_exact() && unit.terms().len() == 1 {
        return Ok(s.clone());
    }
    let bound = s.precision().clone().min(ctx.precision.clone());
    let Some(v) = s.valuation_bound() else {
        return Ok(s.clone());
    };
    let Precision::Finite(target) = bound else {
        return Err(Error::InsufficientPrecision(
            "dividing an exact series by a unit needs a finite precision".into(),
        ));
    };
    let inv = unit.invert(&target.minus(v))?;
    Ok(s.mul_unchecked(&inv).truncate_to(&target))
}

/// Helpers for building common pieces in tests and the CLI.
impl Automorphism {
    /// External group automorphism with trivial scaling.
    pub fn exponent_bijection(zeta: MonotoneMap) -> Self {
        let desc = zeta.descriptor();
        Automorphism::external_group(zeta, ScalingFamily::unit(desc)).expect("same descriptor")
    }

    /// Scaling family with default 1 and the given exceptions.
    pub fn scaling(desc: GroupDescriptor, exceptions: Vec<(GroupElement, Rational)>) -> Result<ScalingFamily> {
        ScalingFamily::new(desc, Rational::one(), exceptions.into_iter().collect::<BTreeMap<_, _>>())
    }
}

#[cfg(test)]
mod tests;
