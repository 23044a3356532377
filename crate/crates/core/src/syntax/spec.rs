//! Structured specs for automorphisms and their ingredients.
//!
//! ```text
//! aut        := "identity"
//!             | "external_field" "{" "tau:" addaut "}"
//!             | "character" "{" pairs "}"
//!             | "internal_mult" "{" "eps:" series "}"
//!             | "external_group" "{" "zeta:" monmap "," "scale:" pairs "," "default:" rational "}"
//!             | "exp_derivation" "{" "phi:" functional "," "shift:" g "," "precision:" g "}"
//!             | "exp_derivation" "{" "derivation:" derivation "," "precision:" g "}"
//!             | "construct_theta" "{" "sigma:" aut "," "chi:" pairs "," "tau:" addaut "}"
//!             | "construct_tau" "{" "nu:" aut "," "zeta:" monmap "," "scale:" pairs "," "default:" rational "}"
//!             | "compose" "(" aut ("," aut)* ")" | "inverse" "(" aut ")"
//! addaut     := "id" | rational | "scalar(" rational ")" | "matrix(" row ("," row)* ")" | "chain(" addaut,* ")"
//! monmap     := "id" | "translate(" g ")" | "piecewise{breaks: list, slopes: list, intercepts: list}"
//!             | "chain(" monmap,* ")"
//! functional := "zero" | "id" | "linear(" rational,* ")" | "gens{" pairs "}" | "coeff{" pairs "}"
//! derivation := "zero" | "phi_shift{phi: functional, shift: g}" | "table{" (g ":" series),* ["," "default: zero"] "}"
//! pairs      := "{" (g ":" rational),* "}" | (g ":" rational),*
//! ```
//!
//! Omitted `precision` fields default to the session precision; omitted
//! `scale` and `default` fields to the unit scaling.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::aut::{Automorphism, Node, PartialCharacter, ScalingFamily};
use crate::derivation::{DerivationRule, MonomialDerivation};
use crate::error::{AtNode, Error, Result};
use crate::group::{
    AdditiveAutomorphism, AdditiveRule, GroupDescriptor, GroupElement, LinearFunctional, MonotoneMap, MonotoneRule,
    PiecewiseLinear,
};
use crate::series::Series;
use crate::session::SessionConfig;
use crate::Rational;

use super::cursor::Cursor;
use super::{format_group_element, format_rational, format_series, Notation};

pub fn parse_aut(text: &str, cfg: &SessionConfig) -> Result<Automorphism> {
    let mut p = SpecParser::new(text, cfg);
    let a = p.aut()?;
    p.cur.finish()?;
    Ok(a)
}

pub fn parse_derivation(text: &str, cfg: &SessionConfig) -> Result<MonomialDerivation> {
    let mut p = SpecParser::new(text, cfg);
    let d = p.derivation()?;
    p.cur.finish()?;
    Ok(d)
}

pub fn parse_additive(text: &str, group: GroupDescriptor) -> Result<AdditiveAutomorphism> {
    let cfg = SessionConfig::new(group);
    let mut p = SpecParser::new(text, &cfg);
    let t = p.additive()?;
    p.cur.finish()?;
    Ok(t)
}

pub fn parse_monotone(text: &str, group: GroupDescriptor) -> Result<MonotoneMap> {
    let cfg = SessionConfig::new(group);
    let mut p = SpecParser::new(text, &cfg);
    let m = p.monotone()?;
    p.cur.finish()?;
    Ok(m)
}

pub fn parse_functional(text: &str, group: GroupDescriptor) -> Result<LinearFunctional> {
    let cfg = SessionConfig::new(group);
    let mut p = SpecParser::new(text, &cfg);
    let f = p.functional()?;
    p.cur.finish()?;
    Ok(f)
}

struct SpecParser<'a, 'c> {
    cur: Cursor<'a>,
    cfg: &'c SessionConfig,
}

impl<'a, 'c> SpecParser<'a, 'c> {
    fn new(text: &'a str, cfg: &'c SessionConfig) -> Self {
        SpecParser {
            cur: Cursor::new(text),
            cfg,
        }
    }

    fn group(&self) -> GroupDescriptor {
        self.cfg.group
    }

    fn name(&mut self, what: &str) -> Result<&'a str> {
        self.cur
            .ident()
            .ok_or_else(|| match self.cur.peek() {
                Some(c) => self.cur.error(format!("expected {what}, found '{c}'")),
                None => self.cur.error(format!("expected {what}, found end of input")),
            })
    }

    /// Parses `{ key: value, ... }`, handing each key to `field`.
    fn fields(&mut self, mut field: impl FnMut(&mut Self, &str, usize) -> Result<()>) -> Result<()> {
        self.cur.expect('{')?;
        if self.cur.eat('}') {
            return Ok(());
        }
        loop {
            let at = self.cur.pos();
            let key = self.name("a field name")?;
            self.cur.expect(':')?;
            field(self, key, at)?;
            if self.cur.eat('}') {
                return Ok(());
            }
            self.cur.expect(',')?;
        }
    }

    fn aut(&mut self) -> Result<Automorphism> {
        let at = self.cur.pos();
        let desc = self.group();
        match self.name("an automorphism")? {
            "identity" | "id" => Ok(Automorphism::identity(desc)),
            "external_field" => {
                let mut tau = None;
                self.fields(|p, key, at| match key {
                    "tau" => {
                        tau = Some(p.additive().at_node("external_field.tau")?);
                        Ok(())
                    }
                    _ => Err(unknown_field(at, key)),
                })?;
                let tau = tau.ok_or_else(|| missing(at, "external_field", "tau"))?;
                Ok(Automorphism::external_field(tau))
            }
            "character" => {
                self.cur.expect('{')?;
                let pairs = self.pairs_until('}')?;
                self.cur.expect('}')?;
                Ok(Automorphism::character_lift(
                    PartialCharacter::new(desc, pairs).at_node("character")?,
                ))
            }
            "internal_mult" => {
                let mut eps = None;
                self.fields(|p, key, at| match key {
                    "eps" => {
                        eps = Some(p.series()?);
                        Ok(())
                    }
                    _ => Err(unknown_field(at, key)),
                })?;
                let eps = eps.ok_or_else(|| missing(at, "internal_mult", "eps"))?;
                Automorphism::internal_mult(eps).at_node("internal_mult.eps")
            }
            "external_group" => {
                let (mut zeta, mut scale, mut default) = (None, BTreeMap::new(), Rational::one());
                self.fields(|p, key, at| {
                    match key {
                        "zeta" => zeta = Some(p.monotone().at_node("external_group.zeta")?),
                        "scale" => scale = p.pairs_field()?.into_iter().collect(),
                        "default" => default = p.cur.signed_rational()?,
                        _ => return Err(unknown_field(at, key)),
                    }
                    Ok(())
                })?;
                let zeta = zeta.unwrap_or_else(|| MonotoneMap::identity(desc));
                let scale = ScalingFamily::new(desc, default, scale).at_node("external_group.scale")?;
                Automorphism::external_group(zeta, scale).at_node("external_group")
            }
            "exp_derivation" => {
                let (mut phi, mut shift, mut derivation, mut precision) = (None, None, None, None);
                self.fields(|p, key, at| {
                    match key {
                        "phi" => phi = Some(p.functional().at_node("exp_derivation.phi")?),
                        "shift" => shift = Some(p.cur.group_element(desc)?),
                        "derivation" => derivation = Some(p.derivation().at_node("exp_derivation.derivation")?),
                        "precision" => precision = Some(p.cur.group_element(desc)?),
                        _ => return Err(unknown_field(at, key)),
                    }
                    Ok(())
                })?;
                let derivation = match (derivation, phi) {
                    (Some(d), None) => d,
                    (None, Some(phi)) => {
                        let shift = shift.unwrap_or_else(|| desc.one());
                        MonomialDerivation::phi_shift(phi, shift).at_node("exp_derivation.shift")?
                    }
                    _ => {
                        return Err(Cursor::error_at(
                            at,
                            "exp_derivation needs exactly one of 'phi' and 'derivation'",
                        ))
                    }
                };
                let precision = match precision {
                    Some(p) => p,
                    None => self.cfg.precision.finite().cloned().ok_or_else(|| {
                        Error::InsufficientPrecision("exp_derivation needs a precision field or session precision".into())
                            .at("exp_derivation.precision")
                    })?,
                };
                Automorphism::exp_derivation(derivation, precision).at_node("exp_derivation")
            }
            "construct_theta" => {
                let (mut sigma, mut chi, mut tau) = (None, Vec::new(), None);
                self.fields(|p, key, at| {
                    match key {
                        "sigma" => sigma = Some(p.aut().at_node("construct_theta.sigma")?),
                        "chi" => chi = p.pairs_field()?,
                        "tau" => tau = Some(p.additive().at_node("construct_theta.tau")?),
                        _ => return Err(unknown_field(at, key)),
                    }
                    Ok(())
                })?;
                let sigma = sigma.unwrap_or_else(|| Automorphism::identity(desc));
                let chi = PartialCharacter::new(desc, chi).at_node("construct_theta.chi")?;
                let tau = tau.unwrap_or_else(|| AdditiveAutomorphism::identity(desc));
                Automorphism::construct_theta(sigma, chi, tau, &self.cfg.sample_spec(), &self.cfg.apply_context())
                    .at_node("construct_theta")
            }
            "construct_tau" => {
                let (mut nu, mut zeta, mut scale, mut default) = (None, None, BTreeMap::new(), Rational::one());
                self.fields(|p, key, at| {
                    match key {
                        "nu" => nu = Some(p.aut().at_node("construct_tau.nu")?),
                        "zeta" => zeta = Some(p.monotone().at_node("construct_tau.zeta")?),
                        "scale" => scale = p.pairs_field()?.into_iter().collect(),
                        "default" => default = p.cur.signed_rational()?,
                        _ => return Err(unknown_field(at, key)),
                    }
                    Ok(())
                })?;
                let nu = nu.unwrap_or_else(|| Automorphism::identity(desc));
                let zeta = zeta.unwrap_or_else(|| MonotoneMap::identity(desc));
                let scale = ScalingFamily::new(desc, default, scale).at_node("construct_tau.scale")?;
                Automorphism::construct_tau(nu, zeta, scale, &self.cfg.sample_spec(), &self.cfg.apply_context())
                    .at_node("construct_tau")
            }
            "compose" => {
                let parts = self.list(|p| p.aut())?;
                Automorphism::compose(desc, parts)
            }
            "inverse" => {
                self.cur.expect('(')?;
                let inner = self.aut()?;
                self.cur.expect(')')?;
                Ok(inner.inverse())
            }
            other => Err(Cursor::error_at(at, format!("unknown automorphism '{other}'"))),
        }
    }

    /// `( item, item, ... )`, possibly empty.
    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> Result<T>) -> Result<Vec<T>> {
        self.cur.expect('(')?;
        let mut out = Vec::new();
        if self.cur.eat(')') {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.cur.eat(')') {
                return Ok(out);
            }
            self.cur.expect(',')?;
        }
    }

    fn series(&mut self) -> Result<Series> {
        self.cur.series(self.cfg.group, self.cfg.notation)
    }

    fn pair(&mut self, desc: GroupDescriptor) -> Result<(GroupElement, Rational)> {
        let g = self.cur.group_element(desc)?;
        self.cur.expect(':')?;
        Ok((g, self.cur.signed_rational()?))
    }

    fn pairs_until(&mut self, close: char) -> Result<Vec<(GroupElement, Rational)>> {
        self.pairs_in(close, self.group())
    }

    fn pairs_in(&mut self, close: char, desc: GroupDescriptor) -> Result<Vec<(GroupElement, Rational)>> {
        let mut out = Vec::new();
        if self.cur.peek() == Some(close) {
            return Ok(out);
        }
        loop {
            out.push(self.pair(desc)?);
            if self.cur.peek() == Some(close) {
                return Ok(out);
            }
            self.cur.expect(',')?;
        }
    }

    /// Pairs as a field value: braced, or bare up to the next field name.
    fn pairs_field(&mut self) -> Result<Vec<(GroupElement, Rational)>> {
        if self.cur.eat('{') {
            let pairs = self.pairs_until('}')?;
            self.cur.expect('}')?;
            return Ok(pairs);
        }
        let desc = self.group();
        let mut out = vec![self.pair(desc)?];
        loop {
            let save = self.cur.pos();
            if !self.cur.eat(',') {
                return Ok(out);
            }
            if self.cur.peek_ident().is_some() {
                // the comma belongs to the enclosing field list
                self.restore(save);
                return Ok(out);
            }
            out.push(self.pair(desc)?);
        }
    }

    fn restore(&mut self, pos: usize) {
        self.cur.reset(pos);
    }

    fn additive(&mut self) -> Result<AdditiveAutomorphism> {
        let desc = self.group();
        if self.cur.starts_number() {
            let q = self.cur.signed_rational()?;
            return AdditiveAutomorphism::scalar(desc, q);
        }
        let at = self.cur.pos();
        match self.name("an additive automorphism")? {
            "id" | "identity" => Ok(AdditiveAutomorphism::identity(desc)),
            "scalar" => {
                self.cur.expect('(')?;
                let q = self.cur.signed_rational()?;
                self.cur.expect(')')?;
                AdditiveAutomorphism::scalar(desc, q)
            }
            "matrix" => {
                let rows = self.list(|p| p.cur.rational_list())?;
                AdditiveAutomorphism::triangular(desc, rows)
            }
            "chain" => {
                let parts = self.list(|p| p.additive())?;
                AdditiveAutomorphism::composite(desc, parts)
            }
            other => Err(Cursor::error_at(at, format!("unknown additive automorphism '{other}'"))),
        }
    }

    fn monotone(&mut self) -> Result<MonotoneMap> {
        let desc = self.group();
        let at = self.cur.pos();
        match self.name("a monotone map")? {
            "id" | "identity" => Ok(MonotoneMap::identity(desc)),
            "translate" => {
                self.cur.expect('(')?;
                let g = self.cur.group_element(desc)?;
                self.cur.expect(')')?;
                Ok(MonotoneMap::translation(g))
            }
            "piecewise" => {
                let (mut breaks, mut slopes, mut intercepts) = (Vec::new(), None, None);
                self.fields(|p, key, at| {
                    match key {
                        "breaks" => breaks = p.cur.rational_list()?,
                        "slopes" => slopes = Some(p.cur.rational_list()?),
                        "intercepts" => intercepts = Some(p.cur.rational_list()?),
                        _ => return Err(unknown_field(at, key)),
                    }
                    Ok(())
                })?;
                let slopes = slopes.ok_or_else(|| missing(at, "piecewise", "slopes"))?;
                let intercepts = intercepts.unwrap_or_else(|| vec![Rational::zero(); slopes.len()]);
                MonotoneMap::piecewise(desc, PiecewiseLinear::new(breaks, slopes, intercepts)?)
            }
            "chain" => {
                let parts = self.list(|p| p.monotone())?;
                MonotoneMap::composite(desc, parts)
            }
            other => Err(Cursor::error_at(at, format!("unknown monotone map '{other}'"))),
        }
    }

    fn functional(&mut self) -> Result<LinearFunctional> {
        let desc = self.group();
        let at = self.cur.pos();
        match self.name("a functional")? {
            "zero" => Ok(LinearFunctional::zero(desc)),
            "id" | "identity" => LinearFunctional::identity(desc),
            "linear" => {
                let values = self.cur.rational_list()?;
                LinearFunctional::standard(desc, values)
            }
            "gens" => {
                self.cur.expect('{')?;
                let pairs = self.pairs_until('}')?;
                self.cur.expect('}')?;
                LinearFunctional::from_generators(desc, pairs)
            }
            "coeff" => {
                let lower = desc
                    .lower()
                    .ok_or_else(|| Error::InvalidFunctional(format!("{desc} has no monomials")))?;
                self.cur.expect('{')?;
                let pairs = self.pairs_in('}', lower)?;
                self.cur.expect('}')?;
                LinearFunctional::on_monomials(desc, pairs.into_iter().collect())
            }
            other => Err(Cursor::error_at(at, format!("unknown functional '{other}'"))),
        }
    }

    fn derivation(&mut self) -> Result<MonomialDerivation> {
        let desc = self.group();
        let at = self.cur.pos();
        match self.name("a derivation")? {
            "zero" => Ok(MonomialDerivation::zero(desc)),
            "phi_shift" => {
                let (mut phi, mut shift) = (None, None);
                self.fields(|p, key, at| {
                    match key {
                        "phi" => phi = Some(p.functional().at_node("phi_shift.phi")?),
                        "shift" => shift = Some(p.cur.group_element(desc)?),
                        _ => return Err(unknown_field(at, key)),
                    }
                    Ok(())
                })?;
                let phi = phi.ok_or_else(|| missing(at, "phi_shift", "phi"))?;
                MonomialDerivation::phi_shift(phi, shift.unwrap_or_else(|| desc.one())).at_node("phi_shift")
            }
            "table" => {
                self.cur.expect('{')?;
                let mut images = BTreeMap::new();
                let mut zero_default = false;
                if !self.cur.eat('}') {
                    loop {
                        if self.cur.keyword("default") {
                            self.cur.expect(':')?;
                            self.cur.expect_keyword("zero")?;
                            zero_default = true;
                        } else {
                            let g = self.cur.group_element(desc)?;
                            self.cur.expect(':')?;
                            let image = self.series()?;
                            images.insert(g, image);
                        }
                        if self.cur.eat('}') {
                            break;
                        }
                        self.cur.expect(',')?;
                    }
                }
                MonomialDerivation::table(desc, images, zero_default)
            }
            other => Err(Cursor::error_at(at, format!("unknown derivation '{other}'"))),
        }
    }
}

fn unknown_field(at: usize, key: &str) -> Error {
    Cursor::error_at(at, format!("unknown field '{key}'"))
}

fn missing(at: usize, node: &str, key: &str) -> Error {
    Cursor::error_at(at, format!("{node} needs a '{key}' field"))
}

fn format_pairs(pairs: &[(GroupElement, Rational)]) -> String {
    let parts: Vec<String> = pairs
        .iter()
        .map(|(g, v)| format!("{}: {}", format_group_element(g, Notation::T), format_rational(v)))
        .collect();
    format!("{{{}}}", parts.join(", "))
}

fn format_list(values: &[Rational]) -> String {
    let parts: Vec<String> = values.iter().map(format_rational).collect();
    format!("({})", parts.join(", "))
}

pub fn format_additive(tau: &AdditiveAutomorphism) -> String {
    match tau.rule() {
        AdditiveRule::PositiveScalar(q) if q.is_one() => "id".into(),
        AdditiveRule::PositiveScalar(q) => format!("scalar({})", format_rational(q)),
        AdditiveRule::TriangularMatrix(rows) => {
            let rows: Vec<String> = rows.iter().map(|r| format_list(r)).collect();
            format!("matrix({})", rows.join(", "))
        }
        AdditiveRule::Composite(parts) => {
            let parts: Vec<String> = parts.iter().map(format_additive).collect();
            format!("chain({})", parts.join(", "))
        }
    }
}

pub fn format_monotone(zeta: &MonotoneMap) -> String {
    match zeta.rule() {
        MonotoneRule::Translation(c) if c.is_zero() => "id".into(),
        MonotoneRule::Translation(c) => format!("translate({})", format_group_element(c, Notation::T)),
        MonotoneRule::PiecewiseLinear(p) => format!(
            "piecewise{{breaks: {}, slopes: {}, intercepts: {}}}",
            format_list(p.breakpoints()),
            format_list(p.slopes()),
            format_list(p.intercepts())
        ),
        MonotoneRule::Composite(parts) => {
            let parts: Vec<String> = parts.iter().map(format_monotone).collect();
            format!("chain({})", parts.join(", "))
        }
    }
}

pub fn format_functional(phi: &LinearFunctional) -> String {
    if phi.is_monomial_form() {
        return format!("coeff{}", format_pairs(&phi.pairs()));
    }
    let pairs = phi.pairs();
    if let Some(gens) = phi.descriptor().standard_generators() {
        if pairs.len() == gens.len() && pairs.iter().zip(&gens).all(|((g, _), s)| g == s) {
            let values: Vec<Rational> = pairs.into_iter().map(|(_, v)| v).collect();
            return format!("linear{}", format_list(&values));
        }
    }
    format!("gens{}", format_pairs(&pairs))
}

pub fn format_derivation(d: &MonomialDerivation, notation: Notation) -> String {
    match d.rule() {
        DerivationRule::PhiShift { phi, shift } => format!(
            "phi_shift{{phi: {}, shift: {}}}",
            format_functional(phi),
            format_group_element(shift, Notation::T)
        ),
        DerivationRule::Table { images, zero_default } if images.is_empty() && *zero_default => "zero".into(),
        DerivationRule::Table { images, zero_default } => {
            let mut parts: Vec<String> = images
                .iter()
                .map(|(g, s)| format!("{}: {}", format_group_element(g, Notation::T), format_series(s, notation)))
                .collect();
            if *zero_default {
                parts.push("default: zero".into());
            }
            format!("table{{{}}}", parts.join(", "))
        }
    }
}

/// Canonical spec text; parsing it back yields the same tree.
pub fn format_aut(a: &Automorphism, notation: Notation) -> String {
    let g = |e: &GroupElement| format_group_element(e, Notation::T);
    match a.node() {
        Node::Identity => "identity".into(),
        Node::ExternalField(tau) => format!("external_field{{tau: {}}}", format_additive(tau)),
        Node::CharacterLift(chi) => {
            let pairs = format_pairs(chi.generators());
            format!("character{pairs}")
        }
        Node::InternalMult { unit, inverted } => {
            let eps = unit.add_unchecked(&Series::one(unit.group()).neg());
            let text = format!("internal_mult{{eps: {}}}", format_series(&eps, notation));
            if *inverted {
                format!("inverse({text})")
            } else {
                text
            }
        }
        Node::ExternalGroup { zeta, scale } => format!(
            "external_group{{zeta: {}, scale: {}, default: {}}}",
            format_monotone(zeta),
            format_scale(scale),
            format_rational(scale.default_value())
        ),
        Node::ExpDerivation { derivation, precision } => match derivation.rule() {
            DerivationRule::PhiShift { phi, shift } => format!(
                "exp_derivation{{phi: {}, shift: {}, precision: {}}}",
                format_functional(phi),
                g(shift),
                g(precision)
            ),
            DerivationRule::Table { .. } => format!(
                "exp_derivation{{derivation: {}, precision: {}}}",
                format_derivation(derivation, notation),
                g(precision)
            ),
        },
        Node::Theta { sigma, chi, tau } => format!(
            "construct_theta{{sigma: {}, chi: {}, tau: {}}}",
            format_aut(sigma, notation),
            format_pairs(chi.generators()),
            format_additive(tau)
        ),
        Node::Tau { nu, zeta, scale } => format!(
            "construct_tau{{nu: {}, zeta: {}, scale: {}, default: {}}}",
            format_aut(nu, notation),
            format_monotone(zeta),
            format_scale(scale),
            format_rational(scale.default_value())
        ),
        Node::Compose(parts) => {
            let parts: Vec<String> = parts.iter().map(|p| format_aut(p, notation)).collect();
            format!("compose({})", parts.join(", "))
        }
    }
}

fn format_scale(scale: &ScalingFamily) -> String {
    let pairs: Vec<(GroupElement, Rational)> = scale.exceptions().iter().map(|(g, c)| (g.clone(), c.clone())).collect();
    format_pairs(&pairs)
}
