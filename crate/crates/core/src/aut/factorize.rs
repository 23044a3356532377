use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::group::{
    AdditiveAutomorphism, GroupDescriptor, GroupElement, LinearFunctional, MonotoneMap, PiecewiseLinear,
};
use crate::report::{Check, Status, Witness};
use crate::sample::{SampleSpec, Sampler};
use crate::series::Series;
use crate::Rational;

use super::{classify_pairs, ApplyContext, Automorphism, InducedEntry, PartialCharacter, ScalingFamily};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorMode {
    /// `a = residual o character_lift o external_field`, residual a 1-automorphism.
    Field,
    /// `a = residual o external_group`, residual an internal group automorphism.
    Group,
}

impl FromStr for FactorMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "field" => Ok(FactorMode::Field),
            "group" => Ok(FactorMode::Group),
            other => Err(Error::Parse {
                offset: 0,
                message: format!("unknown mode {other:?} (expected field or group)"),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub mode: FactorMode,
    /// `gamma -> v(a(t^gamma))`.
    pub exponent_map: Vec<(GroupElement, GroupElement)>,
    /// `gamma -> [a(t^gamma)]_v(a(t^gamma))`.
    pub coefficients: Vec<(GroupElement, Rational)>,
    pub reconstruction: Automorphism,
    /// `a o reconstruction^-1`.
    pub residual: Automorphism,
    pub certificates: Vec<(&'static str, Check)>,
}

impl Factorization {
    pub fn passed(&self) -> bool {
        self.certificates.iter().all(|(_, c)| !c.failed() && c.status != Status::NotApplicable)
    }
}

fn insufficient(message: impl Into<String>) -> Error {
    Error::SampleInsufficiency(message.into())
}

/// Splits `a` into a table-based reconstruction and a residual, and
/// certifies the residual's class on samples built from the tables.
pub fn factorize(
    a: &Automorphism,
    mode: FactorMode,
    samples: &[GroupElement],
    spec: &SampleSpec,
    ctx: &ApplyContext,
) -> Result<Factorization> {
    let desc = a.descriptor();
    let samples: Vec<GroupElement> = samples.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    if samples.is_empty() {
        return Err(insufficient("no sample exponents"));
    }
    let table = a.induced_maps(&samples, ctx).map_err(|e| match e.root() {
        Error::InsufficientPrecision(m) => insufficient(format!("image leading term unknown: {m}")),
        _ => e,
    })?;
    for entry in &table {
        if !entry.coefficient.is_positive() {
            return Err(insufficient(format!(
                "coefficient {} at {} is not positive",
                entry.coefficient, entry.exponent
            )));
        }
    }
    let reconstruction = match mode {
        FactorMode::Field => field_reconstruction(desc, &table)?,
        FactorMode::Group => group_reconstruction(desc, &table)?,
    };
    let residual = Automorphism::compose(desc, vec![a.clone(), reconstruction.inverse()])?;

    let mut certificates = Vec::new();
    certificates.push(("reconstruction", reconstruction_check(&reconstruction, &table, ctx)));
    certificates.push(("round_trip", round_trip_check(a, &reconstruction, &residual, &table, ctx)));
    match mode {
        FactorMode::Field => {
            certificates.push(("coefficient_multiplicative", multiplicative_table_check(desc, &table)));
            let pool = field_pool(&table);
            let pairs = pool_pairs(desc, pool, spec);
            let report = classify_pairs(&residual, &pairs, spec, ctx);
            let cert = match report.one_aut.status {
                Status::NotApplicable => Check {
                    status: Status::Fail,
                    witness: report.multiplicative.witness.clone(),
                    note: Some("residual is not multiplicative".into()),
                    ..report.one_aut.clone()
                },
                _ => report.one_aut,
            };
            certificates.push(("residual_one_aut", cert));
        }
        FactorMode::Group => {
            let pool = table.iter().map(|e| e.image.clone()).collect();
            let pairs = pool_pairs(desc, pool, spec);
            let report = classify_pairs(&residual, &pairs, spec, ctx);
            certificates.push(("residual_internal", report.leading_term_fixed));
        }
    }

    Ok(Factorization {
        mode,
        exponent_map: table.iter().map(|e| (e.exponent.clone(), e.image.clone())).collect(),
        coefficients: table.iter().map(|e| (e.exponent.clone(), e.coefficient.clone())).collect(),
        reconstruction,
        residual,
        certificates,
    })
}

fn field_reconstruction(desc: GroupDescriptor, table: &[InducedEntry]) -> Result<Automorphism> {
    let tau = infer_additive(desc, table)?;
    for e in table {
        if tau.apply(&e.exponent, crate::group::Direction::Forward)? != e.image {
            return Err(insufficient(format!(
                "exponent map is not additive on the samples: {} -> {}",
                e.exponent, e.image
            )));
        }
    }
    let chi = PartialCharacter::new(desc, table.iter().map(|e| (e.image.clone(), e.coefficient.clone())).collect())
        .map_err(|e| insufficient(format!("coefficient table is not a character: {e}")))?;
    Automorphism::compose(desc, vec![Automorphism::character_lift(chi), Automorphism::external_field(tau)])
}

/// An order-preserving additive map agreeing with the table where the
/// samples determine it.
fn infer_additive(desc: GroupDescriptor, table: &[InducedEntry]) -> Result<AdditiveAutomorphism> {
    let nonzero: Vec<&InducedEntry> = table.iter().filter(|e| !e.exponent.is_zero()).collect();
    match desc {
        GroupDescriptor::LexPower(n) => infer_triangular(desc, n as usize, &nonzero),
        _ => {
            let Some(first) = nonzero.first() else {
                return Ok(AdditiveAutomorphism::identity(desc));
            };
            let lead = |g: &GroupElement| -> Rational {
                match g.as_rational() {
                    Some(q) => q,
                    None => g.as_series().expect("surreal").terms()[0].1.clone(),
                }
            };
            if first.image.is_zero() {
                return Err(insufficient(format!("{} maps to 0", first.exponent)));
            }
            let ratio = lead(&first.image) / lead(&first.exponent);
            AdditiveAutomorphism::scalar(desc, ratio).map_err(|e| insufficient(format!("exponent map: {e}")))
        }
    }
}

fn infer_triangular(desc: GroupDescriptor, n: usize, entries: &[&InducedEntry]) -> Result<AdditiveAutomorphism> {
    let mut basis: Vec<(GroupElement, GroupElement)> = Vec::new();
    let independent = |basis: &[(GroupElement, GroupElement)], g: &GroupElement| {
        let mut pairs: Vec<(GroupElement, Rational)> = basis.iter().map(|(x, _)| (x.clone(), Rational::zero())).collect();
        pairs.push((g.clone(), Rational::zero()));
        LinearFunctional::from_generators(desc, pairs).is_ok()
    };
    for e in entries {
        if basis.len() < n && independent(&basis, &e.exponent) {
            basis.push((e.exponent.clone(), e.image.clone()));
        }
    }
    // directions the samples leave open are completed by the identity
    for g in desc.standard_generators().expect("lex groups have generators") {
        if basis.len() < n && independent(&basis, &g) {
            basis.push((g.clone(), g));
        }
    }
    let generators = desc.standard_generators().expect("lex groups have generators");
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let coord = LinearFunctional::from_generators(
            desc,
            basis
                .iter()
                .map(|(x, y)| (x.clone(), y.as_tuple().expect("lex")[i].clone()))
                .collect(),
        )?;
        rows.push(generators.iter().map(|g| coord.eval(g)).collect::<Result<Vec<_>>>()?);
    }
    AdditiveAutomorphism::triangular(desc, rows).map_err(|e| insufficient(format!("exponent map: {e}")))
}

fn group_reconstruction(desc: GroupDescriptor, table: &[InducedEntry]) -> Result<Automorphism> {
    let zeta = match desc {
        GroupDescriptor::Rationals => {
            let points: Vec<(Rational, Rational)> = table
                .iter()
                .map(|e| (e.exponent.as_rational().expect("rational"), e.image.as_rational().expect("rational")))
                .collect();
            let map = PiecewiseLinear::interpolate(&points).map_err(|e| insufficient(format!("exponent map: {e}")))?;
            MonotoneMap::piecewise(desc, map)?
        }
        _ => {
            let first = &table[0];
            let shift = first.image.minus(&first.exponent);
            if let Some(e) = table.iter().find(|e| e.image.minus(&e.exponent) != shift) {
                return Err(insufficient(format!(
                    "exponent map is not a translation on {desc}: {} -> {}",
                    e.exponent, e.image
                )));
            }
            MonotoneMap::translation(shift)
        }
    };
    let exceptions: BTreeMap<GroupElement, Rational> = table
        .iter()
        .filter(|e| !e.coefficient.is_one())
        .map(|e| (e.exponent.clone(), e.coefficient.clone()))
        .collect();
    let scale = ScalingFamily::new(desc, Rational::one(), exceptions)?;
    Automorphism::external_group(zeta, scale)
}

fn monomial(desc: GroupDescriptor, g: &GroupElement) -> Series {
    Series::monomial(desc, g.clone(), Rational::one())
}

fn reconstruction_check(recon: &Automorphism, table: &[InducedEntry], ctx: &ApplyContext) -> Check {
    let mut check = Check::default();
    for e in table {
        let t = monomial(recon.descriptor(), &e.exponent);
        match recon.apply_with(&t, ctx).and_then(|s| s.leading_term().map(|lt| (s, lt))) {
            Ok((image, lt)) => check.record(lt.valuation == e.image && lt.coefficient == e.coefficient, || {
                Witness::new(vec![("s", t.clone())], vec![("reconstruction(s)", image)])
                    .with_note(format!("expected leading term {}*t^({})", e.coefficient, e.image))
            }),
            Err(_) => check.skip(),
        }
    }
    check
}

fn round_trip_check(
    a: &Automorphism,
    recon: &Automorphism,
    residual: &Automorphism,
    table: &[InducedEntry],
    ctx: &ApplyContext,
) -> Check {
    let mut check = Check::default();
    for e in table {
        let t = monomial(a.descriptor(), &e.exponent);
        let sides = a
            .apply_with(&t, ctx)
            .and_then(|lhs| Ok((lhs, residual.apply_with(&recon.apply_with(&t, ctx)?, ctx)?)));
        match sides {
            Ok((lhs, rhs)) => check.record(lhs.agrees(&rhs), || {
                Witness::new(vec![("s", t.clone())], vec![("a(s)", lhs), ("residual(reconstruction(s))", rhs)])
            }),
            Err(_) => check.skip(),
        }
    }
    check
}

/// `c(g + h) = c(g) c(h)` and `sigma(g + h) = sigma(g) + sigma(h)` whenever
/// all three exponents were sampled.
fn multiplicative_table_check(desc: GroupDescriptor, table: &[InducedEntry]) -> Check {
    let by_exponent: BTreeMap<&GroupElement, &InducedEntry> = table.iter().map(|e| (&e.exponent, e)).collect();
    let mut check = Check::default();
    for (i, x) in table.iter().enumerate() {
        for y in &table[i..] {
            let sum = x.exponent.plus(&y.exponent);
            let Some(z) = by_exponent.get(&sum) else { continue };
            let ok = z.coefficient == &x.coefficient * &y.coefficient && z.image == x.image.plus(&y.image);
            check.record(ok, || {
                Witness::new(
                    vec![("x", monomial(desc, &x.exponent)), ("y", monomial(desc, &y.exponent))],
                    vec![
                        ("a(x*y)", Series::monomial(desc, z.image.clone(), z.coefficient.clone())),
                        (
                            "a(x)*a(y)",
                            Series::monomial(desc, x.image.plus(&y.image), &x.coefficient * &y.coefficient),
                        ),
                    ],
                )
                .with_note("leading terms of the table")
            });
        }
    }
    check
}

/// Images, their negatives and pairwise sums: all inside the integer span
/// on which the reconstructed character is defined.
fn field_pool(table: &[InducedEntry]) -> Vec<GroupElement> {
    let images: Vec<&GroupElement> = table.iter().map(|e| &e.image).collect();
    let mut pool = BTreeSet::new();
    for (i, x) in images.iter().enumerate() {
        pool.insert((*x).clone());
        pool.insert(x.neg());
        for y in &images[i..] {
            pool.insert(x.plus(y));
        }
    }
    pool.into_iter().collect()
}

fn pool_pairs(desc: GroupDescriptor, pool: Vec<GroupElement>, spec: &SampleSpec) -> Vec<(Series, Series)> {
    let mut sampler = Sampler::with_pool(desc, spec.seed, pool);
    (0..spec.count.max(1))
        .map(|_| {
            let x = sampler.nonzero_series(3);
            let y = sampler.nonzero_series(3);
            (x, y)
        })
        .collect()
}
