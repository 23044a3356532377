use num_traits::One;

use super::*;
use crate::group::{AdditiveAutomorphism, GroupElement, MonotoneMap, PiecewiseLinear};
use crate::report::Status;
use crate::sample::SampleSpec;
use crate::series::{Precision, Series};
use crate::session::SessionConfig;
use crate::syntax::{parse_series, Notation};

const Q: GroupDescriptor = GroupDescriptor::Rationals;

fn s(text: &str) -> Series {
    parse_series(text, Q, Notation::T).unwrap()
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn g(n: i64, d: i64) -> GroupElement {
    GroupElement::rational(q(n, d))
}

fn aut(text: &str) -> Automorphism {
    SessionConfig::new(Q).load_aut(text).unwrap()
}

fn chi_two() -> PartialCharacter {
    PartialCharacter::new(Q, vec![(g(1, 1), q(2, 1))]).unwrap()
}

fn scale2() -> AdditiveAutomorphism {
    AdditiveAutomorphism::scalar(Q, q(2, 1)).unwrap()
}

/// `g < 0 -> g`, `g >= 0 -> 2g`.
fn kinked() -> MonotoneMap {
    let p = PiecewiseLinear::new(vec![q(0, 1)], vec![q(1, 1), q(2, 1)], vec![q(0, 1), q(0, 1)]).unwrap();
    MonotoneMap::piecewise(Q, p).unwrap()
}

#[test]
fn primitive_examples() {
    let ef = Automorphism::external_field(AdditiveAutomorphism::scalar(Q, q(3, 1)).unwrap());
    assert_eq!(ef.apply(&s("t^(1/3) + 2*t^(1)")).unwrap(), s("t^(1) + 2*t^(3)"));
    assert_eq!(ef.apply(&Series::zero(Q)).unwrap(), Series::zero(Q));

    let cl = Automorphism::character_lift(chi_two());
    assert_eq!(cl.apply(&s("3*t^(-1) + t^(2)")).unwrap(), s("3/2*t^(-1) + 4*t^(2)"));
    let err = cl.apply(&s("t^(1/2)")).unwrap_err();
    assert_eq!(err.kind(), "DomainError");
    assert!(err.path().is_some());

    let im = Automorphism::internal_mult(s("t^(1)")).unwrap();
    let image = im.apply(&s("t^(-1) + 1")).unwrap();
    assert_eq!(image, s("t^(-1) + 2 + t^(1)"));
    assert_eq!(image.leading_term().unwrap(), s("t^(-1) + 1").leading_term().unwrap());
    assert_eq!(Automorphism::internal_mult(s("1")).unwrap_err().kind(), "NotInfinitesimal");

    let eg = Automorphism::external_group(kinked(), ScalingFamily::unit(Q)).unwrap();
    assert_eq!(eg.apply(&s("t^(-1) + t^(1)")).unwrap(), s("t^(-1) + t^(2)"));
    let lhs = eg.apply(&s("1")).unwrap();
    let rhs = eg.apply(&s("t^(-1)")).unwrap().mul(&eg.apply(&s("t^(1)")).unwrap()).unwrap();
    assert_eq!((lhs, rhs), (s("1"), s("t^(1)")));

    let scale = Automorphism::scaling(Q, vec![(g(0, 1), q(3, 1))]).unwrap();
    let eg = Automorphism::external_group(MonotoneMap::identity(Q), scale).unwrap();
    assert_eq!(eg.apply(&s("5 + t^(1)")).unwrap(), s("15 + t^(1)"));
}

#[test]
fn constructions() {
    let spec = SampleSpec::default();
    let ctx = ApplyContext::default();
    let theta =
        Automorphism::construct_theta(Automorphism::identity(Q), chi_two(), scale2(), &spec, &ctx).unwrap();
    assert_eq!(theta.apply(&s("3*t^(-1) + t^(1/2)")).unwrap(), s("3/4*t^(-2) + 2*t^(1)"));

    let sigma = aut("exp_derivation{phi: linear(1), shift: 1, precision: 5}");
    let theta = Automorphism::construct_theta(
        sigma,
        PartialCharacter::trivial(Q),
        AdditiveAutomorphism::identity(Q),
        &spec,
        &ctx,
    )
    .unwrap();
    assert_eq!(theta.apply(&s("t^(1)")).unwrap(), s("t^(1) + t^(2) + t^(3) + t^(4) (mod t^(5))"));

    let err = Automorphism::construct_theta(
        Automorphism::internal_mult(s("t^(1)")).unwrap(),
        chi_two(),
        scale2(),
        &spec,
        &ctx,
    )
    .unwrap_err();
    assert_eq!((err.kind(), err.path()), ("NotOneAut", Some("sigma")));

    let scale = Automorphism::scaling(Q, vec![(g(0, 1), q(3, 1))]).unwrap();
    let nu = Automorphism::internal_mult(s("t^(1)")).unwrap();
    let tau = Automorphism::construct_tau(nu, kinked(), scale, &spec, &ctx).unwrap();
    let image = tau.apply(&s("t^(-1) + 1")).unwrap();
    assert_eq!(image, s("t^(-1) + 4 + 3*t^(1)"));
    assert_eq!(image.signum().unwrap(), std::cmp::Ordering::Greater);
    let table = tau.induced_maps(&[g(0, 1)], &ctx).unwrap();
    assert_eq!((table[0].image.clone(), table[0].coefficient.clone()), (g(0, 1), q(3, 1)));

    let err = Automorphism::construct_tau(
        Automorphism::external_field(scale2()),
        MonotoneMap::identity(Q),
        ScalingFamily::unit(Q),
        &spec,
        &ctx,
    )
    .unwrap_err();
    assert_eq!((err.kind(), err.path()), ("NotInternal", Some("nu")));
}

#[test]
fn compose_and_invert() {
    let six = Automorphism::external_field(AdditiveAutomorphism::scalar(Q, q(6, 1)).unwrap());
    let two_three = aut("compose(external_field{tau: scalar(2)}, external_field{tau: scalar(3)})");
    for x in ["t^(1)", "t^(-1/2) + 3", "2*t^(5/3)"] {
        assert_eq!(two_three.apply(&s(x)).unwrap(), six.apply(&s(x)).unwrap());
    }

    let half = aut("character{1: 1/2}");
    let inv = aut("character{1: 2}").inverse();
    assert_eq!(inv.apply(&s("t^(1) + t^(-2)")).unwrap(), half.apply(&s("t^(1) + t^(-2)")).unwrap());

    let im = Automorphism::internal_mult(s("t^(1)")).unwrap();
    let round = Automorphism::compose(Q, vec![im.inverse(), im.clone()]).unwrap();
    let ctx = ApplyContext::with_precision(Precision::Finite(g(4, 1)));
    let back = round.apply_with(&s("1 + t^(-1)"), &ctx).unwrap();
    assert!(back.agrees(&s("1 + t^(-1)")), "{back}");
    assert!(!back.is_exact());

    let err = im.inverse().apply(&s("1")).unwrap_err();
    assert_eq!(err.kind(), "InsufficientPrecision");
}

#[test]
fn semidirect_order_matters() {
    let cl = Automorphism::character_lift(chi_two());
    let ef = Automorphism::external_field(scale2());
    let a = Automorphism::compose(Q, vec![cl.clone(), ef.clone()]).unwrap();
    let b = Automorphism::compose(Q, vec![ef, cl]).unwrap();
    assert_eq!(a.apply(&s("t^(1)")).unwrap(), s("4*t^(2)"));
    assert_eq!(b.apply(&s("t^(1)")).unwrap(), s("2*t^(2)"));
}

#[test]
fn induced_tables() {
    let ctx = ApplyContext::default();
    let ef = Automorphism::external_field(scale2());
    let row = &ef.induced_maps(&[g(1, 1)], &ctx).unwrap()[0];
    assert_eq!((row.image.clone(), row.coefficient.clone()), (g(2, 1), Rational::one()));
    let exp = aut("exp_derivation{phi: linear(1), shift: 1, precision: 5}");
    let row = &exp.induced_maps(&[g(1, 1)], &ctx).unwrap()[0];
    assert_eq!((row.image.clone(), row.coefficient.clone()), (g(1, 1), Rational::one()));
}

#[test]
fn classification_examples() {
    let ctx = ApplyContext::default();
    let spec = SampleSpec::new(7, 50);

    let report = classify(&Automorphism::internal_mult(s("t^(1)")).unwrap(), &spec, &ctx);
    assert_eq!(report.additive.status, Status::Pass);
    assert_eq!(report.multiplicative.status, Status::Fail);
    assert_eq!(report.internal.status, Status::Pass);
    assert_eq!(report.one_aut.status, Status::NotApplicable);
    let w = report.multiplicative.witness.as_ref().unwrap();
    assert_eq!(w.inputs[0].1, s("t^(1)"));
    assert_eq!(w.inputs[1].1, s("t^(1)"));
    assert_eq!(w.sides[0].1, s("t^(2) + t^(3)"));
    assert_eq!(w.sides[1].1, s("t^(2) + 2*t^(3) + t^(4)"));

    let report = classify(&aut("exp_derivation{phi: linear(1), shift: 1, precision: 5}"), &spec, &ctx);
    for (name, check) in report.checks() {
        assert_eq!(check.status, Status::Pass, "{name}: {check:?}");
    }

    let report = classify(&Automorphism::external_field(scale2()), &spec, &ctx);
    assert_eq!(report.valuation_preserving.status, Status::Pass);
    assert_eq!(report.internal.status, Status::Fail);
    assert_eq!(report.internal.witness.as_ref().unwrap().inputs[0].1, s("t^(1)"));

    let eg = Automorphism::external_group(kinked(), ScalingFamily::unit(Q)).unwrap();
    let report = classify(&eg, &spec, &ctx);
    assert_eq!(report.additive.status, Status::Pass);
    assert_eq!(report.order_preserving.status, Status::Pass);
    assert_eq!(report.multiplicative.status, Status::Fail);
}

#[test]
fn factorize_examples() {
    let ctx = ApplyContext::with_precision(Precision::Finite(g(6, 1)));
    let spec = SampleSpec::default();
    let a = aut("compose(character{1: 2}, external_field{tau: scalar(2)})");
    let f = factorize(&a, FactorMode::Field, &[g(-1, 1), g(1, 2), g(1, 1)], &spec, &ctx).unwrap();
    assert_eq!(f.exponent_map, vec![(g(-1, 1), g(-2, 1)), (g(1, 2), g(1, 1)), (g(1, 1), g(2, 1))]);
    assert_eq!(f.coefficients, vec![(g(-1, 1), q(1, 4)), (g(1, 2), q(2, 1)), (g(1, 1), q(4, 1))]);
    assert!(f.passed(), "{:?}", f.certificates);
    for x in ["t^(-2)", "t^(1)", "t^(2)"] {
        assert_eq!(f.residual.apply_with(&s(x), &ctx).unwrap(), s(x));
    }

    let f = factorize(&Automorphism::identity(Q), FactorMode::Field, &[g(1, 1), g(2, 1)], &spec, &ctx).unwrap();
    assert!(f.coefficients.iter().all(|(_, c)| c.is_one()));
    assert!(f.passed());

    let exp = aut("exp_derivation{phi: linear(1), shift: 1, precision: 6}");
    let a = Automorphism::compose(Q, vec![exp.clone(), Automorphism::external_field(scale2())]).unwrap();
    let f = factorize(&a, FactorMode::Field, &[g(-1, 1), g(1, 1), g(2, 1)], &spec, &ctx).unwrap();
    assert!(f.passed(), "{:?}", f.certificates);
    assert!(f.exponent_map.iter().all(|(x, y)| y == &x.add(x).unwrap()));
    for x in ["t^(2)", "t^(4)"] {
        let got = f.residual.apply_with(&s(x), &ctx).unwrap();
        assert!(got.agrees(&exp.apply(&s(x)).unwrap()), "{got}");
    }

    let a = aut("compose(internal_mult{eps: t^(1)}, external_group{zeta: translate(1), scale: {0: 3}, default: 1})");
    let f = factorize(&a, FactorMode::Group, &[g(-1, 1), g(0, 1), g(1, 1)], &spec, &ctx).unwrap();
    assert!(f.passed(), "{:?}", f.certificates);
}
