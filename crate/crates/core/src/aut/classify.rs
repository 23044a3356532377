use num_traits::One;

use crate::group::GroupDescriptor;
use crate::report::{Check, Status, Witness};
use crate::sample::{SampleSpec, Sampler};
use crate::series::Series;
use crate::Rational;

use super::{ApplyContext, AutClass, Automorphism};

/// Sample-relative certificates for the structural predicates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassReport {
    pub spec: SampleSpec,
    pub class: AutClass,
    pub additive: Check,
    pub multiplicative: Check,
    pub order_preserving: Check,
    pub valuation_preserving: Check,
    /// `v(a(s)) = v(s)`, and `[a(s)]_0 = s_0` when `v(s) = 0`.
    pub internal: Check,
    /// The leading term of every sample is fixed.
    pub leading_term_fixed: Check,
    /// Multiplicative and leading-term-fixing; n/a when not multiplicative.
    pub one_aut: Check,
}

impl ClassReport {
    pub fn checks(&self) -> [(&'static str, &Check); 7] {
        [
            ("additive", &self.additive),
            ("multiplicative", &self.multiplicative),
            ("order_preserving", &self.order_preserving),
            ("valuation_preserving", &self.valuation_preserving),
            ("internal", &self.internal),
            ("leading_term_fixed", &self.leading_term_fixed),
            ("one_aut", &self.one_aut),
        ]
    }

    pub fn any_failed(&self) -> bool {
        self.checks().iter().any(|(_, c)| c.failed())
    }
}

/// Sample pairs: all pairs of the basic monomials `t^1, t^-1, 1, t^2` come
/// first, then seeded random series, some truncated.
pub fn class_samples(desc: GroupDescriptor, spec: &SampleSpec) -> Vec<(Series, Series)> {
    let basics: Vec<Series> = Sampler::basic_exponents(desc)
        .into_iter()
        .map(|g| Series::monomial(desc, g, Rational::one()))
        .collect();
    let mut pairs = Vec::with_capacity(spec.count);
    for x in &basics {
        for y in &basics {
            pairs.push((x.clone(), y.clone()));
        }
    }
    let mut sampler = Sampler::new(desc, spec.seed);
    while pairs.len() < spec.count {
        let x = sampler.nonzero_series(3);
        let x = sampler.maybe_truncate(x);
        let y = sampler.nonzero_series(3);
        let y = sampler.maybe_truncate(y);
        pairs.push((x, y));
    }
    pairs.truncate(spec.count.max(1));
    pairs
}

pub fn classify(a: &Automorphism, spec: &SampleSpec, ctx: &ApplyContext) -> ClassReport {
    classify_pairs(a, &class_samples(a.descriptor(), spec), spec, ctx)
}

/// Evaluates every predicate on the given pairs. Samples on which the
/// automorphism is undefined or a needed sign or valuation is hidden
/// beyond precision are counted as skipped.
pub fn classify_pairs(a: &Automorphism, pairs: &[(Series, Series)], spec: &SampleSpec, ctx: &ApplyContext) -> ClassReport {
    let mut additive = Check::default();
    let mut multiplicative = Check::default();
    let mut order = Check::default();
    let mut valuation = Check::default();
    let mut internal = Check::default();
    let mut leading = Check::default();
    let apply = |s: &Series| a.apply_with(s, ctx).ok();

    for (x, y) in pairs {
        let (ax, ay) = (apply(x), apply(y));

        match (apply(&x.add_unchecked(y)), &ax, &ay) {
            (Some(lhs), Some(ax), Some(ay)) => {
                let rhs = ax.add_unchecked(ay);
                additive.record(lhs.agrees(&rhs), || pair_witness(x, y, ("a(x+y)", lhs), ("a(x)+a(y)", rhs)));
            }
            _ => additive.skip(),
        }

        match (apply(&x.mul_unchecked(y)), &ax, &ay) {
            (Some(lhs), Some(ax), Some(ay)) => {
                let rhs = ax.mul_unchecked(ay);
                multiplicative.record(lhs.agrees(&rhs), || pair_witness(x, y, ("a(x*y)", lhs), ("a(x)*a(y)", rhs)));
            }
            _ => multiplicative.skip(),
        }

        // sign of a(z) against sign of z, for z = x and z = x - y
        let diff = x.add_unchecked(&y.neg());
        let mut signs_known = false;
        let mut signs_ok = true;
        let mut bad = None;
        for (z, az) in [(x.clone(), ax.clone()), (diff.clone(), apply(&diff))] {
            if let (Ok(sz), Some(Ok(saz))) = (z.signum(), az.as_ref().map(Series::signum)) {
                signs_known = true;
                if sz != saz && signs_ok {
                    signs_ok = false;
                    bad = Some((z, az.expect("sign known")));
                }
            }
        }
        if signs_known {
            order.record(signs_ok, || {
                let (z, az) = bad.expect("failure recorded");
                unary_witness(&z, az).with_note("sign not preserved")
            });
        } else {
            order.skip();
        }

        let lead = |s: &Series| s.leading_term().ok();
        match (lead(x), lead(y), ax.as_ref().and_then(lead), ay.as_ref().and_then(lead)) {
            (Some(lx), Some(ly), Some(lax), Some(lay)) => {
                let before = lx.valuation.cmp(&ly.valuation);
                let after = lax.valuation.cmp(&lay.valuation);
                valuation.record(before == after, || {
                    pair_witness(
                        x,
                        y,
                        ("a(x)", ax.clone().expect("applied")),
                        ("a(y)", ay.clone().expect("applied")),
                    )
                    .with_note(format!("v-order {before:?} became {after:?}"))
                });
            }
            _ => valuation.skip(),
        }

        for (z, az) in [(x, &ax), (y, &ay)] {
            match (lead(z), az.as_ref().and_then(lead)) {
                (Some(lz), Some(laz)) => {
                    let same_v = lz.valuation == laz.valuation;
                    let residue_ok = !lz.valuation.is_zero() || lz.coefficient == laz.coefficient;
                    internal.record(same_v && residue_ok, || unary_witness(z, az.clone().expect("applied")));
                    leading.record(lz == laz, || unary_witness(z, az.clone().expect("applied")));
                }
                _ => {
                    internal.skip();
                    leading.skip();
                }
            }
        }
    }

    let one_aut = if multiplicative.failed() {
        Check::not_applicable("not multiplicative")
    } else {
        leading.clone()
    };
    // an all-skipped multiplicative check leaves one_aut unsupported
    let one_aut = if multiplicative.status == Status::Inconclusive && one_aut.passed() {
        Check {
            status: Status::Inconclusive,
            ..one_aut
        }
    } else {
        one_aut
    };

    ClassReport {
        spec: *spec,
        class: a.class(),
        additive,
        multiplicative,
        order_preserving: order,
        valuation_preserving: valuation,
        internal,
        leading_term_fixed: leading,
        one_aut,
    }
}

fn pair_witness(x: &Series, y: &Series, lhs: (&str, Series), rhs: (&str, Series)) -> Witness {
    Witness::new(vec![("x", x.clone()), ("y", y.clone())], vec![lhs, rhs])
}

fn unary_witness(s: &Series, image: Series) -> Witness {
    Witness::new(vec![("s", s.clone())], vec![("a(s)", image)])
}
