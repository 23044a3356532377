//! Test oracles built from plain term maps, independent of the series
//! arithmetic under test.
#![allow(dead_code)]

use std::collections::BTreeMap;

use hahn_aut::syntax::{parse_series, Notation};
use hahn_aut::{GroupDescriptor, GroupElement, Precision, Rational, Series, SessionConfig};
use num_traits::Zero;

pub const Q: GroupDescriptor = GroupDescriptor::Rationals;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn g(n: i64, d: i64) -> GroupElement {
    GroupElement::rational(q(n, d))
}

pub fn s(text: &str) -> Series {
    parse_series(text, Q, Notation::T).unwrap()
}

pub fn series_in(desc: GroupDescriptor, text: &str) -> Series {
    parse_series(text, desc, Notation::T).unwrap()
}

pub fn session(desc: GroupDescriptor) -> SessionConfig {
    SessionConfig::new(desc)
}

pub type TermMap = BTreeMap<GroupElement, Rational>;

pub fn term_map(s: &Series) -> TermMap {
    s.terms().iter().cloned().collect()
}

fn clean(mut m: TermMap) -> TermMap {
    m.retain(|_, c| !c.is_zero());
    m
}

pub fn naive_add(a: &TermMap, b: &TermMap) -> TermMap {
    let mut out = a.clone();
    for (e, c) in b {
        *out.entry(e.clone()).or_insert_with(Rational::zero) += c;
    }
    clean(out)
}

/// Schoolbook convolution over the exponent group.
pub fn naive_mul(a: &TermMap, b: &TermMap) -> TermMap {
    let mut out = TermMap::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            *out.entry(ea.add(eb).unwrap()).or_insert_with(Rational::zero) += ca * cb;
        }
    }
    clean(out)
}

pub fn below(m: &TermMap, p: &Precision) -> TermMap {
    m.iter().filter(|(e, _)| p.covers(e)).map(|(e, c)| (e.clone(), c.clone())).collect()
}

/// Smallest exponent with a nonzero coefficient.
pub fn naive_valuation(m: &TermMap) -> Option<GroupElement> {
    m.iter().filter(|(_, c)| !c.is_zero()).map(|(e, _)| e.clone()).min()
}

/// Index of the archimedean class: a smaller key means a dominant class.
pub fn arch_key(x: &GroupElement) -> Vec<GroupElement> {
    match x.descriptor() {
        GroupDescriptor::Integers | GroupDescriptor::Rationals => vec![],
        GroupDescriptor::LexPower(_) => {
            let i = x.as_tuple().unwrap().iter().position(|c| !c.is_zero()).unwrap();
            vec![GroupElement::integer(i as i64)]
        }
        GroupDescriptor::SurrealDepth(0) => vec![],
        GroupDescriptor::SurrealDepth(_) => {
            let s = x.as_series().unwrap();
            vec![s.terms().iter().map(|(e, _)| e.clone()).min().unwrap()]
        }
    }
}

/// `(t / (1 - t))^n = sum_{k >= n} C(k-1, n-1) t^k`, terms below `p`.
pub fn geometric_power(n: i64, p: i64) -> TermMap {
    let mut out = TermMap::new();
    for k in n..p {
        let mut c = Rational::from_integer(1.into());
        for j in 0..(n - 1) {
            c = c * q(k - 1 - j, 1) / q(j + 1, 1);
        }
        out.insert(g(k, 1), c);
    }
    out
}
