//! Textual syntax for group elements, series, expressions and specs.
//!
//! Series are written as sums of terms `c*t^(e)` with the exponent always
//! parenthesized. In omega notation the base is `w` and `w^(y)` stands for
//! `t^(-y)`; the internal representation does not depend on notation.

mod cursor;
mod expr;
mod spec;

use std::fmt::Write;
use std::str::FromStr;

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::group::{GroupDescriptor, GroupElement};
use crate::series::{Precision, Series};
use crate::Rational;

pub use expr::eval_expression;
pub use spec::{
    format_additive, format_aut, format_derivation, format_functional, format_monotone, parse_additive, parse_aut,
    parse_derivation, parse_functional, parse_monotone,
};

use cursor::Cursor;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Notation {
    /// `t^(g)`, ascending exponents.
    #[default]
    T,
    /// `w^(y)` with `y = -g`: largest term first, as in Conway normal form.
    Omega,
}

impl Notation {
    pub fn base(self) -> char {
        match self {
            Notation::T => 't',
            Notation::Omega => 'w',
        }
    }

    fn outer_exponent(self, g: &GroupElement) -> GroupElement {
        match self {
            Notation::T => g.clone(),
            Notation::Omega => g.neg(),
        }
    }
}

impl FromStr for Notation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "t" => Ok(Notation::T),
            "omega" | "w" => Ok(Notation::Omega),
            other => Err(Error::Parse {
                offset: 0,
                message: format!("unknown notation {other:?} (expected t or omega)"),
            }),
        }
    }
}

pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Group element literal: `p/q`, `(a,b,...)`, or `[series]` for surreal
/// kinds (the inner series is always in t-notation).
pub fn format_group_element(g: &GroupElement, _notation: Notation) -> String {
    if let Some(q) = g.as_rational() {
        return format_rational(&q);
    }
    if let Some(v) = g.as_tuple() {
        let parts: Vec<String> = v.iter().map(format_rational).collect();
        return format!("({})", parts.join(","));
    }
    let s = g.as_series().expect("remaining kind is surreal");
    format!("[{}]", format_series(s, Notation::T))
}

pub fn format_series(s: &Series, notation: Notation) -> String {
    let base = notation.base();
    let mut out = String::new();
    for (i, (e, c)) in s.terms().iter().enumerate() {
        let negative = c.is_negative();
        match (i, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let abs = c.abs();
        if e.is_zero() {
            out.push_str(&format_rational(&abs));
        } else {
            if !abs.is_one() {
                out.push_str(&format_rational(&abs));
                out.push('*');
            }
            let shown = notation.outer_exponent(e);
            write!(out, "{base}^({})", format_group_element(&shown, notation)).expect("string write");
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    if let Precision::Finite(p) = s.precision() {
        let shown = notation.outer_exponent(p);
        write!(out, " (mod {base}^({}))", format_group_element(&shown, notation)).expect("string write");
    }
    out
}

/// Parses a whole string as a series over `group`.
pub fn parse_series(text: &str, group: GroupDescriptor, notation: Notation) -> Result<Series> {
    let mut cur = Cursor::new(text);
    let s = cur.series(group, notation)?;
    cur.finish()?;
    Ok(s)
}

/// Parses a whole string as a group element literal.
pub fn parse_group_element(text: &str, group: GroupDescriptor) -> Result<GroupElement> {
    let mut cur = Cursor::new(text);
    let g = cur.group_element(group)?;
    cur.finish()?;
    Ok(g)
}

pub fn parse_rational(text: &str) -> Result<Rational> {
    let mut cur = Cursor::new(text);
    let q = cur.signed_rational()?;
    cur.finish()?;
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Precision;

    const Q: GroupDescriptor = GroupDescriptor::Rationals;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn qe(n: i64, d: i64) -> GroupElement {
        GroupElement::rational(q(n, d))
    }

    fn series(terms: &[(i64, i64)]) -> Series {
        Series::from_terms(Q, terms.iter().map(|&(e, c)| (qe(e, 1), q(c, 1))).collect(), Precision::Infinite).unwrap()
    }

    #[test]
    fn formats_in_both_notations() {
        let s = series(&[(-2, 3), (1, 5)]);
        assert_eq!(format_series(&s, Notation::T), "3*t^(-2) + 5*t^(1)");
        assert_eq!(format_series(&s, Notation::Omega), "3*w^(2) + 5*w^(-1)");
        assert_eq!(format_series(&Series::zero(Q), Notation::T), "0");
        assert_eq!(format_series(&series(&[(0, 1), (2, -1)]), Notation::T), "1 - t^(2)");
        assert_eq!(format_series(&series(&[(1, 1)]).truncate_to(&qe(5, 1)), Notation::T), "t^(1) (mod t^(5))");
    }

    #[test]
    fn parses_documented_examples() {
        assert_eq!(parse_series("3*t^(-2) + 5*t^(1)", Q, Notation::T).unwrap(), series(&[(-2, 3), (1, 5)]));
        assert_eq!(parse_series("w^(2) + 3", Q, Notation::Omega).unwrap(), series(&[(-2, 1), (0, 3)]));
        let err = parse_series("t^(", Q, Notation::T).unwrap_err();
        assert_eq!(err, Error::Parse { offset: 3, message: err_message(&err) });
    }

    fn err_message(e: &Error) -> String {
        match e {
            Error::Parse { message, .. } => message.clone(),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn merges_and_sorts() {
        let s = parse_series("t^(2) + 1 - t^(2) + 2*t^(-1) + 1/2", Q, Notation::T).unwrap();
        assert_eq!(format_series(&s, Notation::T), "2*t^(-1) + 3/2");
    }

    #[test]
    fn exponent_shape_errors() {
        let err = parse_series("t^(1/2)", GroupDescriptor::Integers, Notation::T).unwrap_err();
        assert_eq!(err.kind(), "ExponentParseError");
        let err = parse_series("t^((1,2,3))", GroupDescriptor::LexPower(2), Notation::T).unwrap_err();
        assert_eq!(err.kind(), "ExponentParseError");
    }

    #[test]
    fn nested_group_elements_round_trip() {
        let sd2 = GroupDescriptor::SurrealDepth(2);
        for text in [
            "t^([t^([-1])])",
            "-1/2*t^([2*t^([-1]) - 3])",
            "2*t^([-1]) + 7 (mod t^([1]))",
        ] {
            let s = parse_series(text, sd2, Notation::T).unwrap();
            assert_eq!(format_series(&s, Notation::T), text);
        }
        let lex = GroupDescriptor::LexPower(2);
        let s = parse_series("t^((1,-5)) - 3*t^((2,0))", lex, Notation::T).unwrap();
        assert_eq!(format_series(&s, Notation::T), "t^((1,-5)) - 3*t^((2,0))");
    }

    #[test]
    fn precision_suffix_in_omega_mode() {
        let s = parse_series("w^(1) (mod w^(-3))", Q, Notation::Omega).unwrap();
        assert_eq!(s.precision(), &Precision::Finite(qe(3, 1)));
        assert_eq!(format_series(&s, Notation::Omega), "w^(1) (mod w^(-3))");
    }
}
