//! Arithmetic expressions over series.
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := primary ["^" int | "^" "(" int ")"]
//! primary := rational | base "^" "(" exponent ")" | "(" expr ")"
//! ```

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::group::GroupDescriptor;
use crate::series::{Precision, Series};
use crate::Rational;

use super::cursor::Cursor;
use super::Notation;

/// Evaluates an expression. Quotients by non-monomials are expanded so
/// that they are certified below `precision`, which must then be finite.
pub fn eval_expression(text: &str, group: GroupDescriptor, notation: Notation, precision: &Precision) -> Result<Series> {
    let mut p = ExprParser {
        cur: Cursor::new(text),
        group,
        notation,
        precision,
    };
    let value = p.expr()?;
    p.cur.finish()?;
    Ok(value)
}

struct ExprParser<'a, 'b> {
    cur: Cursor<'a>,
    group: GroupDescriptor,
    notation: Notation,
    precision: &'b Precision,
}

impl ExprParser<'_, '_> {
    fn expr(&mut self) -> Result<Series> {
        let mut acc = self.term()?;
        loop {
            if self.cur.eat('+') {
                acc = acc.add(&self.term()?)?;
            } else if self.cur.eat('-') {
                acc = acc.sub(&self.term()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Series> {
        let mut acc = self.unary()?;
        loop {
            if self.cur.eat('*') {
                acc = acc.mul(&self.unary()?)?;
            } else if self.cur.eat('/') {
                let at = self.cur.pos();
                let divisor = self.unary()?;
                acc = self.divide(&acc, &divisor, at)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Series> {
        if self.cur.eat('-') {
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<Series> {
        let base = self.primary()?;
        if !self.cur.eat('^') {
            return Ok(base);
        }
        let at = self.cur.pos();
        let n = if self.cur.eat('(') {
            let n = self.cur.signed_rational()?;
            self.cur.expect(')')?;
            n
        } else {
            self.cur.signed_rational()?
        };
        if !n.is_integer() {
            return Err(Cursor::error_at(at, "powers must be integers"));
        }
        let n = n.to_integer();
        let k = n
            .abs()
            .to_u32()
            .ok_or_else(|| Cursor::error_at(at, "power too large"))?;
        let mut acc = Series::one(self.group);
        for _ in 0..k {
            acc = acc.mul(&base)?;
        }
        if n < BigInt::from(0) {
            acc = self.divide(&Series::one(self.group), &acc, at)?;
        }
        Ok(acc)
    }

    fn primary(&mut self) -> Result<Series> {
        if self.cur.eat('(') {
            let inner = self.expr()?;
            self.cur.expect(')')?;
            return Ok(inner);
        }
        if self.cur.eat_base(self.notation) {
            self.cur.expect('^')?;
            self.cur.expect('(')?;
            let g = self.cur.group_element(self.group)?;
            self.cur.expect(')')?;
            let e = match self.notation {
                Notation::T => g,
                Notation::Omega => g.neg(),
            };
            return Ok(Series::monomial(self.group, e, Rational::one()));
        }
        if matches!(self.cur.peek(), Some(c) if c.is_ascii_digit()) {
            let q = self.cur.unsigned_rational()?;
            return Ok(Series::constant(self.group, q));
        }
        Err(match self.cur.peek() {
            Some(c) => self.cur.error(format!("expected an operand, found '{c}'")),
            None => self.cur.error("expected an operand, found end of input"),
        })
    }

    fn divide(&self, a: &Series, b: &Series, at: usize) -> Result<Series> {
        let lead = b.leading_term().map_err(|e| match e {
            Error::ZeroSeries => Error::DivisionByZero,
            other => other,
        })?;
        if b.is_exact() && b.terms().len() == 1 {
            let inv = Series::monomial(self.group, lead.valuation.neg(), lead.coefficient.recip());
            return a.mul(&inv);
        }
        let Precision::Finite(p) = self.precision else {
            return Err(Error::InsufficientPrecision(format!(
                "dividing by a non-monomial at offset {at} needs a finite session precision"
            )));
        };
        let Some(va) = a.valuation_bound() else {
            return Ok(Series::zero(self.group));
        };
        // (P + v(b) - v(a)) makes the quotient certified below P
        let target = p.plus(&lead.valuation).minus(va);
        let inv = b.invert(&target)?;
        a.mul(&inv)
    }
}
