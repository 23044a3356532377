use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::group::{GroupDescriptor, GroupElement};
use crate::series::{Precision, Series};
use crate::Rational;

use super::Notation;

/// Byte-offset cursor shared by all recursive-descent parsers.
pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    pub(crate) fn pos(&self) -> usize {
        self.pos
    }

    /// Backtracks to an earlier offset.
    pub(crate) fn reset(&mut self, pos: usize) {
        self.pos = pos;
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            offset: self.pos,
            message: message.into(),
        }
    }

    pub(crate) fn error_at(offset: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            offset,
            message: message.into(),
        }
    }

    pub(crate) fn ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    pub(crate) fn peek(&mut self) -> Option<char> {
        self.ws();
        self.src[self.pos..].chars().next()
    }

    /// Character after the next one, skipping whitespace before the first.
    pub(crate) fn peek_second(&mut self) -> Option<char> {
        self.ws();
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
    }

    pub(crate) fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(match self.peek() {
                Some(found) => self.error(format!("expected '{c}', found '{found}'")),
                None => self.error(format!("expected '{c}', found end of input")),
            })
        }
    }

    pub(crate) fn finish(&mut self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(c) => Err(self.error(format!("unexpected '{c}'"))),
        }
    }

    /// Identifier made of ASCII letters, digits, `_` and `-`, starting
    /// with a letter. Does not consume anything on failure.
    pub(crate) fn ident(&mut self) -> Option<&'a str> {
        self.ws();
        let rest = &self.src[self.pos..];
        let first = rest.chars().next()?;
        if !first.is_ascii_alphabetic() {
            return None;
        }
        let len = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(rest.len());
        self.pos += len;
        Some(&rest[..len])
    }

    pub(crate) fn peek_ident(&mut self) -> Option<&'a str> {
        let save = self.pos;
        let id = self.ident();
        self.pos = save;
        id
    }

    pub(crate) fn keyword(&mut self, kw: &str) -> bool {
        let save = self.pos;
        match self.ident() {
            Some(id) if id == kw => true,
            _ => {
                self.pos = save;
                false
            }
        }
    }

    pub(crate) fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        if self.keyword(kw) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{kw}'")))
        }
    }

    fn digits(&mut self) -> Result<BigInt> {
        self.ws();
        let rest = &self.src[self.pos..];
        let len = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        if len == 0 {
            return Err(match rest.chars().next() {
                Some(c) => self.error(format!("expected a number, found '{c}'")),
                None => self.error("expected a number, found end of input"),
            });
        }
        self.pos += len;
        Ok(rest[..len].parse().expect("ascii digits"))
    }

    /// `n` or `n/d` without sign.
    pub(crate) fn unsigned_rational(&mut self) -> Result<Rational> {
        let num = self.digits()?;
        // a '/' followed by a digit is a fraction bar, otherwise division
        let save = self.pos;
        if self.eat('/') {
            if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                let den_pos = self.pos;
                let den = self.digits()?;
                if den.is_zero() {
                    return Err(Cursor::error_at(den_pos, "zero denominator"));
                }
                return Ok(Rational::new(num, den));
            }
            self.pos = save;
        }
        Ok(Rational::from_integer(num))
    }

    pub(crate) fn signed_rational(&mut self) -> Result<Rational> {
        let negative = self.eat('-');
        let q = self.unsigned_rational()?;
        Ok(if negative { -q } else { q })
    }

    pub(crate) fn starts_number(&mut self) -> bool {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => true,
            Some('-') => matches!(self.peek_second(), Some(c) if c.is_ascii_digit()),
            _ => false,
        }
    }

    /// `( q, q, ... )`, possibly empty.
    pub(crate) fn rational_list(&mut self) -> Result<Vec<Rational>> {
        self.expect('(')?;
        let mut out = Vec::new();
        if self.eat(')') {
            return Ok(out);
        }
        loop {
            out.push(self.signed_rational()?);
            if self.eat(')') {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }

    pub(crate) fn group_element(&mut self, desc: GroupDescriptor) -> Result<GroupElement> {
        self.ws();
        let start = self.pos;
        let shape = |detail: String| Error::ExponentParse {
            offset: start,
            message: format!("{detail} does not fit group {desc}"),
        };
        match self.peek() {
            Some('(') => {
                let coords = self.rational_list()?;
                match desc {
                    GroupDescriptor::LexPower(n) if coords.len() == n as usize => {
                        Ok(GroupElement::from_tuple(desc, coords).expect("length checked"))
                    }
                    _ => Err(shape(format!("a {}-tuple", coords.len()))),
                }
            }
            Some('[') => {
                self.pos += 1;
                let Some(lower) = desc.lower() else {
                    return Err(shape("a bracketed series".into()));
                };
                let s = self.series(lower, Notation::T)?;
                self.expect(']')?;
                if !s.is_exact() {
                    return Err(shape("an inexact series".into()));
                }
                Ok(GroupElement::from_series(desc, s).expect("exact series one level down"))
            }
            Some(c) if c == '-' || c.is_ascii_digit() => {
                let q = self.signed_rational()?;
                match desc {
                    GroupDescriptor::Integers if !q.is_integer() => Err(shape(format!("the fraction {q}"))),
                    GroupDescriptor::LexPower(_) if !q.is_zero() => Err(shape(format!("the scalar {q}"))),
                    GroupDescriptor::LexPower(_) => Ok(desc.zero()),
                    _ => Ok(desc.scalar(q).expect("scalar fits")),
                }
            }
            Some(c) => Err(self.error(format!("expected a group element, found '{c}'"))),
            None => Err(self.error("expected a group element, found end of input")),
        }
    }

    /// `base ^ ( exponent )` after the base letter has been consumed.
    fn power(&mut self, desc: GroupDescriptor, notation: Notation) -> Result<GroupElement> {
        self.expect('^')?;
        self.expect('(')?;
        let g = self.group_element(desc)?;
        self.expect(')')?;
        Ok(match notation {
            Notation::T => g,
            Notation::Omega => g.neg(),
        })
    }

    pub(crate) fn eat_base(&mut self, notation: Notation) -> bool {
        let save = self.pos;
        if self.eat(notation.base()) {
            // `t` must not run into an identifier such as `tau`
            match self.src[self.pos..].chars().next() {
                Some(c) if c.is_ascii_alphanumeric() || c == '_' => {
                    self.pos = save;
                    false
                }
                _ => true,
            }
        } else {
            false
        }
    }

    fn term(&mut self, desc: GroupDescriptor, notation: Notation) -> Result<(GroupElement, Rational)> {
        if self.eat_base(notation) {
            let e = self.power(desc, notation)?;
            return Ok((e, Rational::from_integer(1.into())));
        }
        if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            return Err(match self.peek() {
                Some(c) => self.error(format!("expected a term, found '{c}'")),
                None => self.error("expected a term, found end of input"),
            });
        }
        let c = self.unsigned_rational()?;
        if self.eat('*') {
            if !self.eat_base(notation) {
                return Err(self.error(format!("expected '{}'", notation.base())));
            }
            let e = self.power(desc, notation)?;
            return Ok((e, c));
        }
        Ok((desc.zero(), c))
    }

    /// `series := ["-"] term (("+"|"-") term)* ["(" "mod" base "^(" g ")" ")"]`
    ///
    /// Parsing stops before any token that cannot continue the series, so
    /// callers embedding series in larger grammars resume there.
    pub(crate) fn series(&mut self, desc: GroupDescriptor, notation: Notation) -> Result<Series> {
        let mut terms = Vec::new();
        let mut negative = self.eat('-');
        loop {
            let (e, c) = self.term(desc, notation)?;
            terms.push((e, if negative { -c } else { c }));
            let save = self.pos;
            if self.eat('+') {
                negative = false;
            } else if self.eat('-') {
                negative = true;
            } else {
                self.pos = save;
                break;
            }
        }
        let mut precision = Precision::Infinite;
        let save = self.pos;
        if self.eat('(') {
            if self.keyword("mod") {
                if !self.eat_base(notation) {
                    return Err(self.error(format!("expected '{}'", notation.base())));
                }
                precision = Precision::Finite(self.power(desc, notation)?);
                self.expect(')')?;
            } else {
                self.pos = save;
            }
        }
        Ok(Series::from_terms(desc, terms, precision).expect("parsed exponents belong to the group"))
    }
}
