//! Recursive-descent parser for coefficient expressions.
//!
//! Grammar (whitespace insensitive):
//!   expr   := ['-'] term (('+' | '-') term)*
//!   term   := factor (('*' | '/') factor)*
//!   factor := primary ('^' uint)*
//!   primary:= uint | 't' | '(' expr ')'
//!
//! Everything evaluates to a rational function; the polynomial and point
//! entry points reject leftover denominators. Integer literals are reduced
//! mod p over a prime field. Errors carry the byte offset of the offending
//! token.

use crate::field::Field;
use crate::place::{Place, PlaceError};
use crate::poly::Poly;
use crate::ratfunc::{RatFunc, RatFuncError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at offset {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    fn new(offset: usize, message: impl Into<String>) -> Self {
        ParseError { offset, message: message.into() }
    }
}

pub fn parse_ratfunc<F: Field>(field: &F, src: &str) -> Result<RatFunc<F>, ParseError> {
    let mut p = Parser::new(field, src);
    let value = p.expr()?;
    p.expect_end()?;
    Ok(value)
}

pub fn parse_poly<F: Field>(field: &F, src: &str) -> Result<Poly<F>, ParseError> {
    let value = parse_ratfunc(field, src)?;
    match value.as_poly() {
        Ok(p) => Ok(p.clone()),
        Err(_) => Err(ParseError::new(0, format!("expected a polynomial, got {value}"))),
    }
}

/// `O` (or `0` alone) is the zero point; otherwise `(x, y)` with coordinate
/// expressions.
pub fn parse_point<F: Field>(
    field: &F,
    src: &str,
) -> Result<Option<(RatFunc<F>, RatFunc<F>)>, ParseError> {
    let trimmed = src.trim();
    if trimmed == "O" || trimmed == "0" {
        return Ok(None);
    }
    let inner = trimmed
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| ParseError::new(0, "point must be O or (x, y)"))?;
    let comma = top_level_comma(inner)
        .ok_or_else(|| ParseError::new(0, "point must have two comma-separated coordinates"))?;
    let x = parse_ratfunc(field, &inner[..comma])?;
    let y = parse_ratfunc(field, &inner[comma + 1..])?;
    Ok(Some((x, y)))
}

/// `inf` or a finite place polynomial.
pub fn parse_place<F: Field>(field: &F, src: &str) -> Result<Place<F>, ParseError> {
    if src.trim() == "inf" {
        return Ok(Place::Infinity);
    }
    let poly = parse_poly(field, src)?;
    Place::finite(poly).map_err(|e: PlaceError| ParseError::new(0, e.to_string()))
}

fn top_level_comma(s: &str) -> Option<usize> {
    let mut depth = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

struct Parser<'a, F: Field> {
    field: &'a F,
    src: &'a [u8],
    pos: usize,
}

impl<'a, F: Field> Parser<'a, F> {
    fn new(field: &'a F, src: &'a str) -> Self {
        Parser { field, src: src.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(c) => Err(ParseError::new(self.pos, format!("unexpected '{}'", c as char))),
        }
    }

    fn expr(&mut self) -> Result<RatFunc<F>, ParseError> {
        let mut acc = if self.peek() == Some(b'-') {
            self.pos += 1;
            self.term()?.neg()
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc<F>, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.factor()?);
                }
                Some(b'/') => {
                    let at = self.pos;
                    self.pos += 1;
                    let rhs = self.factor()?;
                    acc = acc.div(&rhs).map_err(|e: RatFuncError| {
                        ParseError::new(at, e.to_string())
                    })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<RatFunc<F>, ParseError> {
        let mut base = self.primary()?;
        while self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.uint()?;
            base = base.pow(e);
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<RatFunc<F>, ParseError> {
        match self.peek() {
            Some(b't') => {
                self.pos += 1;
                Ok(RatFunc::from_poly(Poly::var(self.field.clone())))
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.uint()?;
                if n > i64::MAX as u64 {
                    return Err(ParseError::new(self.pos, "integer literal too large"));
                }
                Ok(RatFunc::from_int(self.field.clone(), n as i64))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() == Some(b')') {
                    self.pos += 1;
                    Ok(inner)
                } else {
                    Err(ParseError::new(self.pos, "expected ')'"))
                }
            }
            Some(c) => Err(ParseError::new(self.pos, format!("unexpected '{}'", c as char))),
            None => Err(ParseError::new(self.pos, "unexpected end of input")),
        }
    }

    fn uint(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            let found = self
                .src
                .get(self.pos)
                .map_or("end of input".to_string(), |c| format!("'{}'", *c as char));
            return Err(ParseError::new(self.pos, format!("expected integer, found {found}")));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii digits")
            .parse::<u64>()
            .map_err(|_| ParseError::new(start, "integer literal too large"))
    }
}
