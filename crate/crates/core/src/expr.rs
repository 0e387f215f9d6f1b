//! Parser for polynomial expressions such as `3/4*x^2 - eta_1*(y + 1)`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::graded_algebra::{Chart, Poly, Rational};

/// Parses `text` on `chart`. Error positions are 1-based columns within `text`, on line 1.
pub fn parse(text: &str, chart: &Arc<Chart>) -> Result<Poly> {
    parse_at(text, chart, 1, 1)
}

/// Like [`parse`], reporting positions relative to (line, first column).
pub fn parse_at(text: &str, chart: &Arc<Chart>, line: usize, column: usize) -> Result<Poly> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        chart,
        line,
        column,
    };
    p.skip_ws();
    if p.pos == p.src.len() {
        return Err(p.err("empty expression"));
    }
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err(format!("unexpected `{}`", p.src[p.pos] as char)));
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    chart: &'a Arc<Chart>,
    line: usize,
    column: usize,
}

impl Parser<'_> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column: self.column + self.pos,
            message: msg.into(),
        }
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

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    acc = acc + self.term()?;
                }
                b'-' => {
                    self.pos += 1;
                    acc = acc - self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    self.pos += 1;
                    acc = acc * self.unary()?;
                }
                b'/' => {
                    self.pos += 1;
                    let at = self.pos;
                    let d = self.unary()?;
                    let c = d.constant_term();
                    if d.len() > 1 || (d.len() == 1 && c.is_zero()) {
                        self.pos = at;
                        return Err(self.err("division by a non-constant"));
                    }
                    if c.is_zero() {
                        self.pos = at;
                        return Err(self.err("division by zero"));
                    }
                    acc = acc.scale(&(Rational::from_integer(1.into()) / c));
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.err("expected a nonnegative integer exponent"));
            }
            let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            let n: u32 = s.parse().map_err(|_| self.err("exponent too large"))?;
            return Ok(base.pow(n));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let n: BigInt = s.parse().unwrap();
                Ok(Poly::constant(self.chart, Rational::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match self.chart.lookup(name) {
                    Some(i) => Ok(Poly::var_at(self.chart, i)),
                    None => {
                        self.pos = start;
                        Err(self.err(format!("unknown variable `{name}`")))
                    }
                }
            }
            Some(c) => Err(self.err(format!("unexpected `{}`", c as char))),
            None => Err(self.err("unexpected end of expression")),
        }
    }
}
