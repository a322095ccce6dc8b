//! Parser for the polynomial text grammar used by structure files.
//!
//! Variables are `x1..xn` (with aliases `x, y, z, w` when n <= 4, and any
//! caller-supplied names on top), literals are integers or rationals like
//! `1/2`, and the operators are `+ - * ^` with parentheses. Multiplication
//! is always explicit: `2*x`, not `2x`.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::poly::Poly;

pub fn parse_poly(src: &str, nvars: usize, names: Option<&[String]>) -> Result<Poly> {
    let mut parser = Parser {
        src: src.as_bytes(),
        pos: 0,
        nvars,
        names,
    };
    let p = parser.expr()?;
    parser.skip_ws();
    if parser.pos != parser.src.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(p)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    nvars: usize,
    names: Option<&'a [String]>,
}

impl<'a> Parser<'a> {
    fn error(&self, message: &str) -> Error {
        Error::Parse {
            offset: self.pos,
            message: message.to_string(),
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

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.bump();
                self.term()?.neg()
            }
            Some(b'+') => {
                self.bump();
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.bump();
                    acc = acc.add(&self.term()?)?;
                }
                Some(b'-') => {
                    self.bump();
                    acc = acc.sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.bump();
            acc = acc.mul(&self.factor()?)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.bump();
            let e = self.uint()?;
            if e > 64 {
                return Err(self.error("exponent too large"));
            }
            return base.pow(e as u32);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(b'(') => {
                self.bump();
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.bump();
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.variable(),
            Some(_) => Err(self.error("expected '(', a number, or a variable")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn uint(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected a digit"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse::<u64>()
            .map_err(|_| self.error("integer literal too large"))
    }

    fn bigint(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected a digit"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse::<BigInt>()
            .expect("digits parse as BigInt"))
    }

    fn number(&mut self) -> Result<Poly> {
        let numer = self.bigint()?;
        // A '/' directly after an integer continues the rational literal.
        if self.src.get(self.pos) == Some(&b'/') {
            self.pos += 1;
            let denom = self.bigint()?;
            if denom == BigInt::from(0) {
                return Err(self.error("zero denominator"));
            }
            return Ok(Poly::constant(self.nvars, BigRational::new(numer, denom)));
        }
        Ok(Poly::constant(self.nvars, BigRational::from_integer(numer)))
    }

    fn variable(&mut self) -> Result<Poly> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match self.resolve(name) {
            Some(index) => Poly::var(self.nvars, index),
            None => {
                self.pos = start;
                Err(self.error(&format!("unknown variable `{name}`")))
            }
        }
    }

    fn resolve(&self, name: &str) -> Option<usize> {
        if let Some(names) = self.names {
            if let Some(i) = names.iter().position(|n| n == name) {
                return (i < self.nvars).then_some(i);
            }
        }
        if self.nvars <= 4 {
            if let Some(i) = ["x", "y", "z", "w"].iter().position(|&n| n == name) {
                return (i < self.nvars).then_some(i);
            }
        }
        let rest = name.strip_prefix('x')?;
        let i = rest.parse::<usize>().ok()?;
        (1..=self.nvars).contains(&i).then(|| i - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(src: &str, nvars: usize) -> Poly {
        parse_poly(src, nvars, None).unwrap()
    }

    #[test]
    fn parses_spec_grammar_examples() {
        assert_eq!(p("y^2", 3).eval(&[0.0, 3.0, 0.0]).unwrap(), 9.0);
        assert_eq!(p("1/2*x", 3).eval(&[4.0, 0.0, 0.0]).unwrap(), 2.0);
    }

    #[test]
    fn aliases_and_indexed_names_agree() {
        assert_eq!(p("x*y - z", 3), p("x1*x2 - x3", 3));
    }

    #[test]
    fn no_aliases_above_four_variables() {
        assert!(parse_poly("y", 5, None).is_err());
        assert!(parse_poly("x5", 5, None).is_ok());
    }

    #[test]
    fn custom_names() {
        let names = vec!["u".to_string(), "v".to_string()];
        let q = parse_poly("u^2 - 3*v", 2, Some(&names)).unwrap();
        assert_eq!(q.eval(&[2.0, 1.0]).unwrap(), 1.0);
    }

    #[test]
    fn parentheses_and_unary_minus() {
        assert_eq!(p("-(x - 2)*(x + 2)", 1).eval(&[3.0]).unwrap(), -5.0);
        assert_eq!(p("x*(-2)", 1).eval(&[3.0]).unwrap(), -6.0);
    }

    #[test]
    fn rational_literals() {
        assert_eq!(p("3/4 + 1/4", 1).eval(&[0.0]).unwrap(), 1.0);
        assert!(parse_poly("1/0", 1, None).is_err());
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_poly("x +", 2, None).is_err());
        assert!(parse_poly("q", 2, None).is_err());
        assert!(parse_poly("x ^ y", 2, None).is_err());
        assert!(parse_poly("(x", 2, None).is_err());
        assert!(parse_poly("x 2", 2, None).is_err());
    }

    #[test]
    fn display_round_trips() {
        let cases = ["x^2*y + 1/2*x - 3", "-y", "0", "2*x*z - 7/3", "y^2"];
        for src in cases {
            let a = p(src, 3);
            let b = p(&a.to_string(), 3);
            assert_eq!(a, b, "round-trip failed for {src}");
        }
    }
}
