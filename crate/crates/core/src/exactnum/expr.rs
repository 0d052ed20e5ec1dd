//! Closed-form expressions in one index variable.
//!
//! Grammar: integer literals, the index variable (any identifier other than
//! `sqrt2`), `+ - * /` (also `·`), `2^expr` with an integer exponent,
//! the `sqrt2` token, parentheses, and a top-level `(e1, e2)` pair for plane
//! coordinates.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::scalar::{pow2, ExactScalar};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Int(BigInt),
    Var,
    Sqrt2,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow2(Box<Expr>),
}

/// A parsed expression together with its source text.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedForm {
    pub source: String,
    pub parts: Vec<Expr>,
}

impl ClosedForm {
    pub fn parse(src: &str) -> Result<Self> {
        let mut p = Parser { chars: src.chars().filter(|c| !c.is_whitespace()).collect(), pos: 0, src };
        let parts = p.top()?;
        Ok(Self { source: src.to_string(), parts })
    }

    pub fn eval(&self, index: i64) -> Result<Vec<ExactScalar>> {
        self.parts.iter().map(|e| e.eval(index)).collect()
    }

    pub fn eval_scalar(&self, index: i64) -> Result<ExactScalar> {
        match self.parts.as_slice() {
            [e] => e.eval(index),
            _ => Err(Error::InvalidArgument(format!("`{}` is not a scalar expression", self.source))),
        }
    }
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl Expr {
    pub fn eval(&self, index: i64) -> Result<ExactScalar> {
        Ok(match self {
            Expr::Int(n) => ExactScalar::rational(BigRational::from_integer(n.clone())),
            Expr::Var => ExactScalar::integer(index),
            Expr::Sqrt2 => ExactScalar::sqrt2(),
            Expr::Neg(e) => -e.eval(index)?,
            Expr::Add(a, b) => a.eval(index)? + b.eval(index)?,
            Expr::Sub(a, b) => a.eval(index)? - b.eval(index)?,
            Expr::Mul(a, b) => a.eval(index)? * b.eval(index)?,
            Expr::Div(a, b) => a
                .eval(index)?
                .checked_div(&b.eval(index)?)
                .ok_or_else(|| Error::InvalidArgument("division by zero in closed form".into()))?,
            Expr::Pow2(e) => {
                let v = e.eval(index)?;
                let exp = v
                    .as_rational()
                    .filter(|r| r.is_integer())
                    .and_then(|r| r.to_integer().to_i64())
                    .ok_or_else(|| Error::InvalidArgument(format!("non-integer exponent {v}")))?;
                ExactScalar::rational(pow2(exp))
            }
        })
    }
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at offset {} in `{}`", self.pos, self.src))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn top(&mut self) -> Result<Vec<Expr>> {
        if self.peek() == Some('(') {
            let save = self.pos;
            self.pos += 1;
            let first = self.sum()?;
            if self.eat(',') {
                let second = self.sum()?;
                if !self.eat(')') || self.pos != self.chars.len() {
                    return Err(self.err("malformed coordinate pair"));
                }
                return Ok(vec![first, second]);
            }
            self.pos = save;
        }
        let e = self.sum()?;
        if self.pos < self.chars.len() {
            return Err(self.err("trailing input"));
        }
        Ok(vec![e])
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut lhs = self.product()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.product()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.product()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn product(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') || self.eat('·') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            if base != Expr::Int(BigInt::from(2)) {
                return Err(self.err("only base 2 powers are supported"));
            }
            let exp = self.unary()?;
            return Ok(Expr::Pow2(Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.sum()?;
                if !self.eat(')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let digits: String = self.chars[start..self.pos].iter().collect();
                Ok(Expr::Int(digits.parse().map_err(|_| self.err("bad integer"))?))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
                    self.pos += 1;
                }
                let word: String = self.chars[start..self.pos].iter().collect();
                Ok(if word == "sqrt2" { Expr::Sqrt2 } else { Expr::Var })
            }
            _ => Err(self.err("unexpected token")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_grammar() {
        let e = ClosedForm::parse("1/(3*2^i)").unwrap();
        assert_eq!(e.eval_scalar(4).unwrap(), ExactScalar::ratio(1, 48));
        let e = ClosedForm::parse("2^(-i) + sqrt2 - 1").unwrap();
        let v = e.eval_scalar(1).unwrap();
        assert_eq!(v, &ExactScalar::sqrt2() - &ExactScalar::ratio(1, 2));
        let pair = ClosedForm::parse("(1/(i+1), -1/(i+1))").unwrap();
        assert_eq!(pair.eval(2).unwrap(), vec![ExactScalar::ratio(1, 3), ExactScalar::ratio(-1, 3)]);
        assert_eq!(ClosedForm::parse("(i+1)*2").unwrap().eval_scalar(3).unwrap(), ExactScalar::integer(8));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ClosedForm::parse("3^i").is_err());
        assert!(ClosedForm::parse("1/(i").is_err());
        assert!(ClosedForm::parse("1/i").unwrap().eval_scalar(0).is_err());
    }
}
