//! Canonical text form for polynomials and rational functions, and a small
//! expression parser that reads it back (and any ordinary infix expression
//! with `+ - * / ^` and parentheses).
//!
//! Canonical polynomial text lists terms from the graded-lex leading term
//! down, e.g. `1/8*b2^2*b6 - 1/8*b2*b4^2 - 3/4*b4*b6`. A rational function
//! with non-constant denominator is written `(num)/(den)`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::{ArithError, MultiPoly, RatFunc, Rational};

fn monomial_text(vars: &[String], exps: &[u32]) -> String {
    let parts: Vec<String> = vars
        .iter()
        .zip(exps)
        .filter(|(_, &e)| e > 0)
        .map(|(v, &e)| if e == 1 { v.clone() } else { format!("{v}^{e}") })
        .collect();
    parts.join("*")
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let mono = monomial_text(self.vars(), m.exponents());
            if mono.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                f.write_str(&mono)?;
            } else {
                write!(f, "{a}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_polynomial() {
            Some(p) => write!(f, "{p}"),
            None => write!(f, "({})/({})", self.numer(), self.denom()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>, ArithError> {
    let b = s.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    while i < b.len() {
        let c = b[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < b.len() && (b[i] as char).is_ascii_digit() {
                i += 1;
            }
            let n: BigInt = s[st..i].parse().map_err(|_| ArithError::Parse { pos: st, msg: "bad integer".into() })?;
            out.push((st, Tok::Num(n)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let st = i;
            while i < b.len() && ((b[i] as char).is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push((st, Tok::Ident(s[st..i].to_string())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(ArithError::Parse { pos: i, msg: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    vars: &'a [String],
    len: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.len, |(p, _)| *p)
    }

    fn err<T>(&self, msg: &str) -> Result<T, ArithError> {
        Err(ArithError::Parse { pos: self.here(), msg: msg.to_string() })
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<RatFunc, ArithError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc, ArithError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.eat('/') {
                let at = self.here();
                let d = self.unary()?;
                acc = acc.try_div(&d).map_err(|_| ArithError::Parse { pos: at, msg: "division by zero".into() })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<RatFunc, ArithError> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<RatFunc, ArithError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let neg = self.eat('-');
        let Some(Tok::Num(n)) = self.peek().cloned() else {
            return self.err("expected integer exponent");
        };
        self.pos += 1;
        let e: u32 = u32::try_from(&n).or_else(|_| self.err("exponent too large"))?;
        let p = base.pow(e);
        if neg {
            p.inv().or_else(|_| self.err("zero to a negative power"))
        } else {
            Ok(p)
        }
    }

    fn atom(&mut self) -> Result<RatFunc, ArithError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(RatFunc::constant(Rational::from_integer(n)))
            }
            Some(Tok::Ident(name)) => {
                if !self.vars.iter().any(|v| v == &name) {
                    return Err(ArithError::UnknownVariable(name));
                }
                self.pos += 1;
                Ok(RatFunc::from_poly(MultiPoly::var_in(self.vars, &name)?))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected `)`");
                }
                Ok(e)
            }
            _ => self.err("expected a number, variable or `(`"),
        }
    }
}

/// Parses an expression in the variables `vars`; the result is expressed
/// over exactly that variable list.
pub fn parse_ratfunc<S: AsRef<str>>(src: &str, vars: &[S]) -> Result<RatFunc, ArithError> {
    let vars: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0, vars: &vars, len: src.len() };
    if p.peek().is_none() {
        return p.err("empty expression");
    }
    let r = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    r.with_vars(&vars)
}

/// Parses an expression that must be a polynomial.
pub fn parse_poly<S: AsRef<str>>(src: &str, vars: &[S]) -> Result<MultiPoly, ArithError> {
    let r = parse_ratfunc(src, vars)?;
    r.as_polynomial().ok_or(ArithError::Parse { pos: 0, msg: "expected a polynomial".into() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    const B: [&str; 3] = ["b2", "b4", "b6"];

    #[test]
    fn canonical_text_orders_by_grlex() {
        let p = parse_poly("-6*b4*b6 + b2^2*b6 - b2*b4^2", &B).unwrap().scale(&rat(1, 8));
        assert_eq!(p.to_string(), "1/8*b2^2*b6 - 1/8*b2*b4^2 - 3/4*b4*b6");
        assert_eq!(MultiPoly::zero().to_string(), "0");
        assert_eq!(MultiPoly::from_i64(-3).to_string(), "-3");
    }

    #[test]
    fn ratfunc_text() {
        let r = parse_ratfunc("1/(b2 - 2)", &B).unwrap();
        assert_eq!(r.to_string(), "(1)/(b2 - 2)");
        let q = parse_ratfunc("(b2^2 - 4)/(b2 - 2)", &B).unwrap();
        assert_eq!(q.to_string(), "b2 + 2");
    }

    #[test]
    fn parser_precedence_and_powers() {
        let r = parse_ratfunc("-2^2 + 3*b2^-1", &B).unwrap();
        let expect = &RatFunc::constant(int(-4)) + &RatFunc::from_i64(3).try_div(&RatFunc::var("b2")).unwrap();
        assert_eq!(r, expect);
    }

    #[test]
    fn parser_errors() {
        assert!(matches!(parse_ratfunc("b2 +", &B), Err(ArithError::Parse { .. })));
        assert_eq!(parse_ratfunc("x", &B), Err(ArithError::UnknownVariable("x".into())));
        assert!(matches!(parse_ratfunc("1/0", &B), Err(ArithError::Parse { .. })));
        assert!(matches!(parse_poly("1/b2", &B), Err(ArithError::Parse { .. })));
        assert!(matches!(parse_ratfunc("(b2", &B), Err(ArithError::Parse { .. })));
    }

    #[test]
    fn text_round_trip() {
        let r = parse_ratfunc("(b2*b4 - 18*b6)/(2*b2^3 - b6) + 5/7*b4^3", &B).unwrap();
        let back = parse_ratfunc(&r.to_string(), &B).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_string(), r.to_string());
    }
}
