use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{PolyError, Polynomial, Rational, VarSet};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<Tok>, PolyError> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Tok::Num(text.parse().expect("digits")));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            // `**` is accepted as a synonym for `^`.
            if c == '*' && chars.get(i + 1) == Some(&'*') {
                out.push(Tok::Op('^'));
                i += 2;
            } else {
                out.push(Tok::Op(c));
                i += 1;
            }
        } else {
            return Err(PolyError::Parse(format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    vars: &'a Arc<VarSet>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?)?;
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    // term := unary (('*'|'/') unary)*; division only by nonzero constants
    fn term(&mut self) -> Result<Polynomial, PolyError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?)?;
            } else if self.eat('/') {
                let d = self.unary()?;
                if !d.is_constant() || d.is_zero() {
                    return Err(PolyError::Parse(
                        "division only by nonzero constants".into(),
                    ));
                }
                acc = acc.scale(&(Rational::from_integer(BigInt::from(1)) / d.constant_term()));
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Polynomial, PolyError> {
        if self.eat('-') {
            Ok(self.unary()?.neg())
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Polynomial, PolyError> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.toks.get(self.pos).cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    let e: u32 = n
                        .try_into()
                        .map_err(|_| PolyError::Parse("exponent too large".into()))?;
                    base.pow(e)
                }
                _ => Err(PolyError::Parse("exponent must be a non-negative integer".into())),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Polynomial, PolyError> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Polynomial::constant(self.vars, Rational::from_integer(n)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Polynomial::var(self.vars, &name)
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(PolyError::Parse("missing `)`".into()));
                }
                Ok(inner)
            }
            Some(t) => Err(PolyError::Parse(format!("unexpected token {t:?}"))),
            None => Err(PolyError::Parse("unexpected end of input".into())),
        }
    }
}

impl Polynomial {
    /// Parses an arithmetic expression over `vars`: integers, variable
    /// names, `+ - * /` (division by constants), `^` or `**` with integer
    /// exponents, and parentheses.
    pub fn parse(vars: &Arc<VarSet>, text: &str) -> Result<Polynomial, PolyError> {
        let toks = lex(text)?;
        if toks.is_empty() {
            return Ok(Polynomial::zero(vars));
        }
        let mut p = Parser { toks, pos: 0, vars };
        let out = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(PolyError::Parse(format!(
                "trailing input at token {}",
                p.pos
            )));
        }
        debug_assert!(out.terms().all(|(_, c)| !c.is_zero()));
        Ok(out)
    }
}
