//! Form literals: the expression grammar extended with basis covectors
//! `d<coord>`, the exterior derivative `d(...)`, named forms, and `^` as the
//! wedge product whenever either side is a form.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::{BigInt, BigRational, One};

use super::KForm;
use crate::error::{GeometryError, ParseError};
use crate::symexpr::{split_derivative_suffix, tokenize, Chart, Definitions, Expr, Tok, Token};

/// Names visible to form literals.
#[derive(Clone, Debug, Default)]
pub struct Namespace {
    pub scalars: Definitions,
    pub forms: BTreeMap<String, KForm>,
}

pub fn parse_form(text: &str, chart: &Arc<Chart>) -> Result<KForm, ParseError> {
    parse_form_with(text, chart, &Namespace::default())
}

pub fn parse_form_with(text: &str, chart: &Arc<Chart>, ns: &Namespace) -> Result<KForm, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = FormParser { tokens, pos: 0, chart, ns };
    let v = p.sum()?;
    if p.peek() != &Tok::End {
        return Err(p.error("unexpected trailing input"));
    }
    p.finish_form(v)
}

#[derive(Clone)]
enum Val {
    Scalar(Expr),
    Form(KForm),
}

struct FormParser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    chart: &'a Arc<Chart>,
    ns: &'a Namespace,
}

impl FormParser<'_> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.tokens[(self.pos + k).min(self.tokens.len() - 1)].tok
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.next();
            true
        } else {
            false
        }
    }

    fn error(&self, message: &str) -> ParseError {
        let t = &self.tokens[self.pos];
        ParseError::Syntax { line: t.line, column: t.column, message: message.to_string() }
    }

    fn geometry(&self, e: GeometryError) -> ParseError {
        self.error(&e.to_string())
    }

    fn finish_form(&self, v: Val) -> Result<KForm, ParseError> {
        match v {
            Val::Form(f) => Ok(f),
            Val::Scalar(e) => KForm::function(self.chart, e).map_err(|e| self.geometry(e)),
        }
    }

    fn add(&self, a: Val, b: Val, negate: bool) -> Result<Val, ParseError> {
        match (a, b) {
            (Val::Scalar(x), Val::Scalar(y)) => Ok(Val::Scalar(if negate { x - y } else { x + y })),
            (a, b) => {
                let (fa, fb) = (self.finish_form(a)?, self.finish_form(b)?);
                let r = if negate { fa.sub(&fb) } else { fa.add(&fb) };
                r.map(Val::Form).map_err(|e| self.geometry(e))
            }
        }
    }

    fn mul(&self, a: Val, b: Val) -> Result<Val, ParseError> {
        match (a, b) {
            (Val::Scalar(x), Val::Scalar(y)) => Ok(Val::Scalar(x * y)),
            (Val::Scalar(x), Val::Form(f)) | (Val::Form(f), Val::Scalar(x)) => Ok(Val::Form(f.scale(&x))),
            (Val::Form(f), Val::Form(g)) => f.wedge(&g).map(Val::Form).map_err(|e| self.geometry(e)),
        }
    }

    fn sum(&mut self) -> Result<Val, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                let t = self.term()?;
                acc = self.add(acc, t, false)?;
            } else if self.eat('-') {
                let t = self.term()?;
                acc = self.add(acc, t, true)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Val, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                let f = self.factor()?;
                acc = self.mul(acc, f)?;
            } else if self.eat('/') {
                match self.factor()? {
                    Val::Scalar(y) => acc = self.mul(acc, Val::Scalar(Expr::one() / y))?,
                    Val::Form(_) => return Err(self.error("cannot divide by a form")),
                }
            } else {
                return Ok(acc);
            }
        }
    }

    fn looks_like_exponent(&self) -> bool {
        match self.peek() {
            Tok::Int(_) => true,
            Tok::Sym('-') => matches!(self.peek_at(1), Tok::Int(_)),
            Tok::Sym('(') => match self.peek_at(1) {
                Tok::Int(_) => matches!(self.peek_at(2), Tok::Sym(')') | Tok::Sym('/')),
                Tok::Sym('-') => matches!(self.peek_at(2), Tok::Int(_)),
                _ => false,
            },
            _ => false,
        }
    }

    fn factor(&mut self) -> Result<Val, ParseError> {
        if self.eat('-') {
            let v = self.factor()?;
            return self.mul(Val::Scalar(Expr::int(-1)), v);
        }
        let mut acc = self.base()?;
        while self.eat('^') {
            if matches!(acc, Val::Scalar(_)) && self.looks_like_exponent() {
                let exp = self.exponent()?;
                if let Val::Scalar(e) = acc {
                    acc = Val::Scalar(e.pow(exp));
                }
            } else {
                let rhs = self.base()?;
                let (fa, fb) = (self.finish_form(acc)?, self.finish_form(rhs)?);
                acc = Val::Form(fa.wedge(&fb).map_err(|e| self.geometry(e))?);
            }
        }
        Ok(acc)
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        let neg = self.eat('-');
        match self.peek().clone() {
            Tok::Int(n) => {
                self.next();
                Ok(if neg { -n } else { n })
            }
            _ => Err(self.error("expected an integer exponent")),
        }
    }

    fn exponent(&mut self) -> Result<BigRational, ParseError> {
        if self.eat('(') {
            let n = self.integer()?;
            let d = if self.eat('/') { self.integer()? } else { BigInt::one() };
            if d == BigInt::from(0) {
                return Err(self.error("zero denominator in exponent"));
            }
            if !self.eat(')') {
                return Err(self.error("expected ')'"));
            }
            Ok(BigRational::new(n, d))
        } else {
            Ok(BigRational::from_integer(self.integer()?))
        }
    }

    fn base(&mut self) -> Result<Val, ParseError> {
        let tok = self.tokens[self.pos].clone();
        match tok.tok {
            Tok::Int(n) => {
                self.next();
                Ok(Val::Scalar(Expr::constant(BigRational::from_integer(n))))
            }
            Tok::Num(q) => {
                self.next();
                Ok(Val::Scalar(Expr::constant(q)))
            }
            Tok::Sym('(') => {
                self.next();
                let v = self.sum()?;
                if !self.eat(')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(v)
            }
            Tok::Sym('-') => self.factor(),
            Tok::Ident(name) => {
                self.next();
                if self.eat('(') {
                    let inner = self.sum()?;
                    if !self.eat(')') {
                        return Err(self.error("expected ')'"));
                    }
                    if name == "d" {
                        let f = self.finish_form(inner)?;
                        return Ok(Val::Form(f.d()));
                    }
                    let Val::Scalar(arg) = inner else {
                        return Err(self.error("function argument must be a scalar"));
                    };
                    let (sym, order) = split_derivative_suffix(&name);
                    return Ok(Val::Scalar(Expr::apply_derivative(sym, order, arg)));
                }
                if let Some(i) = self.chart.index_of(&name) {
                    return Ok(Val::Scalar(Expr::var(i)));
                }
                if let Some(e) = self.ns.scalars.get(&name) {
                    return Ok(Val::Scalar(e.clone()));
                }
                if let Some(f) = self.ns.forms.get(&name) {
                    return Ok(Val::Form(f.clone()));
                }
                if let Some(rest) = name.strip_prefix('d') {
                    if let Some(i) = self.chart.index_of(rest) {
                        return Ok(Val::Form(KForm::basis(self.chart, i)));
                    }
                    if let Some(e) = self.ns.scalars.get(rest) {
                        let f = KForm::function(self.chart, e.clone()).map_err(|e| self.geometry(e))?;
                        return Ok(Val::Form(f.d()));
                    }
                }
                Err(ParseError::UnknownIdentifier { name, line: tok.line, column: tok.column })
            }
            _ => Err(self.error("expected a number, identifier, form or '('")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symplectic_literal() {
        let c = Chart::new("m", ["q1", "q2", "p1", "p2"]).unwrap();
        let w = parse_form("dp1^dq1 + dp2^dq2", &c).unwrap();
        assert_eq!(w.degree(), 2);
        assert_eq!(w.coefficient(&[0, 2]).as_constant(), Expr::int(-1).as_constant());
        let v = parse_form("q1^2*dq1 - d(q1*p1)", &c).unwrap();
        assert_eq!(v.coefficient(&[2]).simplify(), (-Expr::var(0)).simplify());
        assert!(parse_form("dq1^", &c).is_err());
        assert!(matches!(parse_form("dz", &c), Err(ParseError::UnknownIdentifier { .. })));
        assert!(parse_form("dq1 + dq1^dq2", &c).is_err());
    }
}
