//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr     := term (("+"|"-") term)*
//! term     := factor (("*"|"/") factor)*
//! factor   := base ("^" exponent)?
//! exponent := ["-"] integer | "(" ["-"] integer ["/" integer] ")"
//! base     := number | ident | ident "(" expr ")" | "(" expr ")" | "-" factor
//! ```
//!
//! An identifier followed by `(` is a function symbol; a `_d<k>` suffix
//! selects its `k`-th derivative. Other identifiers resolve to a coordinate
//! or to a named definition.

use std::collections::BTreeMap;

use num::{BigInt, BigRational, One, Zero};

use super::chart::Chart;
use super::expr::Expr;
use crate::error::ParseError;

/// Named expressions that identifiers may refer to.
pub type Definitions = BTreeMap<String, Expr>;

pub fn parse_expr(text: &str, chart: &Chart) -> Result<Expr, ParseError> {
    parse_expr_with(text, chart, &Definitions::new())
}

pub fn parse_expr_with(text: &str, chart: &Chart, defs: &Definitions) -> Result<Expr, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0, chart, defs };
    let e = p.expr()?;
    match p.peek() {
        Tok::End => Ok(e),
        _ => Err(p.error("unexpected trailing input")),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Num(BigRational),
    Int(BigInt),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, column);
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            column += 1;
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let int_part: String = chars[start..i].iter().collect();
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                let fs = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let frac: String = chars[fs..i].iter().collect();
                let digits = format!("{int_part}{frac}");
                let n: BigInt = digits.parse().unwrap_or_else(|_| BigInt::zero());
                let d = num::pow::pow(BigInt::from(10), frac.len());
                Tok::Num(BigRational::new(n, d))
            } else {
                Tok::Int(int_part.parse().expect("digits"))
            }
        } else if c.is_ascii_alphabetic() {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if "+-*/^()".contains(c) {
            i += 1;
            Tok::Sym(c)
        } else {
            return Err(ParseError::Syntax { line: tl, column: tc, message: format!("unexpected character {c:?}") });
        };
        column += i - start;
        out.push(Token { tok, line: tl, column: tc });
    }
    out.push(Token { tok: Tok::End, line, column });
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    chart: &'a Chart,
    defs: &'a Definitions,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: &str) -> ParseError {
        let t = &self.tokens[self.pos];
        let found = match &t.tok {
            Tok::End => "end of input".to_string(),
            Tok::Sym(c) => format!("{c:?}"),
            Tok::Ident(s) => format!("identifier {s:?}"),
            Tok::Int(n) => n.to_string(),
            Tok::Num(n) => n.to_string(),
        };
        ParseError::Syntax { line: t.line, column: t.column, message: format!("{message}, found {found}") }
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected {c:?}")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat('+') {
                terms.push(self.term()?);
            } else if self.eat('-') {
                terms.push(-self.term()?);
            } else {
                return Ok(Expr::sum(terms));
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                acc = acc * self.factor()?;
            } else if self.eat('/') {
                acc = acc / self.factor()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            return Ok(-self.factor()?);
        }
        let base = self.base()?;
        if self.eat('^') {
            let exp = self.exponent()?;
            Ok(base.pow(exp))
        } else {
            Ok(base)
        }
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
            let d = if self.eat('/') {
                match self.peek().clone() {
                    Tok::Int(d) if !d.is_zero() => {
                        self.next();
                        d
                    }
                    _ => return Err(self.error("expected a positive denominator")),
                }
            } else {
                BigInt::one()
            };
            self.expect(')')?;
            Ok(BigRational::new(n, d))
        } else {
            Ok(BigRational::from_integer(self.integer()?))
        }
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let tok = self.tokens[self.pos].clone();
        match tok.tok {
            Tok::Int(n) => {
                self.next();
                Ok(Expr::constant(BigRational::from_integer(n)))
            }
            Tok::Num(q) => {
                self.next();
                Ok(Expr::constant(q))
            }
            Tok::Sym('(') => {
                self.next();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.next();
                if self.eat('(') {
                    let arg = self.expr()?;
                    self.expect(')')?;
                    let (sym, order) = split_derivative_suffix(&name);
                    return Ok(Expr::apply_derivative(sym, order, arg));
                }
                if let Some(i) = self.chart.index_of(&name) {
                    return Ok(Expr::var(i));
                }
                if let Some(e) = self.defs.get(&name) {
                    return Ok(e.clone());
                }
                Err(ParseError::UnknownIdentifier { name, line: tok.line, column: tok.column })
            }
            _ => Err(self.error("expected a number, identifier or '('")),
        }
    }
}

/// `V_d2` names the second derivative of `V`.
pub(crate) fn split_derivative_suffix(name: &str) -> (&str, u32) {
    if let Some(pos) = name.rfind("_d") {
        let digits = &name[pos + 2..];
        if pos > 0 && !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit()) {
            if let Ok(k) = digits.parse() {
                return (&name[..pos], k);
            }
        }
    }
    (name, 0)
}
