use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use super::chart::Chart;
use super::poly::{Kernel, Var};
use super::ratfunc::{rational_power, RatFunc};

/// Node of an expression tree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExprKind {
    /// Exact rational constant, always in lowest terms.
    Const(BigRational),
    /// Coordinate, by index into the chart.
    Var(u16),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Expr, BigRational),
    /// `name^(order)(arg)`: the `order`-th derivative of a unary function
    /// symbol.
    Apply { name: Arc<str>, order: u32, arg: Expr },
}

struct Inner {
    kind: ExprKind,
    normal: OnceLock<Arc<RatFunc>>,
}

/// Immutable scalar expression.
///
/// Cloning is cheap. Arithmetic operators build trees without simplifying;
/// call [`Expr::simplify`] to obtain the canonical form.
#[derive(Clone)]
pub struct Expr(Arc<Inner>);

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.kind == other.0.kind
    }
}

impl Eq for Expr {}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0.kind.cmp(&other.0.kind)
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display(&Chart::anonymous()))
    }
}

impl Expr {
    fn from_kind(kind: ExprKind) -> Expr {
        Expr(Arc::new(Inner { kind, normal: OnceLock::new() }))
    }

    pub fn kind(&self) -> &ExprKind {
        &self.0.kind
    }

    pub fn constant(c: BigRational) -> Expr {
        Expr::from_kind(ExprKind::Const(c))
    }

    pub fn int(n: i64) -> Expr {
        Expr::constant(BigRational::from_integer(n.into()))
    }

    pub fn rational(n: i64, d: i64) -> Expr {
        Expr::constant(BigRational::new(n.into(), d.into()))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    /// Coordinate with the given chart index.
    pub fn var(index: usize) -> Expr {
        let i = u16::try_from(index).expect("coordinate index fits in u16");
        Expr::from_kind(ExprKind::Var(i))
    }

    /// Application of a function symbol to an argument.
    pub fn apply(name: &str, arg: Expr) -> Expr {
        Expr::apply_raw(Arc::from(name), 0, arg)
    }

    /// Application of the `order`-th derivative of a function symbol.
    pub fn apply_derivative(name: &str, order: u32, arg: Expr) -> Expr {
        Expr::apply_raw(Arc::from(name), order, arg)
    }

    pub(crate) fn apply_raw(name: Arc<str>, order: u32, arg: Expr) -> Expr {
        Expr::from_kind(ExprKind::Apply { name, order, arg })
    }

    pub(crate) fn sum_raw(terms: Vec<Expr>) -> Expr {
        Expr::from_kind(ExprKind::Sum(terms))
    }

    pub(crate) fn product_raw(factors: Vec<Expr>) -> Expr {
        Expr::from_kind(ExprKind::Product(factors))
    }

    pub(crate) fn pow_raw(base: Expr, exp: BigRational) -> Expr {
        Expr::from_kind(ExprKind::Pow(base, exp))
    }

    pub(crate) fn with_normal(self, normal: Arc<RatFunc>) -> Expr {
        // A freshly built canonical tree has an empty cache.
        let _ = self.0.normal.set(normal);
        self
    }

    /// `self^exp` for a rational exponent.
    pub fn pow(&self, exp: BigRational) -> Expr {
        if exp.is_one() {
            return self.clone();
        }
        Expr::pow_raw(self.clone(), exp)
    }

    pub fn powi(&self, exp: i64) -> Expr {
        self.pow(BigRational::from_integer(exp.into()))
    }

    /// Square root, as the rational power 1/2.
    pub fn sqrt(&self) -> Expr {
        self.pow(BigRational::new(BigInt::one(), BigInt::from(2)))
    }

    /// Sum of an arbitrary list of expressions (empty sum is zero).
    pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        let mut out = Vec::new();
        for t in terms {
            match t.kind() {
                ExprKind::Const(c) if c.is_zero() => {}
                ExprKind::Sum(inner) => out.extend(inner.iter().cloned()),
                _ => out.push(t),
            }
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => Expr::sum_raw(out),
        }
    }

    /// Product of an arbitrary list of expressions (empty product is one).
    pub fn product<I: IntoIterator<Item = Expr>>(factors: I) -> Expr {
        let mut out = Vec::new();
        for t in factors {
            match t.kind() {
                ExprKind::Const(c) if c.is_one() => {}
                ExprKind::Const(c) if c.is_zero() => return Expr::zero(),
                ExprKind::Product(inner) => out.extend(inner.iter().cloned()),
                _ => out.push(t),
            }
        }
        match out.len() {
            0 => Expr::one(),
            1 => out.pop().unwrap(),
            _ => Expr::product_raw(out),
        }
    }

    pub(crate) fn normal(&self) -> Arc<RatFunc> {
        if let Some(n) = self.0.normal.get() {
            return n.clone();
        }
        let n = Arc::new(self.compute_normal());
        let _ = self.0.normal.set(n.clone());
        self.0.normal.get().cloned().unwrap_or(n)
    }

    fn compute_normal(&self) -> RatFunc {
        match self.kind() {
            ExprKind::Const(c) => RatFunc::constant(c.clone()),
            ExprKind::Var(i) => RatFunc::var(Var::Coord(*i)),
            ExprKind::Sum(terms) => {
                let mut acc = RatFunc::zero();
                for t in terms {
                    acc = acc.add(&t.normal());
                }
                acc
            }
            ExprKind::Product(factors) => {
                let mut acc = RatFunc::constant(BigRational::one());
                for f in factors {
                    acc = acc.mul(&f.normal());
                    if acc.is_zero() {
                        break;
                    }
                }
                acc
            }
            ExprKind::Pow(base, exp) => rational_power(base, exp),
            ExprKind::Apply { name, order, arg } => {
                let kernel = Kernel::Apply { name: name.clone(), order: *order, arg: arg.simplify() };
                RatFunc::var(Var::Kernel(Arc::new(kernel)))
            }
        }
    }

    /// Canonical form: expanded, collected, sorted monomials over a single
    /// reduced denominator. Idempotent.
    pub fn simplify(&self) -> Expr {
        let n = self.normal();
        let out = n.to_expr();
        if out == *self {
            return self.clone();
        }
        out
    }

    /// Exact structural test for zero after normalization.
    pub fn is_exactly_zero(&self) -> bool {
        self.normal().is_zero()
    }

    /// The constant value, if the expression normalizes to a rational.
    pub fn as_constant(&self) -> Option<BigRational> {
        self.normal().as_constant()
    }

    /// True when the expression is a polynomial/rational function of the
    /// coordinates, with no function symbols or radicals.
    pub fn is_rational_class(&self) -> bool {
        !self.normal().has_kernels()
    }

    /// Partial derivative with respect to the coordinate with the given
    /// index; the result is canonical.
    pub fn derivative(&self, index: usize) -> Expr {
        let i = u16::try_from(index).expect("coordinate index fits in u16");
        Arc::new(self.normal().diff(i)).to_expr()
    }

    /// Largest coordinate index referenced anywhere in the tree.
    pub fn max_var(&self) -> Option<usize> {
        match self.kind() {
            ExprKind::Const(_) => None,
            ExprKind::Var(i) => Some(*i as usize),
            ExprKind::Sum(xs) | ExprKind::Product(xs) => xs.iter().filter_map(|x| x.max_var()).max(),
            ExprKind::Pow(b, _) => b.max_var(),
            ExprKind::Apply { arg, .. } => arg.max_var(),
        }
    }

    /// Names of every function symbol in the tree.
    pub fn function_symbols(&self, out: &mut std::collections::BTreeSet<String>) {
        match self.kind() {
            ExprKind::Const(_) | ExprKind::Var(_) => {}
            ExprKind::Sum(xs) | ExprKind::Product(xs) => xs.iter().for_each(|x| x.function_symbols(out)),
            ExprKind::Pow(b, _) => b.function_symbols(out),
            ExprKind::Apply { name, arg, .. } => {
                out.insert(name.to_string());
                arg.function_symbols(out);
            }
        }
    }

    /// Replaces coordinate `index` by `value` everywhere.
    pub fn substitute(&self, index: usize, value: &Expr) -> Expr {
        match self.kind() {
            ExprKind::Const(_) => self.clone(),
            ExprKind::Var(i) => {
                if *i as usize == index {
                    value.clone()
                } else {
                    self.clone()
                }
            }
            ExprKind::Sum(xs) => Expr::sum_raw(xs.iter().map(|x| x.substitute(index, value)).collect()),
            ExprKind::Product(xs) => {
                Expr::product_raw(xs.iter().map(|x| x.substitute(index, value)).collect())
            }
            ExprKind::Pow(b, e) => Expr::pow_raw(b.substitute(index, value), e.clone()),
            ExprKind::Apply { name, order, arg } => {
                Expr::apply_raw(name.clone(), *order, arg.substitute(index, value))
            }
        }
    }

    pub fn display<'a>(&'a self, chart: &'a Chart) -> ExprDisplay<'a> {
        ExprDisplay { expr: self, chart }
    }

    pub(crate) fn negative_coefficient(&self) -> bool {
        match self.kind() {
            ExprKind::Const(c) => c.is_negative(),
            ExprKind::Product(fs) => fs.first().is_some_and(|f| f.negative_coefficient()),
            _ => false,
        }
    }

    pub(crate) fn negated(&self) -> Expr {
        match self.kind() {
            ExprKind::Const(c) => Expr::constant(-c),
            ExprKind::Product(fs) => {
                let mut fs = fs.clone();
                fs[0] = fs[0].negated();
                if let ExprKind::Const(c) = fs[0].kind() {
                    if c.is_one() {
                        fs.remove(0);
                    }
                }
                if fs.len() == 1 {
                    fs.pop().unwrap()
                } else {
                    Expr::product_raw(fs)
                }
            }
            _ => Expr::product_raw(vec![Expr::int(-1), self.clone()]),
        }
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                self.$method(rhs.clone())
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                self.clone().$method(rhs)
            }
        }
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                self.clone().$method(rhs.clone())
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::sum([a, b]));
binop!(Sub, sub, |a, b| Expr::sum([a, -b]));
binop!(Mul, mul, |a, b| Expr::product([a, b]));
binop!(Div, div, |a, b| Expr::product([a, b.powi(-1)]));

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self.kind() {
            ExprKind::Const(c) => Expr::constant(-c),
            _ => Expr::product([Expr::int(-1), self]),
        }
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -self.clone()
    }
}

/// Prints an expression in the parser's grammar using the chart's
/// coordinate names.
pub struct ExprDisplay<'a> {
    expr: &'a Expr,
    chart: &'a Chart,
}

#[derive(Clone, Copy, PartialEq, PartialOrd)]
enum Prec {
    Sum,
    Product,
    Power,
    Atom,
}

impl ExprDisplay<'_> {
    fn write(&self, e: &Expr, f: &mut fmt::Formatter<'_>, ctx: Prec) -> fmt::Result {
        let own = precedence(e);
        if own < ctx {
            write!(f, "(")?;
            self.write_bare(e, f)?;
            write!(f, ")")
        } else {
            self.write_bare(e, f)
        }
    }

    fn write_bare(&self, e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match e.kind() {
            ExprKind::Const(c) => write_rational(c, f),
            ExprKind::Var(i) => write!(f, "{}", self.chart.coord_name(*i as usize)),
            ExprKind::Sum(terms) => {
                for (k, t) in terms.iter().enumerate() {
                    if k == 0 {
                        self.write(t, f, Prec::Sum)?;
                    } else if t.negative_coefficient() {
                        write!(f, " - ")?;
                        self.write(&t.negated(), f, Prec::Product)?;
                    } else {
                        write!(f, " + ")?;
                        self.write(t, f, Prec::Product)?;
                    }
                }
                Ok(())
            }
            ExprKind::Product(factors) => self.write_product(factors, f),
            ExprKind::Pow(base, exp) => {
                if exp.is_negative() {
                    write!(f, "1/")?;
                    return self.write_power(base, &-exp, f);
                }
                self.write_power(base, exp, f)
            }
            ExprKind::Apply { name, order, arg } => {
                write!(f, "{name}")?;
                if *order > 0 {
                    write!(f, "_d{order}")?;
                }
                write!(f, "(")?;
                self.write(arg, f, Prec::Sum)?;
                write!(f, ")")
            }
        }
    }

    fn write_power(&self, base: &Expr, exp: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(base, f, Prec::Atom)?;
        if exp.is_one() {
            return Ok(());
        }
        if exp.is_integer() {
            write!(f, "^{}", exp.numer())
        } else {
            write!(f, "^({}/{})", exp.numer(), exp.denom())
        }
    }

    fn write_product(&self, factors: &[Expr], f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut numer: Vec<&Expr> = Vec::new();
        let mut denom: Vec<(&Expr, BigRational)> = Vec::new();
        let mut coeff: Option<&BigRational> = None;
        for (k, x) in factors.iter().enumerate() {
            match x.kind() {
                ExprKind::Const(c) if k == 0 => coeff = Some(c),
                ExprKind::Pow(b, e) if e.is_negative() => denom.push((b, -e)),
                _ => numer.push(x),
            }
        }
        let mut first = true;
        if let Some(c) = coeff {
            if c == &-BigRational::one() && !numer.is_empty() {
                write!(f, "-")?;
            } else if !(c.is_one() && !numer.is_empty()) {
                if c.is_integer() {
                    write_rational(c, f)?;
                } else {
                    // Keep `a/b*x` unambiguous when read back left to right.
                    write!(f, "{}/{}", c.numer(), c.denom())?;
                }
                first = false;
            }
        }
        for x in &numer {
            if !first {
                write!(f, "*")?;
            }
            self.write(x, f, Prec::Power)?;
            first = false;
        }
        if first {
            write!(f, "1")?;
        }
        for (b, e) in denom {
            write!(f, "/")?;
            if e.is_one() {
                self.write(b, f, Prec::Power)?;
            } else {
                self.write_power(b, &e, f)?;
            }
        }
        Ok(())
    }
}

fn precedence(e: &Expr) -> Prec {
    match e.kind() {
        ExprKind::Const(c) => {
            if c.is_integer() && !c.is_negative() {
                Prec::Atom
            } else {
                Prec::Product
            }
        }
        ExprKind::Var(_) | ExprKind::Apply { .. } => Prec::Atom,
        ExprKind::Sum(_) => Prec::Sum,
        ExprKind::Product(_) => Prec::Product,
        ExprKind::Pow(_, e) => {
            if e.is_negative() {
                Prec::Product
            } else {
                Prec::Power
            }
        }
    }
}

fn write_rational(c: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.expr, f, Prec::Sum)
    }
}

/// Converts an `f64` to the nearest exact rational (binary expansion).
pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

pub(crate) fn to_f64(c: &BigRational) -> f64 {
    c.to_f64().unwrap_or(f64::NAN)
}
