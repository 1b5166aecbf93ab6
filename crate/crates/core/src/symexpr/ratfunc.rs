//! Canonical normal form: a reduced quotient of polynomials in coordinates
//! and kernels.
//!
//! Radical kernels `b^(1/d)` have their powers reduced modulo `d`, which also
//! rationalizes negative powers of a single radical. For the pure
//! polynomial/rational subclass the form is unique.

use std::sync::Arc;

use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};

use super::expr::{Expr, ExprKind};
use super::poly::{gcd, Kernel, Monomial, Poly, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub(crate) fn zero() -> Self {
        RatFunc { num: Poly::zero(), den: Poly::one() }
    }

    pub(crate) fn constant(c: BigRational) -> Self {
        RatFunc { num: Poly::constant(c), den: Poly::one() }
    }

    pub(crate) fn from_poly(p: Poly) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    pub(crate) fn var(v: Var) -> Self {
        RatFunc::from_poly(Poly::var(v))
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub(crate) fn as_constant(&self) -> Option<BigRational> {
        if self.num.is_constant() && self.den.is_one() {
            Some(self.num.constant_value())
        } else {
            None
        }
    }

    pub(crate) fn has_kernels(&self) -> bool {
        self.num.has_kernels() || self.den.has_kernels()
    }

    /// Builds `num / den`, cancelling common factors.
    fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator in normal form");
        if num.is_zero() {
            return RatFunc::zero();
        }
        if den.is_constant() {
            let inv = den.constant_value().recip();
            return RatFunc { num: num.scale(&inv), den: Poly::one() };
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        RatFunc::normalized(num, den)
    }

    /// Scales so the denominator's leading coefficient is one. Assumes the
    /// pair is already coprime.
    fn normalized(num: Poly, den: Poly) -> Self {
        let lc = den.leading().map(|(_, c)| c.clone()).unwrap_or_else(BigRational::one);
        if lc.is_one() {
            return RatFunc { num, den };
        }
        let inv = lc.recip();
        if den.is_constant() {
            return RatFunc { num: num.scale(&inv), den: Poly::one() };
        }
        RatFunc { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub(crate) fn add(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && other.den.is_one() {
            return RatFunc::from_poly(self.num.add(&other.num));
        }
        if self.den == other.den {
            return RatFunc::new(self.num.add(&other.num), self.den.clone());
        }
        if other.den.is_one() {
            return RatFunc::new(self.num.add(&other.num.mul(&self.den)), self.den.clone());
        }
        if self.den.is_one() {
            return RatFunc::new(self.num.mul(&other.den).add(&other.num), other.den.clone());
        }
        let g = gcd(&self.den, &other.den);
        let a = self.den.div_exact(&g).expect("gcd divides");
        let b = other.den.div_exact(&g).expect("gcd divides");
        let num = self.num.mul(&b).add(&other.num.mul(&a));
        RatFunc::new(num, self.den.mul(&b))
    }

    pub(crate) fn neg(&self) -> RatFunc {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    pub(crate) fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub(crate) fn scale(&self, c: &BigRational) -> RatFunc {
        if c.is_zero() {
            return RatFunc::zero();
        }
        RatFunc { num: self.num.scale(c), den: self.den.clone() }
    }

    pub(crate) fn mul(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() || other.is_zero() {
            return RatFunc::zero();
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        let out = if self.den.is_one() && other.den.is_one() {
            RatFunc::from_poly(self.num.mul(&other.num))
        } else {
            let (n1, d2) = cancel(&self.num, &other.den);
            let (n2, d1) = cancel(&other.num, &self.den);
            RatFunc::normalized(n1.mul(&n2), d1.mul(&d2))
        };
        out.reduce_roots()
    }

    pub(crate) fn inv(&self) -> Option<RatFunc> {
        if self.is_zero() {
            return None;
        }
        Some(RatFunc::normalized(self.den.clone(), self.num.clone()))
    }

    pub(crate) fn pow_int(&self, exp: i64) -> Option<RatFunc> {
        if exp == 0 {
            return Some(RatFunc::constant(BigRational::one()));
        }
        let base = if exp < 0 { self.inv()? } else { self.clone() };
        let e = exp.unsigned_abs() as u32;
        let out = RatFunc { num: base.num.pow(e), den: base.den.pow(e) };
        Some(out.reduce_roots())
    }

    fn needs_root_reduction(p: &Poly) -> bool {
        p.terms().any(|(m, _)| {
            m.factors().iter().any(|(v, e)| match v {
                Var::Kernel(k) => matches!(**k, Kernel::Root { denom, .. } if *e >= denom),
                Var::Coord(_) => false,
            })
        })
    }

    fn reduce_roots(self) -> RatFunc {
        let n = RatFunc::needs_root_reduction(&self.num);
        let d = RatFunc::needs_root_reduction(&self.den);
        if !n && !d {
            return self;
        }
        let num = if n { reduce_poly(&self.num) } else { RatFunc::from_poly(self.num) };
        let den = if d { reduce_poly(&self.den) } else { RatFunc::from_poly(self.den) };
        num.mul(&den.inv().expect("reduced denominator is nonzero"))
    }

    /// Partial derivative with respect to a coordinate, applying the chain
    /// rule through kernels.
    pub(crate) fn diff(&self, coord: u16) -> RatFunc {
        let dn = poly_diff(&self.num, coord);
        if self.den.is_one() {
            return dn;
        }
        let dd = poly_diff(&self.den, coord);
        let den = RatFunc::from_poly(self.den.clone());
        let num = RatFunc::from_poly(self.num.clone());
        // (n' d - n d') / d^2
        let top = dn.mul(&den).sub(&num.mul(&dd));
        top.mul(&den.pow_int(-2).expect("nonzero denominator"))
    }

    pub(crate) fn depends_on(&self, coord: u16) -> bool {
        poly_depends_on(&self.num, coord) || poly_depends_on(&self.den, coord)
    }

    pub(crate) fn to_expr(self: &Arc<Self>) -> Expr {
        let num = poly_to_expr(&self.num);
        let out = if self.den.is_one() {
            num
        } else {
            let den = poly_to_expr(&self.den);
            let inv = Expr::pow_raw(den, BigRational::from_integer((-1).into()));
            match num.kind() {
                ExprKind::Const(c) if c.is_one() => inv,
                ExprKind::Product(fs) => {
                    let mut fs = fs.clone();
                    fs.push(inv);
                    Expr::product_raw(fs)
                }
                _ => Expr::product_raw(vec![num, inv]),
            }
        };
        out.with_normal(self.clone())
    }
}

fn cancel(num: &Poly, den: &Poly) -> (Poly, Poly) {
    if den.is_one() {
        return (num.clone(), den.clone());
    }
    let g = gcd(num, den);
    if g.is_one() {
        (num.clone(), den.clone())
    } else {
        (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
    }
}

fn reduce_poly(p: &Poly) -> RatFunc {
    let mut acc = RatFunc::zero();
    for (m, c) in p.terms() {
        let mut plain = Monomial::one();
        let mut factor = RatFunc::constant(c.clone());
        for (v, e) in m.factors() {
            match v {
                Var::Kernel(k) => match &**k {
                    Kernel::Root { base, denom } if *e >= *denom => {
                        let (q, r) = e.div_rem(denom);
                        let b = base.normal();
                        factor = factor.mul(&b.pow_int(q as i64).expect("radical base is nonzero"));
                        plain = plain.mul(&Monomial::var(v.clone(), r));
                    }
                    _ => plain = plain.mul(&Monomial::var(v.clone(), *e)),
                },
                Var::Coord(_) => plain = plain.mul(&Monomial::var(v.clone(), *e)),
            }
        }
        let term = RatFunc::from_poly(Poly::term(plain, BigRational::one()));
        acc = acc.add(&factor.mul(&term));
    }
    acc
}

fn kernel_depends_on(k: &Kernel, coord: u16) -> bool {
    match k {
        Kernel::Apply { arg, .. } => arg.normal().depends_on(coord),
        Kernel::Root { base, .. } => base.normal().depends_on(coord),
        Kernel::Opaque(_) => false,
    }
}

fn poly_depends_on(p: &Poly, coord: u16) -> bool {
    p.vars().iter().any(|v| match v {
        Var::Coord(i) => *i == coord,
        Var::Kernel(k) => kernel_depends_on(k, coord),
    })
}

fn kernel_diff(k: &Arc<Kernel>, coord: u16) -> RatFunc {
    match &**k {
        Kernel::Apply { name, order, arg } => {
            let inner = arg.normal().diff(coord);
            if inner.is_zero() {
                return RatFunc::zero();
            }
            let next = Kernel::Apply { name: name.clone(), order: order + 1, arg: arg.clone() };
            RatFunc::var(Var::Kernel(Arc::new(next))).mul(&inner)
        }
        Kernel::Root { base, denom } => {
            let b = base.normal();
            let db = b.diff(coord);
            if db.is_zero() {
                return RatFunc::zero();
            }
            // d(b^(1/n)) = (1/n) b^(1/n) b' / b
            let this = RatFunc::var(Var::Kernel(k.clone()));
            let scale = BigRational::new(BigInt::one(), BigInt::from(*denom));
            this.mul(&db)
                .mul(&b.inv().expect("radical base is nonzero"))
                .scale(&scale)
        }
        Kernel::Opaque(_) => RatFunc::zero(),
    }
}

fn poly_diff(p: &Poly, coord: u16) -> RatFunc {
    let mut out = RatFunc::from_poly(p.partial(&Var::Coord(coord)));
    for v in p.vars() {
        if let Var::Kernel(k) = &v {
            if !kernel_depends_on(k, coord) {
                continue;
            }
            let dk = kernel_diff(k, coord);
            if dk.is_zero() {
                continue;
            }
            let dp = RatFunc::from_poly(p.partial(&v));
            out = out.add(&dp.mul(&dk));
        }
    }
    out
}

fn poly_to_expr(p: &Poly) -> Expr {
    if p.is_zero() {
        return Expr::constant(BigRational::zero());
    }
    let mut terms = Vec::with_capacity(p.len());
    for (m, c) in p.terms().rev() {
        let mut factors = Vec::with_capacity(m.factors().len() + 1);
        if !c.is_one() || m.is_one() {
            factors.push(Expr::constant(c.clone()));
        }
        for (v, e) in m.factors() {
            factors.push(var_power_expr(v, *e));
        }
        terms.push(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Expr::product_raw(factors)
        });
    }
    if terms.len() == 1 {
        terms.pop().unwrap()
    } else {
        Expr::sum_raw(terms)
    }
}

fn var_power_expr(v: &Var, e: u32) -> Expr {
    match v {
        Var::Coord(i) => {
            let x = Expr::var(*i as usize);
            if e == 1 {
                x
            } else {
                Expr::pow_raw(x, BigRational::from_integer(e.into()))
            }
        }
        Var::Kernel(k) => match &**k {
            Kernel::Apply { name, order, arg } => {
                let app = Expr::apply_raw(name.clone(), *order, arg.clone());
                if e == 1 {
                    app
                } else {
                    Expr::pow_raw(app, BigRational::from_integer(e.into()))
                }
            }
            Kernel::Root { base, denom } => Expr::pow_raw(
                base.clone(),
                BigRational::new(BigInt::from(e), BigInt::from(*denom)),
            ),
            Kernel::Opaque(x) => {
                if e == 1 {
                    x.clone()
                } else {
                    Expr::pow_raw(x.clone(), BigRational::from_integer(e.into()))
                }
            }
        },
    }
}

/// Exact `d`-th root of a nonnegative rational, when one exists.
fn exact_root(c: &BigRational, d: u32) -> Option<BigRational> {
    if c.is_negative() {
        return None;
    }
    let n = c.numer().nth_root(d);
    let m = c.denom().nth_root(d);
    if num::pow(n.clone(), d as usize) == *c.numer() && num::pow(m.clone(), d as usize) == *c.denom() {
        Some(BigRational::new(n, m))
    } else {
        None
    }
}

/// Normal form of `base^exp` for a rational exponent.
pub(crate) fn rational_power(base: &Expr, exp: &BigRational) -> RatFunc {
    let b = base.normal();
    if exp.is_integer() {
        let e = exp.to_integer().to_i64().expect("exponent fits in i64");
        return b.pow_int(e).unwrap_or_else(|| singular_power(base, exp));
    }
    let denom = exp.denom().to_u32().expect("radical index fits in u32");
    let numer = exp.numer().to_i64().expect("exponent fits in i64");
    if let Some(c) = b.as_constant() {
        if let Some(root) = exact_root(&c, denom) {
            if let Some(v) = RatFunc::constant(root).pow_int(numer) {
                return v;
            }
        }
    }
    if b.is_zero() && numer > 0 {
        return RatFunc::zero();
    }
    let canonical = base.simplify();
    let kernel = Var::Kernel(Arc::new(Kernel::Root { base: canonical, denom }));
    let k = RatFunc::var(kernel);
    k.pow_int(numer).unwrap_or_else(|| singular_power(base, exp))
}

/// `0^(-k)` has no normal form; keep it as an opaque radical so evaluation
/// reports the singularity instead of the normalizer panicking.
fn singular_power(base: &Expr, exp: &BigRational) -> RatFunc {
    let canonical = base.simplify();
    let marker = Kernel::Opaque(Expr::pow_raw(canonical, exp.clone()));
    RatFunc::var(Var::Kernel(Arc::new(marker)))
}
