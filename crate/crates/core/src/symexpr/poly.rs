//! Sparse multivariate polynomials over the rationals.
//!
//! Variables are either chart coordinates or opaque kernels (function
//! applications and radicals), so the same machinery normalizes every
//! coefficient that appears in a form. Monomials are ordered
//! lexicographically with lower-indexed variables most significant.

// Kernels cache their normal form, but ordering and equality ignore the cache.
#![allow(clippy::mutable_key_type)]

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num::{BigRational, One, Zero};

use super::expr::Expr;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Kernel {
    /// `name^(order)(arg)`, with `arg` in canonical form.
    Apply { name: Arc<str>, order: u32, arg: Expr },
    /// `base^(1/denom)`, with `base` in canonical form and `denom >= 2`.
    Root { base: Expr, denom: u32 },
    /// An expression with no normal form (a power of zero with negative
    /// exponent); evaluating it reports the singularity.
    Opaque(Expr),
}

#[derive(Clone, Debug)]
pub(crate) enum Var {
    Coord(u16),
    Kernel(Arc<Kernel>),
}

impl PartialEq for Var {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Var {}

impl PartialOrd for Var {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Var {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Var::Coord(a), Var::Coord(b)) => a.cmp(b),
            (Var::Coord(_), Var::Kernel(_)) => Ordering::Less,
            (Var::Kernel(_), Var::Coord(_)) => Ordering::Greater,
            (Var::Kernel(a), Var::Kernel(b)) => {
                if Arc::ptr_eq(a, b) {
                    Ordering::Equal
                } else {
                    a.cmp(b)
                }
            }
        }
    }
}

/// Power product, sorted by variable, exponents strictly positive.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct Monomial(Vec<(Var, u32)>);

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.0, &other.0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((va, ea)), Some((vb, eb))) => match va.cmp(vb) {
                    // `a` carries a more significant variable that `b` lacks.
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match ea.cmp(eb) {
                        Ordering::Equal => {
                            i += 1;
                            j += 1;
                        }
                        ord => return ord,
                    },
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Monomial {
    pub(crate) fn one() -> Self {
        Monomial(Vec::new())
    }

    pub(crate) fn var(v: Var, exp: u32) -> Self {
        if exp == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(v, exp)])
        }
    }

    pub(crate) fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub(crate) fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (va, ea) = &self.0[i];
            let (vb, eb) = &other.0[j];
            match va.cmp(vb) {
                Ordering::Less => {
                    out.push((va.clone(), *ea));
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((vb.clone(), *eb));
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((va.clone(), ea + eb));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    pub(crate) fn degree_of(&self, v: &Var) -> u32 {
        self.0
            .iter()
            .find(|(w, _)| w == v)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub(crate) fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().all(|(v, e)| other.degree_of(v) >= *e)
    }

    /// `self / other`, assuming `other` divides `self`.
    pub(crate) fn div(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len());
        for (v, e) in &self.0 {
            let d = e - other.degree_of(v);
            if d > 0 {
                out.push((v.clone(), d));
            }
        }
        Monomial(out)
    }

    pub(crate) fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::new();
        for (v, e) in &self.0 {
            let d = (*e).min(other.degree_of(v));
            if d > 0 {
                out.push((v.clone(), d));
            }
        }
        Monomial(out)
    }

    /// Splits off the factors whose variable is in `vars`.
    fn split(&self, vars: &BTreeSet<Var>) -> (Monomial, Monomial) {
        let (inside, outside): (Vec<_>, Vec<_>) =
            self.0.iter().cloned().partition(|(v, _)| vars.contains(v));
        (Monomial(inside), Monomial(outside))
    }

    fn without(&self, v: &Var) -> (u32, Monomial) {
        let mut deg = 0;
        let mut rest = Vec::with_capacity(self.0.len());
        for (w, e) in &self.0 {
            if w == v {
                deg = *e;
            } else {
                rest.push((w.clone(), *e));
            }
        }
        (deg, Monomial(rest))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub(crate) fn zero() -> Self {
        Poly::default()
    }

    pub(crate) fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub(crate) fn constant(c: BigRational) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub(crate) fn var(v: Var) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::var(v, 1), BigRational::one());
        p
    }

    pub(crate) fn term(m: Monomial, c: BigRational) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    pub(crate) fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub(crate) fn len(&self) -> usize {
        self.terms.len()
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.keys().next().unwrap().is_one())
    }

    pub(crate) fn is_one(&self) -> bool {
        self.is_constant() && self.constant_value().is_one()
    }

    pub(crate) fn constant_value(&self) -> BigRational {
        self.terms
            .get(&Monomial::one())
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub(crate) fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub(crate) fn add(&self, other: &Poly) -> Poly {
        let (mut big, small) = if self.len() >= other.len() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }

    pub(crate) fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub(crate) fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub(crate) fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub(crate) fn mul_term(&self, m: &Monomial, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(n, a)| (n.mul(m), a * c))
                .collect(),
        }
    }

    pub(crate) fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if self.is_constant() {
            return other.scale(&self.constant_value());
        }
        if other.is_constant() {
            return self.scale(&other.constant_value());
        }
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub(crate) fn pow(&self, mut exp: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Scales so that the leading coefficient is one.
    pub(crate) fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some((_, lc)) if lc.is_one() => self.clone(),
            Some((_, lc)) => {
                let inv = lc.recip();
                self.scale(&inv)
            }
        }
    }

    pub(crate) fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for m in self.terms.keys() {
            for (v, _) in m.factors() {
                out.insert(v.clone());
            }
        }
        out
    }

    pub(crate) fn has_kernels(&self) -> bool {
        self.terms
            .keys()
            .any(|m| m.factors().iter().any(|(v, _)| matches!(v, Var::Kernel(_))))
    }

    pub(crate) fn degree_in(&self, v: &Var) -> u32 {
        self.terms.keys().map(|m| m.degree_of(v)).max().unwrap_or(0)
    }

    /// Partial derivative treating `v` as an independent variable.
    pub(crate) fn partial(&self, v: &Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (deg, rest) = m.without(v);
            if deg == 0 {
                continue;
            }
            let m2 = rest.mul(&Monomial::var(v.clone(), deg - 1));
            out.add_term(m2, c * BigRational::from_integer(deg.into()));
        }
        out
    }

    /// Coefficients with respect to the variables in `vars`, keyed by the
    /// monomial in those variables.
    fn coefficients_in(&self, vars: &BTreeSet<Var>) -> Vec<Poly> {
        let mut groups: BTreeMap<Monomial, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (inside, outside) = m.split(vars);
            groups.entry(inside).or_default().add_term(outside, c.clone());
        }
        let mut out: Vec<Poly> = groups.into_values().collect();
        out.sort_by_key(|p| p.len());
        out
    }

    /// Dense coefficient list in `v`; entry `k` multiplies `v^k`.
    fn to_univariate(&self, v: &Var) -> Vec<Poly> {
        let deg = self.degree_in(v) as usize;
        let mut out = vec![Poly::zero(); deg + 1];
        for (m, c) in &self.terms {
            let (d, rest) = m.without(v);
            out[d as usize].add_term(rest, c.clone());
        }
        out
    }

    fn from_univariate(coeffs: &[Poly], v: &Var) -> Poly {
        let mut out = Poly::zero();
        for (k, c) in coeffs.iter().enumerate() {
            let vk = Monomial::var(v.clone(), k as u32);
            for (m, a) in &c.terms {
                out.add_term(m.mul(&vk), a.clone());
            }
        }
        out
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves
    /// a remainder.
    pub(crate) fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        if divisor.is_zero() {
            return None;
        }
        if divisor.is_constant() {
            return Some(self.scale(&divisor.constant_value().recip()));
        }
        let (lm, lc) = divisor.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((rm, rc)) = rem.leading() {
            if !lm.divides(rm) {
                return None;
            }
            let qm = rm.div(&lm);
            let qc = rc / &lc;
            rem = rem.sub(&divisor.mul_term(&qm, &qc));
            quot.add_term(qm, qc);
        }
        Some(quot)
    }
}

/// Greatest common divisor, normalized to leading coefficient one.
pub(crate) fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a.len() == 1 || b.len() == 1 {
        return monomial_content_gcd(a, b);
    }
    let va = a.vars();
    let vb = b.vars();
    let only_a: BTreeSet<Var> = va.difference(&vb).cloned().collect();
    if !only_a.is_empty() {
        return gcd_with_all(b, a.coefficients_in(&only_a));
    }
    let only_b: BTreeSet<Var> = vb.difference(&va).cloned().collect();
    if !only_b.is_empty() {
        return gcd_with_all(a, b.coefficients_in(&only_b));
    }
    let main = va
        .iter()
        .min_by_key(|v| a.degree_in(v).max(b.degree_in(v)))
        .cloned()
        .expect("non-constant polynomial has a variable");
    if va.len() == 1 {
        univariate_gcd(a, b, &main)
    } else {
        recursive_gcd(a, b, &main)
    }
}

fn monomial_content_gcd(a: &Poly, b: &Poly) -> Poly {
    let mut g: Option<Monomial> = None;
    for m in a.terms.keys().chain(b.terms.keys()) {
        g = Some(match g {
            None => m.clone(),
            Some(g) => g.gcd(m),
        });
        if g.as_ref().is_some_and(|g| g.is_one()) {
            break;
        }
    }
    Poly::term(g.unwrap_or_default(), BigRational::one())
}

fn gcd_with_all(p: &Poly, others: Vec<Poly>) -> Poly {
    let mut g = p.clone();
    for c in others {
        g = gcd(&g, &c);
        if g.is_constant() {
            return Poly::one();
        }
    }
    g.monic()
}

fn univariate_gcd(a: &Poly, b: &Poly, v: &Var) -> Poly {
    let mut x = a.to_univariate(v).iter().map(|p| p.constant_value()).collect::<Vec<_>>();
    let mut y = b.to_univariate(v).iter().map(|p| p.constant_value()).collect::<Vec<_>>();
    trim_rat(&mut x);
    trim_rat(&mut y);
    while !y.is_empty() {
        let r = rat_rem(&x, &y);
        x = y;
        y = r;
    }
    let lc = x.last().cloned().unwrap_or_else(BigRational::one);
    let coeffs: Vec<Poly> = x.iter().map(|c| Poly::constant(c / &lc)).collect();
    Poly::from_univariate(&coeffs, v).monic()
}

fn trim_rat(p: &mut Vec<BigRational>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn rat_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    let lb = b.last().expect("nonzero divisor").clone();
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let q = r.last().unwrap() / &lb;
        for (k, c) in b.iter().enumerate() {
            r[k + shift] -= &q * c;
        }
        r.pop();
        trim_rat(&mut r);
    }
    r
}

fn content(coeffs: &[Poly]) -> Poly {
    let mut g = Poly::zero();
    let mut sorted: Vec<&Poly> = coeffs.iter().filter(|c| !c.is_zero()).collect();
    sorted.sort_by_key(|p| p.len());
    for c in sorted {
        g = gcd(&g, c);
        if g.is_constant() {
            return Poly::one();
        }
    }
    g
}

fn trim_poly(p: &mut Vec<Poly>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn primitive(coeffs: &[Poly]) -> Vec<Poly> {
    let c = content(coeffs);
    if c.is_one() {
        return coeffs.to_vec();
    }
    coeffs
        .iter()
        .map(|p| p.div_exact(&c).expect("content divides every coefficient"))
        .collect()
}

fn pseudo_rem(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let lb = b.last().expect("nonzero divisor").clone();
    let mut r = a.to_vec();
    trim_poly(&mut r);
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let lr = r.last().unwrap().clone();
        for c in r.iter_mut() {
            *c = c.mul(&lb);
        }
        for (k, c) in b.iter().enumerate() {
            r[k + shift] = r[k + shift].sub(&c.mul(&lr));
        }
        trim_poly(&mut r);
    }
    r
}

fn recursive_gcd(a: &Poly, b: &Poly, v: &Var) -> Poly {
    let ua = a.to_univariate(v);
    let ub = b.to_univariate(v);
    let ca = content(&ua);
    let cb = content(&ub);
    let c = gcd(&ca, &cb);
    let mut pa = primitive(&ua);
    let mut pb = primitive(&ub);
    trim_poly(&mut pa);
    trim_poly(&mut pb);
    if pa.len() < pb.len() {
        std::mem::swap(&mut pa, &mut pb);
    }
    loop {
        if pb.len() <= 1 {
            // A primitive polynomial of degree zero in `v` is a unit.
            return c.monic();
        }
        let r = pseudo_rem(&pa, &pb);
        if r.is_empty() {
            let g = Poly::from_univariate(&pb, v);
            return c.mul(&g).monic();
        }
        pa = pb;
        pb = primitive(&r);
    }
}
