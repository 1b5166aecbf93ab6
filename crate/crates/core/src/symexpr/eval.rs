use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::{BigRational, Signed, ToPrimitive, Zero};

use super::expr::{to_f64, Expr, ExprKind};
use crate::error::EvalError;

/// A concrete smooth function standing in for a function symbol.
#[derive(Clone)]
pub enum Instantiation {
    /// Polynomial with coefficients in increasing degree.
    Polynomial(Vec<f64>),
    /// Arbitrary callable `(derivative order, t) -> value`.
    Custom(Arc<dyn Fn(u32, f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Instantiation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instantiation::Polynomial(c) => f.debug_tuple("Polynomial").field(c).finish(),
            Instantiation::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl Instantiation {
    pub fn eval(&self, order: u32, t: f64) -> f64 {
        match self {
            Instantiation::Polynomial(coeffs) => {
                // Horner on the order-th derivative's coefficients.
                let k = order as usize;
                let mut acc = 0.0;
                for (i, c) in coeffs.iter().enumerate().skip(k).rev() {
                    let falling: f64 = ((i - k + 1)..=i).map(|j| j as f64).product();
                    acc = acc * t + c * falling;
                }
                acc
            }
            Instantiation::Custom(f) => f(order, t),
        }
    }
}

/// Map from function-symbol name to its instantiation.
#[derive(Clone, Debug, Default)]
pub struct FuncEnv {
    map: BTreeMap<String, Instantiation>,
}

impl FuncEnv {
    pub fn new() -> Self {
        FuncEnv::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, inst: Instantiation) {
        self.map.insert(name.into(), inst);
    }

    pub fn with_polynomial(mut self, name: impl Into<String>, coeffs: Vec<f64>) -> Self {
        self.insert(name, Instantiation::Polynomial(coeffs));
        self
    }

    pub fn get(&self, name: &str) -> Option<&Instantiation> {
        self.map.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.map.contains_key(name)
    }
}

/// Evaluates `e` at a point (one value per chart coordinate).
pub fn eval(e: &Expr, point: &[f64], env: &FuncEnv) -> Result<f64, EvalError> {
    eval_scaled(e, point, env).map(|(v, _)| v)
}

/// Evaluates `e` together with a magnitude scale: the same expression with
/// every sum replaced by the sum of absolute values. Used to make zero tests
/// relative to the size of the terms that cancel.
pub fn eval_scaled(e: &Expr, point: &[f64], env: &FuncEnv) -> Result<(f64, f64), EvalError> {
    let (v, s) = walk(e, point, env)?;
    if !v.is_finite() {
        return Err(EvalError::NonFinite);
    }
    Ok((v, s))
}

fn walk(e: &Expr, point: &[f64], env: &FuncEnv) -> Result<(f64, f64), EvalError> {
    match e.kind() {
        ExprKind::Const(c) => {
            let v = to_f64(c);
            Ok((v, v.abs()))
        }
        ExprKind::Var(i) => {
            let v = *point
                .get(*i as usize)
                .ok_or(EvalError::CoordinateOutOfRange(*i as usize))?;
            Ok((v, v.abs()))
        }
        ExprKind::Sum(terms) => {
            let (mut v, mut s) = (0.0, 0.0);
            for t in terms {
                let (tv, ts) = walk(t, point, env)?;
                v += tv;
                s += ts;
            }
            Ok((v, s))
        }
        ExprKind::Product(factors) => {
            let (mut v, mut s) = (1.0, 1.0);
            for f in factors {
                let (fv, fs) = walk(f, point, env)?;
                v *= fv;
                s *= fs;
            }
            Ok((v, s))
        }
        ExprKind::Pow(base, exp) => {
            let (b, bs) = walk(base, point, env)?;
            if exp.is_integer() {
                let k = exp.to_integer().to_i32().ok_or(EvalError::NonFinite)?;
                if k < 0 && b == 0.0 {
                    return Err(EvalError::DivisionByZero);
                }
                let v = b.powi(k);
                let s = if k >= 0 { bs.powi(k) } else { v.abs() };
                check_finite(v, s)
            } else {
                if b < 0.0 {
                    return Err(EvalError::NegativeRadicand(b));
                }
                if exp.is_negative() && b == 0.0 {
                    return Err(EvalError::DivisionByZero);
                }
                let v = b.powf(to_f64(exp));
                check_finite(v, v.abs())
            }
        }
        ExprKind::Apply { name, order, arg } => {
            let (t, _) = walk(arg, point, env)?;
            let inst = env
                .get(name)
                .ok_or_else(|| EvalError::MissingFunction(name.to_string()))?;
            let v = inst.eval(*order, t);
            check_finite(v, v.abs())
        }
    }
}

fn check_finite(v: f64, s: f64) -> Result<(f64, f64), EvalError> {
    if v.is_finite() {
        Ok((v, s))
    } else {
        Err(EvalError::NonFinite)
    }
}

/// Exact evaluation at a rational point, for expressions without function
/// symbols or non-integer powers. Returns `None` outside that class.
pub fn eval_exact(e: &Expr, point: &[BigRational]) -> Result<Option<BigRational>, EvalError> {
    Ok(match e.kind() {
        ExprKind::Const(c) => Some(c.clone()),
        ExprKind::Var(i) => Some(
            point
                .get(*i as usize)
                .cloned()
                .ok_or(EvalError::CoordinateOutOfRange(*i as usize))?,
        ),
        ExprKind::Sum(terms) => {
            let mut acc = BigRational::zero();
            for t in terms {
                match eval_exact(t, point)? {
                    Some(v) => acc += v,
                    None => return Ok(None),
                }
            }
            Some(acc)
        }
        ExprKind::Product(factors) => {
            let mut acc = BigRational::from_integer(1.into());
            for f in factors {
                match eval_exact(f, point)? {
                    Some(v) => acc *= v,
                    None => return Ok(None),
                }
            }
            Some(acc)
        }
        ExprKind::Pow(base, exp) => {
            if !exp.is_integer() {
                return Ok(None);
            }
            let Some(b) = eval_exact(base, point)? else { return Ok(None) };
            let k = exp.to_integer().to_i32().ok_or(EvalError::NonFinite)?;
            if k < 0 && b.is_zero() {
                return Err(EvalError::DivisionByZero);
            }
            Some(num::pow::Pow::pow(b, k))
        }
        ExprKind::Apply { .. } => None,
    })
}
