//! Seeded zero-equivalence oracle.
//!
//! Rational expressions are decided exactly from their normal form. Anything
//! involving radicals or function symbols is evaluated at seeded sample
//! points, with each function symbol replaced by a seeded random polynomial
//! whose derivatives are taken exactly, so a symbol and its derivative tower
//! stay consistent.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num::{BigRational, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::chart::Chart;
use super::eval::{eval_scaled, FuncEnv, Instantiation};
use super::expr::Expr;
use crate::error::{ChartError, EvalError, OracleError};

/// Resamples attempted per sample point before it is declared singular.
pub const MAX_RESAMPLES: usize = 10;

const DYADIC_BITS: u32 = 20;

/// Closed interval of rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Interval {
    pub fn new(lo: BigRational, hi: BigRational) -> Interval {
        if lo <= hi {
            Interval { lo, hi }
        } else {
            Interval { lo: hi, hi: lo }
        }
    }

    pub fn from_ratios(lo: (i64, i64), hi: (i64, i64)) -> Interval {
        Interval::new(BigRational::new(lo.0.into(), lo.1.into()), BigRational::new(hi.0.into(), hi.1.into()))
    }
}

impl Default for Interval {
    fn default() -> Self {
        Interval::from_ratios((1, 4), (2, 1))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleConfig {
    pub seed: u64,
    pub sample_count: usize,
    /// Interval used for every coordinate without an override.
    pub default_interval: Interval,
    /// Per-coordinate overrides, keyed by chart index.
    pub overrides: BTreeMap<usize, Interval>,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub function_degree: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            seed: 0x5eed,
            sample_count: 128,
            default_interval: Interval::default(),
            overrides: BTreeMap::new(),
            abs_tol: 1e-9,
            rel_tol: 1e-9,
            function_degree: 3,
        }
    }
}

impl OracleConfig {
    pub fn with_seed(seed: u64) -> Self {
        OracleConfig { seed, ..Default::default() }
    }

    pub fn interval(&self, index: usize) -> &Interval {
        self.overrides.get(&index).unwrap_or(&self.default_interval)
    }
}

/// A sample point at which an expression was found nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub point: Vec<f64>,
    pub value: f64,
    pub scale: f64,
    pub sample: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Zero,
    NonZero(Witness),
}

impl Verdict {
    pub fn is_zero(&self) -> bool {
        matches!(self, Verdict::Zero)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Zero => None,
            Verdict::NonZero(w) => Some(w),
        }
    }
}

/// Verdict together with the largest residual magnitude seen.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub verdict: Verdict,
    pub residual_max: f64,
    /// True when the verdict came from exact normalization.
    pub exact: bool,
}

/// Point, value and magnitude scale of one regular evaluation.
type Sample = (Vec<f64>, f64, f64);

/// The oracle bound to one chart and one configuration.
#[derive(Clone, Debug)]
pub struct Oracle {
    chart: Arc<Chart>,
    config: OracleConfig,
}

impl Oracle {
    pub fn new(chart: Arc<Chart>, config: OracleConfig) -> Oracle {
        Oracle { chart, config }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn config(&self) -> &OracleConfig {
        &self.config
    }

    /// The `attempt`-th candidate for sample `index`; a pure function of the
    /// seed, the index and the attempt.
    pub fn sample_point(&self, index: usize, attempt: usize) -> Vec<f64> {
        let stream = self.config.seed
            ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
            ^ (attempt as u64).wrapping_mul(0xc2b2_ae3d_27d4_eb4f).rotate_left(17);
        let mut rng = ChaCha8Rng::seed_from_u64(stream);
        (0..self.chart.dim())
            .map(|i| {
                let iv = self.config.interval(i);
                let lo = iv.lo.to_f64().unwrap_or(0.0);
                let hi = iv.hi.to_f64().unwrap_or(0.0);
                let k: u32 = rng.gen_range(0..=(1u32 << DYADIC_BITS));
                lo + (hi - lo) * (k as f64 / (1u64 << DYADIC_BITS) as f64)
            })
            .collect()
    }

    /// The seeded polynomial that stands in for a function symbol.
    pub fn instantiation(&self, name: &str) -> Instantiation {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed ^ fnv1a(name.as_bytes()));
        let coeffs = (0..=self.config.function_degree)
            .map(|_| rng.gen_range(0.5..1.5))
            .collect();
        Instantiation::Polynomial(coeffs)
    }

    /// Function environment covering every symbol in `exprs`.
    pub fn env_for<'a>(&self, exprs: impl IntoIterator<Item = &'a Expr>) -> FuncEnv {
        let mut names = BTreeSet::new();
        for e in exprs {
            e.function_symbols(&mut names);
        }
        let mut env = FuncEnv::new();
        for n in names {
            let inst = self.instantiation(&n);
            env.insert(n, inst);
        }
        env
    }

    fn check_chart(&self, e: &Expr) -> Result<(), ChartError> {
        match e.max_var() {
            Some(i) if i >= self.chart.dim() => Err(ChartError::OutOfRange { index: i, dim: self.chart.dim() }),
            _ => Ok(()),
        }
    }

    pub fn is_zero(&self, e: &Expr) -> Result<Verdict, OracleError> {
        self.check(e).map(|o| o.verdict)
    }

    /// Decides whether `e` vanishes identically on the sampling box.
    pub fn check(&self, e: &Expr) -> Result<Outcome, OracleError> {
        self.check_chart(e)?;
        let normal = e.normal();
        if normal.is_zero() {
            return Ok(Outcome { verdict: Verdict::Zero, residual_max: 0.0, exact: true });
        }
        let canonical = e.simplify();
        let exact = !normal.has_kernels();
        let env = self.env_for([&canonical]);
        let tol = |s: f64| self.config.abs_tol + self.config.rel_tol * s;

        let mut best: Option<Witness> = None;
        let mut residual_max = 0.0f64;
        let mut regular = 0usize;
        let mut singular: Option<OracleError> = None;
        for sample in 0..self.config.sample_count {
            match self.evaluate_sample(&canonical, &env, sample)? {
                Ok((point, value, scale)) => {
                    regular += 1;
                    residual_max = residual_max.max(value.abs());
                    if value.abs() > tol(scale) {
                        let w = Witness { point, value, scale, sample };
                        return Ok(Outcome { verdict: Verdict::NonZero(w), residual_max, exact });
                    }
                    if best.as_ref().is_none_or(|w| value.abs() > w.value.abs()) {
                        best = Some(Witness { point, value, scale, sample });
                    }
                }
                Err(e) => {
                    if singular.is_none() {
                        singular = Some(e);
                    }
                }
            }
        }
        if regular == 0 {
            return Err(OracleError::Inconclusive { samples: self.config.sample_count });
        }
        if exact {
            // The normal form is nonzero, so the expression is not identically
            // zero even if it is tiny on every sample.
            let w = best.expect("at least one regular sample");
            return Ok(Outcome { verdict: Verdict::NonZero(w), residual_max, exact });
        }
        if let Some(err) = singular {
            return Err(err);
        }
        Ok(Outcome { verdict: Verdict::Zero, residual_max, exact })
    }

    /// Checks a list of expressions, returning the first nonzero one (by
    /// position) and the largest residual over everything inspected.
    pub fn check_all<'a>(
        &self,
        exprs: impl IntoIterator<Item = &'a Expr>,
    ) -> Result<(Option<(usize, Witness)>, f64), OracleError> {
        let mut residual = 0.0f64;
        for (i, e) in exprs.into_iter().enumerate() {
            let o = self.check(e)?;
            residual = residual.max(o.residual_max);
            if let Verdict::NonZero(w) = o.verdict {
                return Ok((Some((i, w)), residual));
            }
        }
        Ok((None, residual))
    }

    /// Evaluates `e` at a witness point with this oracle's instantiations.
    pub fn reevaluate(&self, e: &Expr, point: &[f64]) -> Result<f64, OracleError> {
        let env = self.env_for([e]);
        eval_scaled(e, point, &env).map(|(v, _)| v).map_err(OracleError::Eval)
    }

    /// Evaluates `e` at the first regular candidate for sample `index`.
    /// The inner error reports a point that stayed singular.
    fn evaluate_sample(
        &self,
        e: &Expr,
        env: &FuncEnv,
        sample: usize,
    ) -> Result<Result<Sample, OracleError>, OracleError> {
        let mut last: Option<(Vec<f64>, EvalError)> = None;
        for attempt in 0..MAX_RESAMPLES {
            let point = self.sample_point(sample, attempt);
            match eval_scaled(e, &point, env) {
                Ok((v, s)) => return Ok(Ok((point, v, s))),
                Err(err) if err.is_singularity() => last = Some((point, err)),
                Err(err) => return Err(OracleError::Eval(err)),
            }
        }
        let (point, cause) = last.expect("at least one attempt");
        Ok(Err(OracleError::Singular { sample, attempts: MAX_RESAMPLES, point, cause }))
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}
