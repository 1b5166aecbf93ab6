//! Residual checks: named lists of expressions that must vanish identically.

use crate::courant::GenSection;
use crate::error::OracleError;
use crate::exterior::{KForm, VectorField};
use crate::symexpr::{Expr, Oracle, Verdict, Witness};

/// Anything whose vanishing means every scalar entry vanishes.
pub trait Entries {
    fn entries(&self) -> Vec<Expr>;
}

impl Entries for Expr {
    fn entries(&self) -> Vec<Expr> {
        vec![self.clone()]
    }
}

impl Entries for KForm {
    fn entries(&self) -> Vec<Expr> {
        self.coefficients().cloned().collect()
    }
}

impl Entries for VectorField {
    fn entries(&self) -> Vec<Expr> {
        self.components().to_vec()
    }
}

impl Entries for GenSection {
    fn entries(&self) -> Vec<Expr> {
        GenSection::entries(self)
    }
}

impl<T: Entries> Entries for [T] {
    fn entries(&self) -> Vec<Expr> {
        self.iter().flat_map(Entries::entries).collect()
    }
}

/// Outcome of one zero test.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroCheck {
    pub label: String,
    pub verdict: Verdict,
    pub residual_max: f64,
    /// The entry that was found nonzero, kept so its witness can be
    /// re-evaluated.
    pub failing: Option<Expr>,
}

impl ZeroCheck {
    pub fn passed(&self) -> bool {
        self.verdict.is_zero()
    }

    pub fn witness(&self) -> Option<&Witness> {
        self.verdict.witness()
    }

    /// A check that holds without computation.
    pub fn trivially(label: impl Into<String>) -> ZeroCheck {
        ZeroCheck { label: label.into(), verdict: Verdict::Zero, residual_max: 0.0, failing: None }
    }
}

pub fn zero_check(oracle: &Oracle, label: impl Into<String>, value: &(impl Entries + ?Sized)) -> Result<ZeroCheck, OracleError> {
    let entries = value.entries();
    let (hit, residual_max) = oracle.check_all(entries.iter())?;
    let (verdict, failing) = match hit {
        Some((i, w)) => (Verdict::NonZero(w), Some(entries[i].clone())),
        None => (Verdict::Zero, None),
    };
    Ok(ZeroCheck { label: label.into(), verdict, residual_max, failing })
}

/// An ordered list of checks, passing when all pass.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CheckReport {
    pub checks: Vec<ZeroCheck>,
}

impl CheckReport {
    pub fn new() -> CheckReport {
        CheckReport::default()
    }

    pub fn push(&mut self, c: ZeroCheck) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, other: CheckReport) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(ZeroCheck::passed)
    }

    pub fn first_failure(&self) -> Option<&ZeroCheck> {
        self.checks.iter().find(|c| !c.passed())
    }

    pub fn residual_max(&self) -> f64 {
        self.checks.iter().map(|c| c.residual_max).fold(0.0, f64::max)
    }
}
