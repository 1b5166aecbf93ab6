//! Graph-type Dirac structures `{(X, ι_X h)}` twisted by a closed 3-form,
//! their Hamiltonian vector fields and the Poisson bracket of admissible
//! functions.

mod linsolve;
mod props;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::check::{zero_check, ZeroCheck};
use crate::courant::GenSection;
use crate::error::{ChartError, GeometryError, OracleError};
use crate::exterior::{differential, KForm, VectorField};
use crate::symexpr::{eval, Chart, Expr, Oracle, Verdict, Witness, MAX_RESAMPLES};

pub use props::{
    check_image_under_d, check_poiss_brak_adm, check_symplgraph, check_theorem, is_admissible_pair, jacobi_defect,
    SymplGraphReport,
};

/// Which sign relates `df` to the Hamiltonian field.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SignConvention {
    /// Graph sections `(X, ι_X h)` and `df = ι_{X_f} h`.
    #[default]
    Plus,
    /// Graph sections `(X, -ι_X h)` and `df = -ι_{X_f} h`, twisted by `-H`.
    Minus,
}

impl SignConvention {
    fn factor(self) -> Expr {
        match self {
            SignConvention::Plus => Expr::one(),
            SignConvention::Minus => Expr::int(-1),
        }
    }
}

impl FromStr for SignConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "+" | "plus" => Ok(SignConvention::Plus),
            "-" | "minus" => Ok(SignConvention::Minus),
            other => Err(format!("unknown sign convention {other:?} (expected \"+\" or \"-\")")),
        }
    }
}

impl fmt::Display for SignConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SignConvention::Plus => "+",
            SignConvention::Minus => "-",
        })
    }
}

/// Three-valued admissibility verdict.
#[derive(Clone, Debug, PartialEq)]
pub enum Admissibility {
    Admissible,
    NotAdmissible(Witness),
    /// `f` has no Hamiltonian vector field, so it is not admissible at all.
    NoHamiltonian,
    /// The Hamiltonian field is not unique, so the condition is not decided.
    Undetermined,
}

impl Admissibility {
    pub fn is_admissible(&self) -> bool {
        matches!(self, Admissibility::Admissible)
    }
}

#[derive(Clone, Debug)]
pub struct AdmissibilityReport {
    pub function: String,
    pub courant_admissible: bool,
    pub hamiltonian: Option<VectorField>,
    pub h_admissible: Admissibility,
    pub residual_max: f64,
    /// The nonzero coefficient of `ι_{X_f} H`, for re-evaluation.
    pub failing: Option<Expr>,
}

/// A 2-form graph with a closed twisting 3-form.
#[derive(Clone)]
pub struct TwistedGraph {
    oracle: Oracle,
    h: KForm,
    twist: KForm,
    sign: SignConvention,
    h_eff: KForm,
    twist_eff: KForm,
    nondegenerate: bool,
    integrable: ZeroCheck,
    /// `M` with `(ι_X h_eff)_k = (M X)_k`.
    matrix: linsolve::Matrix,
    inverse: Option<linsolve::Matrix>,
}

impl fmt::Debug for TwistedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TwistedGraph")
            .field("h", &self.h)
            .field("H", &self.twist)
            .field("sign", &self.sign)
            .field("nondegenerate", &self.nondegenerate)
            .field("integrable", &self.integrable.passed())
            .finish()
    }
}

impl TwistedGraph {
    /// Builds the structure; fails if `twist` is not closed.
    pub fn new(h: KForm, twist: KForm, sign: SignConvention, oracle: Oracle) -> Result<TwistedGraph, GeometryError> {
        if h.degree() != 2 {
            return Err(GeometryError::Degree { expected: 2, found: h.degree() });
        }
        if twist.degree() != 3 {
            return Err(GeometryError::Degree { expected: 3, found: twist.degree() });
        }
        if h.chart() != twist.chart() || h.chart() != oracle.chart() {
            return Err(ChartError::Mismatch.into());
        }
        let closed = zero_check(&oracle, "dH", &twist.d())?;
        if !closed.passed() {
            return Err(GeometryError::NotClosed);
        }
        let integrable = zero_check(&oracle, "dh - H", &h.d().sub(&twist)?)?;
        let factor = sign.factor();
        let h_eff = h.scale(&factor);
        let twist_eff = twist.scale(&factor);
        let matrix = contraction_matrix(&h_eff);
        let nondegenerate = numerically_nondegenerate(&h_eff, &oracle)?;
        let inverse = if nondegenerate { linsolve::inverse(&matrix, &oracle)? } else { None };
        Ok(TwistedGraph {
            oracle,
            h,
            twist,
            sign,
            h_eff,
            twist_eff,
            nondegenerate: nondegenerate && inverse.is_some(),
            integrable,
            matrix,
            inverse,
        })
    }

    /// The structure twisted by `H = dh`, which is integrable by construction.
    pub fn with_exact_twist(h: KForm, sign: SignConvention, oracle: Oracle) -> Result<TwistedGraph, GeometryError> {
        let twist = h.d();
        TwistedGraph::new(h, twist, sign, oracle)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.h.chart()
    }

    pub fn oracle(&self) -> &Oracle {
        &self.oracle
    }

    pub fn h(&self) -> &KForm {
        &self.h
    }

    pub fn twist(&self) -> &KForm {
        &self.twist
    }

    pub fn sign(&self) -> SignConvention {
        self.sign
    }

    /// The 2-form whose graph the sections lie on, after the sign convention.
    pub fn effective_h(&self) -> &KForm {
        &self.h_eff
    }

    /// The twisting form after the sign convention.
    pub fn effective_twist(&self) -> &KForm {
        &self.twist_eff
    }

    pub fn nondegenerate(&self) -> bool {
        self.nondegenerate
    }

    /// Outcome of the zero test on `dh - H`.
    pub fn integrable(&self) -> &ZeroCheck {
        &self.integrable
    }

    /// The graph section `(X, ±ι_X h)`.
    pub fn graph_section(&self, x: &VectorField) -> Result<GenSection, GeometryError> {
        GenSection::pair(x.clone(), self.h_eff.interior(x)?)
    }

    /// Solves `df = ±ι_X h` without checking the residual. `Ok(None)` means
    /// the system is inconsistent.
    fn solve(&self, f: &Expr) -> Result<Option<VectorField>, GeometryError> {
        let chart = self.chart();
        let df = differential(chart, f)?;
        let b: Vec<Expr> = (0..chart.dim()).map(|k| df.coefficient(&[k])).collect();
        let x = match &self.inverse {
            Some(inv) => Some(linsolve::apply(inv, &b)),
            None => linsolve::solve(&self.matrix, &b, &self.oracle)?,
        };
        x.map(|x| VectorField::new(chart, x)).transpose()
    }

    /// The Hamiltonian vector field of `f`, with the residual
    /// `df - ±ι_{X_f} h` verified to vanish.
    pub fn hamiltonian_vf(&self, f: &Expr) -> Result<VectorField, GeometryError> {
        if !self.nondegenerate {
            return Err(GeometryError::Degenerate);
        }
        let x = self.solve(f)?.ok_or(GeometryError::NotSolvable)?;
        self.verify(f, &x)?;
        Ok(x)
    }

    fn verify(&self, f: &Expr, x: &VectorField) -> Result<(), GeometryError> {
        let residual = differential(self.chart(), f)?.sub(&self.h_eff.interior(x)?)?;
        let check = zero_check(&self.oracle, "df - i_X h", &residual)?;
        match check.verdict {
            Verdict::Zero => Ok(()),
            Verdict::NonZero(w) => Err(GeometryError::Residual(format!("{} at {:?}", w.value, w.point))),
        }
    }

    /// `{f, g} = X_f(g)`.
    pub fn poisson_bracket(&self, f: &Expr, g: &Expr) -> Result<Expr, GeometryError> {
        self.hamiltonian_vf(f)?.apply(g)
    }

    /// Whether some `X` satisfies `df = ±ι_X h`, and one such field. On a
    /// nondegenerate graph this always succeeds.
    pub fn is_courant_admissible(&self, f: &Expr) -> Result<Option<VectorField>, GeometryError> {
        match self.solve(f)? {
            Some(x) => {
                self.verify(f, &x)?;
                Ok(Some(x))
            }
            None => Ok(None),
        }
    }

    /// Courant admissibility plus the condition `ι_{X_f} H ≡ 0`.
    pub fn is_h_admissible(&self, name: &str, f: &Expr) -> Result<AdmissibilityReport, GeometryError> {
        let hamiltonian = self.is_courant_admissible(f)?;
        let mut report = AdmissibilityReport {
            function: name.to_string(),
            courant_admissible: hamiltonian.is_some(),
            hamiltonian: hamiltonian.clone(),
            h_admissible: Admissibility::Undetermined,
            residual_max: 0.0,
            failing: None,
        };
        let Some(x) = hamiltonian else {
            report.h_admissible = Admissibility::NoHamiltonian;
            return Ok(report);
        };
        if !self.nondegenerate {
            return Ok(report);
        }
        let check = zero_check(&self.oracle, "i_X H", &self.twist_eff.interior(&x)?)?;
        report.residual_max = check.residual_max;
        report.failing = check.failing;
        report.h_admissible = match check.verdict {
            Verdict::Zero => Admissibility::Admissible,
            Verdict::NonZero(w) => Admissibility::NotAdmissible(w),
        };
        Ok(report)
    }

    /// Hamiltonian fields for several functions at once.
    pub(crate) fn fields(&self, fs: &[&Expr]) -> Result<Vec<VectorField>, GeometryError> {
        fs.iter().map(|f| self.hamiltonian_vf(f)).collect()
    }
}

/// `M[k][i]` is the coefficient of `X_i` in `(ι_X h)_k`.
fn contraction_matrix(h: &KForm) -> linsolve::Matrix {
    let n = h.chart().dim();
    let mut m = vec![vec![Expr::zero(); n]; n];
    for (idx, c) in h.terms() {
        let (i, k) = (idx[0], idx[1]);
        // ι_X (c dx_i ^ dx_k) = c X_i dx_k - c X_k dx_i
        m[k][i] = c.clone();
        m[i][k] = (-c).simplify();
    }
    m
}

/// Numerical determinant test at every sample point of the oracle.
fn numerically_nondegenerate(h: &KForm, oracle: &Oracle) -> Result<bool, OracleError> {
    let n = h.chart().dim();
    if n % 2 == 1 {
        return Ok(false);
    }
    let matrix = contraction_matrix(h);
    let env = oracle.env_for(h.coefficients());
    let tol = oracle.config().abs_tol;
    for sample in 0..oracle.config().sample_count {
        let mut value = None;
        for attempt in 0..MAX_RESAMPLES {
            let p = oracle.sample_point(sample, attempt);
            let entries: Result<Vec<f64>, _> =
                matrix.iter().flat_map(|row| row.iter()).map(|e| eval(e, &p, &env)).collect();
            match entries {
                Ok(v) => {
                    value = Some(DMatrix::from_row_slice(n, n, &v).determinant());
                    break;
                }
                Err(e) if e.is_singularity() => continue,
                Err(e) => return Err(OracleError::Eval(e)),
            }
        }
        match value {
            Some(det) if det.abs() > tol => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::parse_form;
    use crate::symexpr::{parse_expr, OracleConfig};

    fn darboux() -> TwistedGraph {
        let c = Chart::new("m", ["q1", "q2", "q3", "p1", "p2", "p3"]).unwrap();
        let w = parse_form("dp1^dq1 + dp2^dq2 + dp3^dq3", &c).unwrap();
        let oracle = Oracle::new(c.clone(), OracleConfig::default());
        TwistedGraph::new(w, KForm::zero(&c, 3), SignConvention::Plus, oracle).unwrap()
    }

    #[test]
    fn canonical_pairs() {
        let d = darboux();
        let c = d.chart().clone();
        let q1 = parse_expr("q1", &c).unwrap();
        let p1 = parse_expr("p1", &c).unwrap();
        assert_eq!(d.hamiltonian_vf(&q1).unwrap(), VectorField::coordinate(&c, 3));
        assert_eq!(d.hamiltonian_vf(&p1).unwrap(), VectorField::coordinate(&c, 0).neg());
        assert_eq!(d.poisson_bracket(&q1, &p1).unwrap().as_constant(), Expr::one().as_constant());
    }

    #[test]
    fn degenerate_graph_reports_unsolvable() {
        let c = Chart::new("m", ["q1", "p1", "q2", "p2"]).unwrap();
        let h = parse_form("q1*dp1^dq1", &c).unwrap();
        let oracle = Oracle::new(c.clone(), OracleConfig::default());
        let d = TwistedGraph::new(h, KForm::zero(&c, 3), SignConvention::Plus, oracle).unwrap();
        assert!(!d.nondegenerate());
        let p2 = parse_expr("p2", &c).unwrap();
        assert!(d.is_courant_admissible(&p2).unwrap().is_none());
        let q1 = parse_expr("q1", &c).unwrap();
        let r = d.is_h_admissible("q1", &q1).unwrap();
        assert!(r.courant_admissible);
        assert_eq!(r.h_admissible, Admissibility::Undetermined);
    }

    #[test]
    fn non_closed_twist_is_rejected() {
        let c = Chart::new("m", ["a", "b", "c", "e"]).unwrap();
        let h = parse_form("da^db + dc^de", &c).unwrap();
        let twist = parse_form("e*da^db^dc", &c).unwrap();
        let oracle = Oracle::new(c.clone(), OracleConfig::default());
        assert!(matches!(
            TwistedGraph::new(h, twist, SignConvention::Plus, oracle),
            Err(GeometryError::NotClosed)
        ));
    }
}
