//! Exact scalar expressions, evaluation and the zero-equivalence oracle.

mod chart;
mod eval;
mod expr;
mod oracle;
mod parse;
mod poly;
mod ratfunc;

pub use chart::{is_identifier, Chart, DEFAULT_MAX_DIM, HARD_MAX_DIM};
pub use eval::{eval, eval_exact, eval_scaled, FuncEnv, Instantiation};
pub use expr::{rational_from_f64, Expr, ExprDisplay, ExprKind};
pub use oracle::{Interval, Oracle, OracleConfig, Outcome, Verdict, Witness, MAX_RESAMPLES};
pub use parse::{parse_expr, parse_expr_with, Definitions};

pub(crate) use parse::{split_derivative_suffix, tokenize, Tok, Token};

use crate::error::ChartError;

/// Partial derivative of `e` with respect to the named coordinate.
pub fn diff(e: &Expr, chart: &Chart, coord: &str) -> Result<Expr, ChartError> {
    let index = chart.coordinate(coord)?;
    if let Some(i) = e.max_var() {
        if i >= chart.dim() {
            return Err(ChartError::OutOfRange { index: i, dim: chart.dim() });
        }
    }
    Ok(e.derivative(index))
}
