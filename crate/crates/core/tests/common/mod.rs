#![allow(dead_code)]

use std::sync::Arc;

use twisted_dirac::exterior::{parse_form, KForm};
use twisted_dirac::symexpr::{parse_expr, Chart, Expr, Oracle, OracleConfig};

pub fn phase_space() -> Arc<Chart> {
    Chart::new("T*R3", ["q1", "q2", "q3", "p1", "p2", "p3"]).unwrap()
}

pub fn omega(chart: &Arc<Chart>) -> KForm {
    parse_form("dp1^dq1 + dp2^dq2 + dp3^dq3", chart).unwrap()
}

pub fn oracle(chart: &Arc<Chart>) -> Oracle {
    Oracle::new(chart.clone(), OracleConfig::default())
}

pub fn expr(text: &str, chart: &Chart) -> Expr {
    parse_expr(text, chart).unwrap()
}

pub fn form(text: &str, chart: &Arc<Chart>) -> KForm {
    parse_form(text, chart).unwrap()
}

pub fn assert_zero(oracle: &Oracle, e: &Expr) {
    let v = oracle.is_zero(e).unwrap();
    assert!(v.is_zero(), "expected zero, got {}", e.display(oracle.chart()));
}
