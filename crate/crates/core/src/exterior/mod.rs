//! Differential forms and vector fields on a single chart.
//!
//! A k-form is stored by its coefficients on the basis
//! `dx_{i1} ^ ... ^ dx_{ik}` with `i1 < ... < ik`, keyed by the bitmask of
//! the index set. Signs are computed from popcounts when indices are merged
//! or removed. Contractions are innermost-first: `ι_Z ι_Y ι_X H = H(X, Y, Z)`.

mod parse;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{ChartError, GeometryError};
use crate::error::OracleError;
use crate::symexpr::{Chart, Expr, Oracle, Witness};

pub use parse::{parse_form, parse_form_with, Namespace};

type Mask = u64;

fn bit(i: usize) -> Mask {
    1 << i
}

/// Number of set bits strictly below `i`.
fn rank_below(mask: Mask, i: usize) -> u32 {
    (mask & (bit(i) - 1)).count_ones()
}

fn sign_of(parity: u32) -> bool {
    parity % 2 == 1
}

fn indices(mask: Mask) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask & (1u64 << i) != 0)
}

fn same_chart(a: &Arc<Chart>, b: &Arc<Chart>) -> Result<(), ChartError> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(ChartError::Mismatch)
    }
}

fn check_expr(chart: &Chart, e: &Expr) -> Result<(), ChartError> {
    match e.max_var() {
        Some(i) if i >= chart.dim() => Err(ChartError::OutOfRange { index: i, dim: chart.dim() }),
        _ => Ok(()),
    }
}

/// Collects terms per basis element, then normalizes each coefficient once.
#[derive(Default)]
struct Accumulator {
    terms: BTreeMap<Mask, Vec<Expr>>,
}

impl Accumulator {
    fn push(&mut self, mask: Mask, negate: bool, e: Expr) {
        let e = if negate { -e } else { e };
        self.terms.entry(mask).or_default().push(e);
    }

    fn finish(self) -> BTreeMap<Mask, Expr> {
        self.terms
            .into_iter()
            .filter_map(|(m, ts)| {
                let c = Expr::sum(ts).simplify();
                (!c.is_exactly_zero()).then_some((m, c))
            })
            .collect()
    }
}

/// Vector field `Σ X_i ∂/∂x_i` with one component per coordinate.
#[derive(Clone, PartialEq)]
pub struct VectorField {
    chart: Arc<Chart>,
    components: Vec<Expr>,
}

impl VectorField {
    pub fn new(chart: &Arc<Chart>, components: Vec<Expr>) -> Result<VectorField, GeometryError> {
        if components.len() != chart.dim() {
            return Err(GeometryError::Invalid(format!(
                "vector field has {} components on a chart of dimension {}",
                components.len(),
                chart.dim()
            )));
        }
        for c in &components {
            check_expr(chart, c)?;
        }
        let components = components.iter().map(Expr::simplify).collect();
        Ok(VectorField { chart: chart.clone(), components })
    }

    pub fn zero(chart: &Arc<Chart>) -> VectorField {
        VectorField { chart: chart.clone(), components: vec![Expr::zero(); chart.dim()] }
    }

    /// The coordinate field `∂/∂x_i`.
    pub fn coordinate(chart: &Arc<Chart>, index: usize) -> VectorField {
        let mut v = VectorField::zero(chart);
        v.components[index] = Expr::one();
        v
    }

    /// Builds a field from `(coordinate name, component)` pairs; missing
    /// coordinates get a zero component.
    pub fn from_named<'a>(
        chart: &Arc<Chart>,
        entries: impl IntoIterator<Item = (&'a str, Expr)>,
    ) -> Result<VectorField, GeometryError> {
        let mut comps = vec![Expr::zero(); chart.dim()];
        for (name, e) in entries {
            let i = chart.coordinate(name)?;
            comps[i] = Expr::sum([comps[i].clone(), e]);
        }
        VectorField::new(chart, comps)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Expr {
        &self.components[i]
    }

    pub fn is_exactly_zero(&self) -> bool {
        self.components.iter().all(Expr::is_exactly_zero)
    }

    fn zip_with(&self, other: &VectorField, f: impl Fn(&Expr, &Expr) -> Expr) -> Result<VectorField, GeometryError> {
        same_chart(&self.chart, &other.chart)?;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| f(a, b).simplify())
            .collect();
        Ok(VectorField { chart: self.chart.clone(), components })
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField, GeometryError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &VectorField) -> Result<VectorField, GeometryError> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn neg(&self) -> VectorField {
        self.scale(&Expr::int(-1))
    }

    pub fn scale(&self, f: &Expr) -> VectorField {
        let components = self.components.iter().map(|c| (f * c).simplify()).collect();
        VectorField { chart: self.chart.clone(), components }
    }

    /// Directional derivative `X(f) = Σ X_i ∂f/∂x_i`.
    pub fn apply(&self, f: &Expr) -> Result<Expr, GeometryError> {
        check_expr(&self.chart, f)?;
        Ok(self.apply_unchecked(f))
    }

    fn apply_unchecked(&self, f: &Expr) -> Expr {
        let terms = self
            .components
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_exactly_zero())
            .map(|(i, c)| c * &f.derivative(i));
        Expr::sum(terms).simplify()
    }

    /// Lie bracket, `[X, Y]_i = X(Y_i) - Y(X_i)`.
    pub fn bracket(&self, other: &VectorField) -> Result<VectorField, GeometryError> {
        same_chart(&self.chart, &other.chart)?;
        let components = (0..self.chart.dim())
            .map(|i| (self.apply_unchecked(&other.components[i]) - other.apply_unchecked(&self.components[i])).simplify())
            .collect();
        Ok(VectorField { chart: self.chart.clone(), components })
    }

    pub fn is_zero(&self, oracle: &Oracle) -> Result<Option<(usize, Witness)>, OracleError> {
        oracle.check_all(self.components.iter()).map(|(w, _)| w)
    }

    /// Renders as `{q1: expr, ...}` listing nonzero components.
    pub fn display(&self) -> String {
        let parts: Vec<String> = self
            .components
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_exactly_zero())
            .map(|(i, c)| format!("{}: {}", self.chart.coord_name(i), c.display(&self.chart)))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display())
    }
}

/// Alternating k-form with expression coefficients.
#[derive(Clone, PartialEq)]
pub struct KForm {
    chart: Arc<Chart>,
    degree: usize,
    coeffs: BTreeMap<Mask, Expr>,
}

impl KForm {
    pub fn zero(chart: &Arc<Chart>, degree: usize) -> KForm {
        KForm { chart: chart.clone(), degree, coeffs: BTreeMap::new() }
    }

    /// A function viewed as a 0-form.
    pub fn function(chart: &Arc<Chart>, f: Expr) -> Result<KForm, GeometryError> {
        KForm::from_terms(chart, 0, [(Vec::new(), f)])
    }

    /// The coordinate 1-form `dx_i`.
    pub fn basis(chart: &Arc<Chart>, index: usize) -> KForm {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(bit(index), Expr::one());
        KForm { chart: chart.clone(), degree: 1, coeffs }
    }

    /// Builds `Σ c · dx_{i1} ^ ... ^ dx_{ik}` from index lists in any order;
    /// each list is sorted with the matching sign, and repeated indices give
    /// zero.
    pub fn from_terms(
        chart: &Arc<Chart>,
        degree: usize,
        terms: impl IntoIterator<Item = (Vec<usize>, Expr)>,
    ) -> Result<KForm, GeometryError> {
        let mut acc = Accumulator::default();
        for (idx, c) in terms {
            if idx.len() != degree {
                return Err(GeometryError::Degree { expected: degree, found: idx.len() });
            }
            check_expr(chart, &c)?;
            let mut mask = 0;
            let mut parity = 0;
            for &i in &idx {
                if i >= chart.dim() {
                    return Err(ChartError::OutOfRange { index: i, dim: chart.dim() }.into());
                }
                if mask & bit(i) != 0 {
                    mask = Mask::MAX;
                    break;
                }
                // Moving dx_i past the larger indices already placed.
                parity += (mask >> i).count_ones();
                mask |= bit(i);
            }
            if mask != Mask::MAX {
                acc.push(mask, sign_of(parity), c);
            }
        }
        Ok(KForm { chart: chart.clone(), degree, coeffs: acc.finish() })
    }

    /// Builds from `(coordinate names, coefficient)` pairs.
    pub fn from_named<'a>(
        chart: &Arc<Chart>,
        degree: usize,
        terms: impl IntoIterator<Item = (Vec<&'a str>, Expr)>,
    ) -> Result<KForm, GeometryError> {
        let mut resolved = Vec::new();
        for (names, c) in terms {
            let idx = names.iter().map(|n| chart.coordinate(n)).collect::<Result<Vec<_>, _>>()?;
            resolved.push((idx, c));
        }
        KForm::from_terms(chart, degree, resolved)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Nonzero coefficients with their strictly increasing index lists.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, &Expr)> {
        self.coeffs.iter().map(|(m, c)| (indices(*m).collect(), c))
    }

    pub fn coefficients(&self) -> impl Iterator<Item = &Expr> {
        self.coeffs.values()
    }

    /// Coefficient on `dx_{i1} ^ ... ^ dx_{ik}` for increasing indices.
    pub fn coefficient(&self, idx: &[usize]) -> Expr {
        let mask = idx.iter().fold(0, |m, &i| m | bit(i));
        self.coeffs.get(&mask).cloned().unwrap_or_else(Expr::zero)
    }

    /// The function of a 0-form.
    pub fn as_function(&self) -> Option<Expr> {
        (self.degree == 0).then(|| self.coefficient(&[]))
    }

    pub fn is_exactly_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn same_shape(&self, other: &KForm) -> Result<(), GeometryError> {
        same_chart(&self.chart, &other.chart)?;
        if self.degree != other.degree {
            return Err(GeometryError::Degree { expected: self.degree, found: other.degree });
        }
        Ok(())
    }

    fn combine(&self, other: &KForm, negate_other: bool) -> Result<KForm, GeometryError> {
        self.same_shape(other)?;
        let mut acc = Accumulator::default();
        for (m, c) in &self.coeffs {
            acc.push(*m, false, c.clone());
        }
        for (m, c) in &other.coeffs {
            acc.push(*m, negate_other, c.clone());
        }
        Ok(KForm { chart: self.chart.clone(), degree: self.degree, coeffs: acc.finish() })
    }

    pub fn add(&self, other: &KForm) -> Result<KForm, GeometryError> {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &KForm) -> Result<KForm, GeometryError> {
        self.combine(other, true)
    }

    pub fn neg(&self) -> KForm {
        self.scale(&Expr::int(-1))
    }

    /// Multiplication by a function.
    pub fn scale(&self, f: &Expr) -> KForm {
        let mut acc = Accumulator::default();
        for (m, c) in &self.coeffs {
            acc.push(*m, false, f * c);
        }
        KForm { chart: self.chart.clone(), degree: self.degree, coeffs: acc.finish() }
    }

    /// Exterior product.
    pub fn wedge(&self, other: &KForm) -> Result<KForm, GeometryError> {
        same_chart(&self.chart, &other.chart)?;
        let mut acc = Accumulator::default();
        for (ma, ca) in &self.coeffs {
            for (mb, cb) in &other.coeffs {
                if ma & mb != 0 {
                    continue;
                }
                // Each index of `other` passes the larger indices of `self`.
                let parity: u32 = indices(*mb).map(|j| (ma >> j).count_ones()).sum();
                acc.push(ma | mb, sign_of(parity), ca * cb);
            }
        }
        Ok(KForm { chart: self.chart.clone(), degree: self.degree + other.degree, coeffs: acc.finish() })
    }

    /// Exterior derivative.
    pub fn d(&self) -> KForm {
        let mut acc = Accumulator::default();
        for (m, c) in &self.coeffs {
            for j in 0..self.chart.dim() {
                if m & bit(j) != 0 {
                    continue;
                }
                let dc = c.derivative(j);
                if !dc.is_exactly_zero() {
                    acc.push(m | bit(j), sign_of(rank_below(*m, j)), dc);
                }
            }
        }
        KForm { chart: self.chart.clone(), degree: self.degree + 1, coeffs: acc.finish() }
    }

    /// Interior product `ι_X`, inserting `X` in the first slot.
    pub fn interior(&self, x: &VectorField) -> Result<KForm, GeometryError> {
        same_chart(&self.chart, &x.chart)?;
        if self.degree == 0 {
            return Ok(KForm::zero(&self.chart, 0));
        }
        let mut acc = Accumulator::default();
        for (m, c) in &self.coeffs {
            for i in indices(*m) {
                let xi = &x.components[i];
                if xi.is_exactly_zero() {
                    continue;
                }
                acc.push(m & !bit(i), sign_of(rank_below(*m, i)), xi * c);
            }
        }
        Ok(KForm { chart: self.chart.clone(), degree: self.degree - 1, coeffs: acc.finish() })
    }

    /// Lie derivative by Cartan's formula `L_X = ι_X d + d ι_X`.
    pub fn lie_derivative(&self, x: &VectorField) -> Result<KForm, GeometryError> {
        same_chart(&self.chart, &x.chart)?;
        if self.degree == 0 {
            let f = x.apply_unchecked(&self.coefficient(&[]));
            return KForm::function(&self.chart, f);
        }
        self.d().interior(x)?.add(&self.interior(x)?.d())
    }

    /// Evaluates on vector fields: `a(V1, ..., Vk) = ι_{Vk} ... ι_{V1} a`.
    pub fn evaluate(&self, fields: &[&VectorField]) -> Result<Expr, GeometryError> {
        if fields.len() != self.degree {
            return Err(GeometryError::Degree { expected: self.degree, found: fields.len() });
        }
        let mut a = self.clone();
        for v in fields {
            a = a.interior(v)?;
        }
        Ok(a.coefficient(&[]))
    }

    pub fn is_zero(&self, oracle: &Oracle) -> Result<Option<(usize, Witness)>, OracleError> {
        oracle.check_all(self.coeffs.values()).map(|(w, _)| w)
    }

    /// Renders in the form-literal syntax, e.g. `q1*dq1^dp1 - dq2^dp2`.
    pub fn display(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.coeffs.iter().enumerate() {
            let basis: Vec<String> = indices(*m).map(|i| format!("d{}", self.chart.coord_name(i))).collect();
            let basis = basis.join("^");
            let negative = c.negative_coefficient();
            let shown = if negative { c.negated() } else { c.clone() };
            let text = shown.display(&self.chart).to_string();
            let sep = match (k, negative) {
                (0, false) => "",
                (0, true) => "-",
                (_, false) => " + ",
                (_, true) => " - ",
            };
            out.push_str(sep);
            let wrapped = if text.contains(' ') { format!("({text})") } else { text };
            match (basis.is_empty(), wrapped.as_str()) {
                (true, _) => out.push_str(&wrapped),
                (false, "1") => out.push_str(&basis),
                (false, _) => {
                    out.push_str(&wrapped);
                    out.push('*');
                    out.push_str(&basis);
                }
            }
        }
        out
    }
}

impl fmt::Debug for KForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-form {}", self.degree, self.display())
    }
}

pub fn wedge(a: &KForm, b: &KForm) -> Result<KForm, GeometryError> {
    a.wedge(b)
}

pub fn ext_d(a: &KForm) -> KForm {
    a.d()
}

pub fn interior(x: &VectorField, a: &KForm) -> Result<KForm, GeometryError> {
    a.interior(x)
}

pub fn lie_derivative(x: &VectorField, a: &KForm) -> Result<KForm, GeometryError> {
    a.lie_derivative(x)
}

pub fn vf_bracket(x: &VectorField, y: &VectorField) -> Result<VectorField, GeometryError> {
    x.bracket(y)
}

pub fn vf_apply(x: &VectorField, f: &Expr) -> Result<Expr, GeometryError> {
    x.apply(f)
}

/// `df` for a function `f`.
pub fn differential(chart: &Arc<Chart>, f: &Expr) -> Result<KForm, GeometryError> {
    Ok(KForm::function(chart, f.clone())?.d())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart() -> Arc<Chart> {
        Chart::new("m", ["q1", "p1", "q2"]).unwrap()
    }

    #[test]
    fn wedge_signs() {
        let c = chart();
        let dq1 = KForm::basis(&c, 0);
        let dp1 = KForm::basis(&c, 1);
        assert!(dq1.wedge(&dq1).unwrap().is_exactly_zero());
        let a = dp1.wedge(&dq1).unwrap();
        assert_eq!(a.coefficient(&[0, 1]).as_constant(), Expr::int(-1).as_constant());
        let from_terms = KForm::from_terms(&c, 2, [(vec![1, 0], Expr::one())]).unwrap();
        assert_eq!(a, from_terms);
    }

    #[test]
    fn contraction_of_basis() {
        let c = chart();
        let a = KForm::from_terms(&c, 2, [(vec![1, 0], Expr::one())]).unwrap();
        let x = VectorField::coordinate(&c, 1);
        assert_eq!(a.interior(&x).unwrap(), KForm::basis(&c, 0));
    }

    #[test]
    fn display_round_trips_through_parser() {
        let c = chart();
        let a = KForm::from_terms(
            &c,
            2,
            [(vec![0, 1], Expr::var(2) + Expr::int(1)), (vec![1, 2], Expr::int(-3)), (vec![0, 2], Expr::one())],
        )
        .unwrap();
        let text = a.display();
        assert_eq!(parse_form(&text, &c).unwrap(), a, "{text}");
    }
}
