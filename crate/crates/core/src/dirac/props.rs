//! Executable forms of the propositions about twisted graphs and admissible
//! pairs. Each returns named residuals rather than a bare boolean so that a
//! failure comes with the entry and the point where it is nonzero.

use crate::check::{zero_check, CheckReport, ZeroCheck};
use crate::courant::{courant_bracket_n, pairing, twisted_courant_bracket, GenSection};
use crate::error::GeometryError;
use crate::exterior::{differential, KForm, VectorField};
use crate::symexpr::{Expr, Oracle};

use super::TwistedGraph;

/// Zero test on `dα + ι_X H`.
pub fn is_admissible_pair(x: &VectorField, alpha: &KForm, twist: &KForm, oracle: &Oracle) -> Result<ZeroCheck, GeometryError> {
    if twist.degree() != alpha.degree() + 2 {
        return Err(GeometryError::Degree { expected: alpha.degree() + 2, found: twist.degree() });
    }
    let residual = alpha.d().add(&twist.interior(x)?)?;
    Ok(zero_check(oracle, "d(alpha) + i_X H", &residual)?)
}

/// `({f,{g,k}} + {g,{k,f}} + {k,{f,g}}, H(X_f, X_g, X_k))`.
pub fn jacobi_defect(d: &TwistedGraph, f: &Expr, g: &Expr, k: &Expr) -> Result<(Expr, Expr), GeometryError> {
    let xs = d.fields(&[f, g, k])?;
    let (xf, xg, xk) = (&xs[0], &xs[1], &xs[2]);
    let gk = xg.apply(k)?;
    let kf = xk.apply(f)?;
    let fg = xf.apply(g)?;
    let cyclic = Expr::sum([xf.apply(&gk)?, xg.apply(&kf)?, xk.apply(&fg)?]).simplify();
    let twist = d.effective_twist().evaluate(&[xf, xg, xk])?;
    Ok((cyclic, twist))
}

fn h_admissible_check(d: &TwistedGraph, label: &str, x: &VectorField) -> Result<ZeroCheck, GeometryError> {
    Ok(zero_check(d.oracle(), label, &d.effective_twist().interior(x)?)?)
}

/// Closure of the H-admissible functions under product and bracket, with
/// the expected Hamiltonian fields, antisymmetry and the Leibniz rule for
/// the supplied `k`.
pub fn check_theorem(d: &TwistedGraph, f: &Expr, g: &Expr, k: &Expr) -> Result<CheckReport, GeometryError> {
    let oracle = d.oracle();
    let xs = d.fields(&[f, g, k])?;
    let (xf, xg) = (&xs[0], &xs[1]);
    let mut report = CheckReport::new();
    report.push(h_admissible_check(d, "f is H-admissible", xf)?);
    report.push(h_admissible_check(d, "g is H-admissible", xg)?);

    let fg = (f * g).simplify();
    let x_fg = d.hamiltonian_vf(&fg)?;
    report.push(h_admissible_check(d, "fg is H-admissible", &x_fg)?);
    let expected = xf.scale(g).add(&xg.scale(f))?;
    report.push(zero_check(oracle, "X_fg - (g X_f + f X_g)", &x_fg.sub(&expected)?)?);

    let bracket = xf.apply(g)?;
    let x_br = d.hamiltonian_vf(&bracket)?;
    report.push(h_admissible_check(d, "{f,g} is H-admissible", &x_br)?);
    report.push(zero_check(oracle, "X_{f,g} - [X_f, X_g]", &x_br.sub(&xf.bracket(xg)?)?)?);

    let reverse = xg.apply(f)?;
    report.push(zero_check(oracle, "{f,g} + {g,f}", &(&bracket + &reverse))?);

    let xk = &xs[2];
    let lhs = x_fg.apply(k)?;
    let fk = xf.apply(k)?;
    let gk = xg.apply(k)?;
    let leibniz = lhs - g * &fk - f * &gk;
    report.push(zero_check(oracle, "{fg,k} - g{f,k} - f{g,k}", &leibniz)?);
    // Antisymmetry against k as well, so every supplied function is used.
    let kf = xk.apply(f)?;
    report.push(zero_check(oracle, "{f,k} + {k,f}", &(&fk + &kf))?);
    Ok(report)
}

/// Result of the symplectic-graph proposition for one function.
#[derive(Clone, Debug)]
pub struct SymplGraphReport {
    /// `L_{X_f} h - ι_{X_f} H`, which vanishes on integrable graphs.
    pub identity: ZeroCheck,
    /// `L_{X_f} h`; its vanishing is the H-admissibility verdict.
    pub lie_derivative: ZeroCheck,
}

pub fn check_symplgraph(d: &TwistedGraph, f: &Expr) -> Result<SymplGraphReport, GeometryError> {
    let x = d.hamiltonian_vf(f)?;
    let lie = d.effective_h().lie_derivative(&x)?;
    let contraction = d.effective_twist().interior(&x)?;
    Ok(SymplGraphReport {
        identity: zero_check(d.oracle(), "L_X h - i_X H", &lie.sub(&contraction)?)?,
        lie_derivative: zero_check(d.oracle(), "L_X h", &lie)?,
    })
}

/// For admissible pairs `(X, α)`, the images `(X, dα)` are isotropic and
/// close under the untwisted bracket as `([X,Y], -ι_{[X,Y]} H)`.
///
/// Admissibility of each pair and vanishing of the mutual pairings are
/// reported as precondition entries.
pub fn check_image_under_d(pairs: &[GenSection], twist: &KForm, oracle: &Oracle) -> Result<CheckReport, GeometryError> {
    let mut report = CheckReport::new();
    for (i, p) in pairs.iter().enumerate() {
        let mut c = is_admissible_pair(p.vector(), p.form(), twist, oracle)?;
        c.label = format!("precondition: pair {i} admissible");
        report.push(c);
    }
    for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            let (a, b) = (&pairs[i], &pairs[j]);
            report.push(zero_check(oracle, format!("precondition: pairing ({i},{j})"), &pairing(a, b)?)?);
            let da = GenSection::new(a.level() + 1, a.vector().clone(), a.form().d())?;
            let db = GenSection::new(b.level() + 1, b.vector().clone(), b.form().d())?;
            report.push(zero_check(oracle, format!("pairing of images ({i},{j})"), &pairing(&da, &db)?)?);
            let bracket = courant_bracket_n(&da, &db)?;
            let xy = a.vector().bracket(b.vector())?;
            let expected = GenSection::new(a.level() + 1, xy.clone(), twist.interior(&xy)?.neg())?;
            report.push(zero_check(oracle, format!("bracket of images ({i},{j})"), &bracket.sub(&expected)?)?);
        }
    }
    Ok(report)
}

/// `[(X_f, df), (X_g, dg)]_H - ([X_f, X_g], d{f,g})`.
pub fn check_poiss_brak_adm(d: &TwistedGraph, f: &Expr, g: &Expr) -> Result<ZeroCheck, GeometryError> {
    let chart = d.chart();
    let xs = d.fields(&[f, g])?;
    let a = GenSection::pair(xs[0].clone(), differential(chart, f)?)?;
    let b = GenSection::pair(xs[1].clone(), differential(chart, g)?)?;
    let lhs = twisted_courant_bracket(&a, &b, d.effective_twist())?;
    let bracket = xs[0].apply(g)?;
    let rhs = GenSection::pair(xs[0].bracket(&xs[1])?, differential(chart, &bracket)?)?;
    Ok(zero_check(d.oracle(), "[(X_f,df),(X_g,dg)]_H - ([X_f,X_g], d{f,g})", &lhs.sub(&rhs)?)?)
}
