//! Executes scenario checks and assembles reports.

use std::time::Instant;

use num::{BigRational, Zero};
use thiserror::Error;
use twisted_dirac::check::{zero_check, ZeroCheck};
use twisted_dirac::dirac::{
    check_image_under_d, check_poiss_brak_adm, check_symplgraph, check_theorem, is_admissible_pair, jacobi_defect,
    Admissibility, AdmissibilityReport,
};
use twisted_dirac::exterior::{parse_form_with, VectorField};
use twisted_dirac::liealg::{cartan_3form, contraction_kernel, same_span, LieAlgebraData};
use twisted_dirac::symexpr::{Expr, Witness};
use twisted_dirac::{GeometryError, LieError, OracleError};

use crate::report::{CheckResult, Point, Report, RunConfig, Verdict, WitnessOut};
use crate::scenario::{rational, vector_field, CheckSpec, Op, Prepared, ScenarioError};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Lie(#[from] LieError),
}

impl RunError {
    fn verdict(&self) -> Verdict {
        let oracle = match self {
            RunError::Oracle(e) | RunError::Geometry(GeometryError::Oracle(e)) => Some(e),
            _ => None,
        };
        match oracle {
            Some(OracleError::Inconclusive { .. } | OracleError::Singular { .. }) => Verdict::Inconclusive,
            _ => Verdict::Error,
        }
    }
}

/// Result of one check before timing is attached.
struct Outcome {
    verdict: Verdict,
    detail: Vec<String>,
    witness: Option<WitnessOut>,
    residual_max: Option<f64>,
}

impl Outcome {
    fn pass(detail: Vec<String>) -> Outcome {
        Outcome { verdict: Verdict::Pass, detail, witness: None, residual_max: None }
    }

    fn judged(ok: bool, detail: Vec<String>) -> Outcome {
        Outcome { verdict: if ok { Verdict::Pass } else { Verdict::Fail }, detail, witness: None, residual_max: None }
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn run(p: &Prepared) -> Report {
    let cfg = p.oracle.config();
    let checks = p.scenario.checks.iter().enumerate().map(|(i, c)| run_check(p, i, c)).collect();
    Report {
        version: env!("CARGO_PKG_VERSION").to_string(),
        scenario: p.scenario.name.clone(),
        seed: cfg.seed,
        config: RunConfig {
            samples: cfg.sample_count,
            abs_tol: cfg.abs_tol,
            rel_tol: cfg.rel_tol,
            function_degree: cfg.function_degree,
        },
        checks,
    }
}

fn run_check(p: &Prepared, index: usize, spec: &CheckSpec) -> CheckResult {
    let name = spec.name.clone().unwrap_or_else(|| default_name(index, &spec.op));
    let start = Instant::now();
    let outcome = execute(p, &spec.op).unwrap_or_else(|e| Outcome {
        verdict: e.verdict(),
        detail: vec![e.to_string()],
        witness: None,
        residual_max: None,
    });
    let ms = (start.elapsed().as_secs_f64() * 1e6).round() / 1e3;
    CheckResult {
        name,
        verdict: outcome.verdict,
        witness: outcome.witness,
        residual_max: outcome.residual_max,
        ms,
        detail: outcome.detail,
    }
}

fn default_name(index: usize, op: &Op) -> String {
    let s = match op {
        Op::PoissonBracket { f, g, .. } => format!("{{{f}, {g}}}"),
        Op::Hamiltonian { f, .. } => format!("X_{f}"),
        Op::CourantAdmissible { f, .. } => format!("{f} is Courant-admissible"),
        Op::HAdmissible { f, .. } => format!("{f} is H-admissible"),
        Op::PoissonAlgebra { f, g, k, .. } => format!("Poisson algebra closure for ({f}, {g}; {k})"),
        Op::JacobiDefect { f, g, k, .. } => format!("Jacobi defect for ({f}, {g}, {k})"),
        Op::GraphIdentity { f, .. } => format!("L_X h = i_X H for {f}"),
        Op::PoissonBracketAdmissible { f, g, .. } => format!("bracket of graph sections of {f}, {g}"),
        Op::Integrable { structure, .. } => format!("{structure} integrability"),
        Op::Nondegenerate { structure, .. } => format!("{structure} nondegeneracy"),
        Op::Zero { .. } => "identity".into(),
        Op::AdmissiblePair { section, .. } => format!("{section} is an admissible pair"),
        Op::ImageUnderD { .. } => "image under d".into(),
        Op::CartanAlternating { structure } => format!("{structure} Cartan 3-form alternating"),
        Op::ContractionKernel { structure, .. } => format!("{structure} contraction kernel"),
        Op::Contraction { l, m, n, .. } => format!("i_X{l} i_X{m} i_X{n} H_G"),
        Op::ContractionTable { structure } => format!("{structure} contraction table"),
    };
    format!("#{} {s}", index + 1)
}

fn witness_out(p: &Prepared, entry: &str, w: &Witness, failing: Option<&Expr>) -> WitnessOut {
    let point = Point(p.chart.coords().iter().cloned().zip(w.point.iter().copied()).collect());
    let reevaluated = failing.and_then(|e| p.oracle.reevaluate(e, &w.point).ok()).unwrap_or(f64::NAN);
    WitnessOut { entry: entry.to_string(), point, value: w.value, reevaluated }
}

fn from_checks(p: &Prepared, checks: &[ZeroCheck]) -> Outcome {
    let residual_max = checks.iter().map(|c| c.residual_max).fold(0.0, f64::max);
    let detail = checks.iter().map(|c| format!("{}: {}", c.label, if c.passed() { "zero" } else { "NONZERO" })).collect();
    let failure = checks.iter().find(|c| !c.passed());
    let witness = failure.and_then(|c| c.witness().map(|w| witness_out(p, &c.label, w, c.failing.as_ref())));
    Outcome {
        verdict: if failure.is_none() { Verdict::Pass } else { Verdict::Fail },
        detail,
        witness,
        residual_max: Some(residual_max),
    }
}

fn show(p: &Prepared, e: &Expr) -> String {
    e.display(&p.chart).to_string()
}

/// `"L3 ≡ q1*p2 - q2*p1"` when the value equals a named definition.
pub fn describe(p: &Prepared, value: &Expr) -> String {
    let text = show(p, value);
    if value.as_constant().is_some() {
        return text;
    }
    for (name, def) in &p.namespace.scalars {
        if (value - def).simplify().is_exactly_zero() {
            return format!("{name} ≡ {text}");
        }
    }
    text
}

fn admissibility_detail(p: &Prepared, r: &AdmissibilityReport) -> (Vec<String>, Option<WitnessOut>) {
    let mut detail = vec![format!("Courant-admissible: {}", yes(r.courant_admissible))];
    if let Some(x) = &r.hamiltonian {
        detail.push(format!("X_{} = {}", r.function, x.display()));
    }
    let (text, witness) = match &r.h_admissible {
        Admissibility::Admissible => ("yes".to_string(), None),
        Admissibility::NotAdmissible(w) => {
            ("no".to_string(), Some(witness_out(p, "i_{X_f} H", w, r.failing.as_ref())))
        }
        Admissibility::NoHamiltonian => ("no (no Hamiltonian vector field)".to_string(), None),
        Admissibility::Undetermined => ("undetermined (Hamiltonian field not unique)".to_string(), None),
    };
    detail.push(format!("H-admissible: {text}"));
    (detail, witness)
}

fn lie_value(v: &BigRational) -> String {
    v.to_string()
}

fn one_based(l: &LieAlgebraData, i: usize) -> Result<usize, RunError> {
    if i == 0 || i > l.dim() {
        return Err(LieError::IndexOutOfRange { index: i, dim: l.dim() }.into());
    }
    Ok(i - 1)
}

fn execute(p: &Prepared, op: &Op) -> Result<Outcome, RunError> {
    let o = &p.oracle;
    Ok(match op {
        Op::PoissonBracket { structure, f, g, expect } => {
            let d = p.graph(structure)?;
            let (fe, ge) = (p.expr(f, "f")?, p.expr(g, "g")?);
            let b = d.poisson_bracket(&fe, &ge)?;
            let detail = vec![format!("{{{f}, {g}}} = {}", describe(p, &b))];
            match expect {
                Some(e) => {
                    let residual = &b - &p.expr(e, "expect")?;
                    let mut out = from_checks(p, &[zero_check(o, format!("{{{f}, {g}}} - ({e})"), &residual)?]);
                    out.detail.splice(0..0, detail);
                    out
                }
                None => Outcome::pass(detail),
            }
        }
        Op::Hamiltonian { structure, f, expect } => {
            let d = p.graph(structure)?;
            let x = d.hamiltonian_vf(&p.expr(f, "f")?)?;
            let detail = vec![format!("X_{f} = {}", x.display())];
            match expect {
                Some(spec) => {
                    let expected = vector_field(spec, &p.namespace, &p.chart, "expect")?;
                    let mut out = from_checks(p, &[zero_check(o, format!("X_{f} - expected"), &x.sub(&expected)?)?]);
                    out.detail.splice(0..0, detail);
                    out
                }
                None => Outcome::pass(detail),
            }
        }
        Op::CourantAdmissible { structure, f, expect } => {
            let d = p.graph(structure)?;
            let x = d.is_courant_admissible(&p.expr(f, "f")?)?;
            let mut detail = vec![format!("Courant-admissible: {}", yes(x.is_some()))];
            if let Some(x) = &x {
                detail.push(format!("X_{f} = {}", x.display()));
            }
            Outcome::judged(expect.is_none_or(|e| e == x.is_some()), detail)
        }
        Op::HAdmissible { structure, f, expect } => {
            let d = p.graph(structure)?;
            let r = d.is_h_admissible(f, &p.expr(f, "f")?)?;
            let (detail, witness) = admissibility_detail(p, &r);
            let verdict = match (&r.h_admissible, expect) {
                (Admissibility::Undetermined, _) => Verdict::Inconclusive,
                (_, None) => Verdict::Pass,
                (a, Some(e)) if a.is_admissible() == *e => Verdict::Pass,
                _ => Verdict::Fail,
            };
            Outcome { verdict, detail, witness, residual_max: Some(r.residual_max) }
        }
        Op::PoissonAlgebra { structure, f, g, k } => {
            let d = p.graph(structure)?;
            let report = check_theorem(d, &p.expr(f, "f")?, &p.expr(g, "g")?, &p.expr(k, "k")?)?;
            from_checks(p, &report.checks)
        }
        Op::JacobiDefect { structure, f, g, k } => {
            let d = p.graph(structure)?;
            let (cyclic, twist) = jacobi_defect(d, &p.expr(f, "f")?, &p.expr(g, "g")?, &p.expr(k, "k")?)?;
            let mut out = from_checks(p, &[zero_check(o, "cyclic sum - H(X_f, X_g, X_k)", &(&cyclic - &twist))?]);
            out.detail.insert(0, format!("cyclic sum = {}", show(p, &cyclic)));
            out.detail.insert(1, format!("H(X_f, X_g, X_k) = {}", show(p, &twist)));
            out
        }
        Op::GraphIdentity { structure, f, expect_admissible } => {
            let d = p.graph(structure)?;
            let r = check_symplgraph(d, &p.expr(f, "f")?)?;
            let mut out = from_checks(p, std::slice::from_ref(&r.identity));
            let admissible = r.lie_derivative.passed();
            out.detail.push(format!("L_X h vanishes (H-admissible): {}", yes(admissible)));
            if let Some(e) = expect_admissible {
                if *e != admissible && out.verdict == Verdict::Pass {
                    out.verdict = Verdict::Fail;
                    out.witness = r.lie_derivative.witness().map(|w| witness_out(p, "L_X h", w, r.lie_derivative.failing.as_ref()));
                }
            }
            out
        }
        Op::PoissonBracketAdmissible { structure, f, g } => {
            let d = p.graph(structure)?;
            from_checks(p, &[check_poiss_brak_adm(d, &p.expr(f, "f")?, &p.expr(g, "g")?)?])
        }
        Op::Integrable { structure, expect } => {
            let d = p.graph(structure)?;
            let c = d.integrable();
            let mut out = Outcome::judged(c.passed() == *expect, vec![format!("dh - H vanishes: {}", yes(c.passed()))]);
            out.witness = c.witness().map(|w| witness_out(p, &c.label, w, c.failing.as_ref()));
            out
        }
        Op::Nondegenerate { structure, expect } => {
            let d = p.graph(structure)?;
            Outcome::judged(d.nondegenerate() == *expect, vec![format!("nondegenerate: {}", yes(d.nondegenerate()))])
        }
        Op::Zero { expr, form } => match (expr, form) {
            (Some(e), None) => from_checks(p, &[zero_check(o, e.clone(), &p.expr(e, "expr")?)?]),
            (None, Some(f)) => {
                let value = parse_form_with(f, &p.chart, &p.namespace)
                    .map_err(|source| ScenarioError::Parse { context: "form".into(), source })?;
                from_checks(p, &[zero_check(o, f.clone(), &value)?])
            }
            _ => return Err(ScenarioError::Invalid("zero check needs exactly one of \"expr\" or \"form\"".into()).into()),
        },
        Op::AdmissiblePair { structure, section, expect } => {
            let (twist, sections) = p.sections(structure)?;
            let s = sections
                .get(section)
                .ok_or_else(|| ScenarioError::Invalid(format!("unknown section {section:?} in {structure}")))?;
            let c = is_admissible_pair(s.vector(), s.form(), twist, o)?;
            let want = expect.unwrap_or(true);
            let mut out = from_checks(p, std::slice::from_ref(&c));
            out.verdict = if c.passed() == want { Verdict::Pass } else { Verdict::Fail };
            out
        }
        Op::ImageUnderD { structure, sections } => {
            let (twist, all) = p.sections(structure)?;
            let pairs = sections
                .iter()
                .map(|s| all.get(s).cloned().ok_or_else(|| ScenarioError::Invalid(format!("unknown section {s:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            from_checks(p, &check_image_under_d(&pairs, twist, o)?.checks)
        }
        Op::CartanAlternating { structure } => {
            let l = p.lie(structure)?;
            match cartan_3form(l) {
                Ok(h) => Outcome::pass(vec![format!("alternating; identically zero: {}", yes(h.is_zero()))]),
                Err(e @ LieError::NotInvariant { .. }) => Outcome::judged(false, vec![e.to_string()]),
                Err(e) => return Err(e.into()),
            }
        }
        Op::ContractionKernel { structure, expect_dim } => {
            let l = p.lie(structure)?;
            let kernel = contraction_kernel(l)?;
            let equals_center = same_span(&kernel, &l.center());
            let mut detail = vec![
                format!("kernel dimension {} of {}", kernel.len(), l.dim()),
                format!("kernel equals center: {}", yes(equals_center)),
            ];
            for v in &kernel {
                detail.push(format!("basis vector ({})", v.iter().map(lie_value).collect::<Vec<_>>().join(", ")));
            }
            Outcome::judged(equals_center && expect_dim.is_none_or(|d| d == kernel.len()), detail)
        }
        Op::Contraction { structure, l, m, n, expect, nonzero, quoted_value } => {
            let alg = p.lie(structure)?;
            let h = cartan_3form(alg)?;
            let v = h.contraction(one_based(alg, *l)?, one_based(alg, *m)?, one_based(alg, *n)?).clone();
            let mut detail = vec![format!("i_X{l} i_X{m} i_X{n} H_G = {}", lie_value(&v))];
            if let Some(pv) = quoted_value {
                let pv_q = rational(pv)?;
                let note = if pv_q == v { "agrees" } else { "differs; reported, not asserted" };
                detail.push(format!("quoted value {pv}: {note}"));
            }
            let mut ok = true;
            if let Some(e) = expect {
                ok &= rational(e)? == v;
            }
            if let Some(nz) = nonzero {
                ok &= *nz == !v.is_zero();
            }
            Outcome::judged(ok, detail)
        }
        Op::ContractionTable { structure } => {
            let l = p.lie(structure)?;
            let h = cartan_3form(l)?;
            let d = l.dim();
            let mut detail = Vec::new();
            for i in 0..d {
                for j in i + 1..d {
                    for k in j + 1..d {
                        detail.push(format!("({}, {}, {}): {}", i + 1, j + 1, k + 1, lie_value(h.contraction(i, j, k))));
                    }
                }
            }
            Outcome::pass(detail)
        }
    })
}

/// Output of the `bracket` command.
pub fn bracket_lines(p: &Prepared, structure: Option<&str>, f: &str, g: &str) -> Result<Vec<String>, RunError> {
    let d = match structure {
        Some(s) => p.graph(s)?,
        None => p.default_graph()?.1,
    };
    let (fe, ge) = (p.expr(f, "f")?, p.expr(g, "g")?);
    let xs: Vec<VectorField> = vec![d.hamiltonian_vf(&fe)?, d.hamiltonian_vf(&ge)?];
    let b = xs[0].apply(&ge)?;
    Ok(vec![
        format!("{{{f}, {g}}} = {}", describe(p, &b)),
        format!("X_{f} = {}", xs[0].display()),
        format!("X_{g} = {}", xs[1].display()),
    ])
}

/// Output of the `admissible` command, with the verdict as a check result.
pub fn admissible_lines(p: &Prepared, structure: Option<&str>, f: &str) -> Result<(Vec<String>, Verdict), RunError> {
    let d = match structure {
        Some(s) => p.graph(s)?,
        None => p.default_graph()?.1,
    };
    let r = d.is_h_admissible(f, &p.expr(f, "f")?)?;
    let (mut lines, witness) = admissibility_detail(p, &r);
    if let Some(w) = witness {
        let point: Vec<String> = w.point.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        lines.push(format!("witness: ({}) value {:e}", point.join(", "), w.value));
    }
    let verdict = match r.h_admissible {
        Admissibility::Admissible => Verdict::Pass,
        Admissibility::Undetermined => Verdict::Inconclusive,
        _ => Verdict::Fail,
    };
    Ok((lines, verdict))
}

