mod common;

use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twisted_dirac::dirac::{
    check_image_under_d, check_poiss_brak_adm, check_symplgraph, check_theorem, is_admissible_pair, jacobi_defect,
};
use twisted_dirac::dirac::{Admissibility, SignConvention, TwistedGraph};
use twisted_dirac::exterior::{differential, KForm, VectorField};
use twisted_dirac::random;
use twisted_dirac::symexpr::{Chart, Expr};
use twisted_dirac::GeometryError;

fn untwisted() -> TwistedGraph {
    let c = phase_space();
    TwistedGraph::new(omega(&c), KForm::zero(&c, 3), SignConvention::Plus, oracle(&c)).unwrap()
}

fn scaled() -> TwistedGraph {
    let c = phase_space();
    let h = omega(&c).scale(&expr("1 + q1", &c));
    TwistedGraph::with_exact_twist(h, SignConvention::Plus, oracle(&c)).unwrap()
}

#[test]
fn graph_section_of_coordinate_field() {
    let d = untwisted();
    let c = d.chart().clone();
    let s = d.graph_section(&VectorField::coordinate(&c, 3)).unwrap();
    assert_eq!(s.form(), &form("dq1", &c));
    assert!(d.graph_section(&VectorField::zero(&c)).unwrap().is_exactly_zero());
}

#[test]
fn angular_momentum_field_and_table() {
    let d = untwisted();
    let c = d.chart().clone();
    let l1 = expr("q2*p3 - q3*p2", &c);
    let l2 = expr("q3*p1 - q1*p3", &c);
    let l3 = expr("q1*p2 - q2*p1", &c);
    let x = d.hamiltonian_vf(&l1).unwrap();
    // Solved by hand from dL1 = ι_X ω with ω = Σ dp_i ^ dq_i.
    let expected = [("q2", "q3"), ("q3", "-q2"), ("p2", "p3"), ("p3", "-p2")];
    let expected = VectorField::from_named(&c, expected.iter().map(|(n, e)| (*n, expr(e, &c)))).unwrap();
    assert_eq!(x, expected);
    let o = d.oracle();
    for (f, g, k) in [(&l1, &l2, &l3), (&l2, &l3, &l1), (&l3, &l1, &l2)] {
        let b = d.poisson_bracket(f, g).unwrap();
        assert!((&b - k).simplify().is_exactly_zero());
        assert_zero(o, &(&b - k));
    }
    assert!(d.poisson_bracket(&expr("q1", &c), &expr("q2", &c)).unwrap().is_exactly_zero());
    assert!(d.poisson_bracket(&l1, &l1).unwrap().is_exactly_zero());
}

#[test]
fn scaled_form_divides_hamiltonian_field() {
    let d = scaled();
    let c = d.chart().clone();
    let flat = untwisted();
    let f = expr("q2*p1 + p3^2", &c);
    let x = d.hamiltonian_vf(&f).unwrap();
    let expected = flat.hamiltonian_vf(&f).unwrap().scale(&expr("1/(1 + q1)", &c));
    assert!(x.sub(&expected).unwrap().is_zero(d.oracle()).unwrap().is_none());
}

#[test]
fn constants_and_courant_admissibility() {
    let d = untwisted();
    let c = d.chart().clone();
    let x = d.is_courant_admissible(&Expr::int(7)).unwrap().unwrap();
    assert!(x.is_exactly_zero());
    assert!(d.is_h_admissible("c", &Expr::int(7)).unwrap().h_admissible.is_admissible());

    let degenerate_chart = Chart::new("m", ["q1", "q2", "p1", "p2"]).unwrap();
    let h = form("q1*dp1^dq1", &degenerate_chart);
    let dg = TwistedGraph::new(h, KForm::zero(&degenerate_chart, 3), SignConvention::Plus, oracle(&degenerate_chart));
    let dg = dg.unwrap();
    assert!(!dg.nondegenerate());
    assert!(dg.is_courant_admissible(&expr("p2", &degenerate_chart)).unwrap().is_none());
    let r = dg.is_h_admissible("p2", &expr("p2", &degenerate_chart)).unwrap();
    assert_eq!(r.h_admissible, Admissibility::NoHamiltonian);
    assert!(!r.courant_admissible);
    assert!(matches!(dg.hamiltonian_vf(&expr("p2", &degenerate_chart)), Err(GeometryError::Degenerate)));
    let _ = c;
}

#[test]
fn momentum_is_not_admissible_under_volume_twist() {
    let c = phase_space();
    let twist = form("dq1^dq2^dq3", &c);
    let d = TwistedGraph::new(omega(&c), twist, SignConvention::Plus, oracle(&c)).unwrap();
    assert!(!d.integrable().passed());
    let x = d.hamiltonian_vf(&expr("p1", &c)).unwrap();
    assert_eq!(x, VectorField::coordinate(&c, 0).neg());
    let r = d.is_h_admissible("p1", &expr("p1", &c)).unwrap();
    assert!(r.courant_admissible);
    let Admissibility::NotAdmissible(w) = &r.h_admissible else { panic!("expected a witness") };
    let failing = r.failing.as_ref().unwrap();
    let again = d.oracle().reevaluate(failing, &w.point).unwrap();
    assert_eq!(again, w.value);
    assert!(d.is_h_admissible("q1", &expr("q1", &c)).unwrap().h_admissible.is_admissible());
}

#[test]
fn admissible_pair_examples() {
    let c = Chart::new("m", ["q1", "q2", "q3", "q4"]).unwrap();
    let o = oracle(&c);
    let twist = form("dq1^dq2^dq3", &c);
    let closed = form("d(q1*q4^2)", &c);
    assert!(is_admissible_pair(&VectorField::coordinate(&c, 3), &closed, &twist, &o).unwrap().passed());
    assert!(is_admissible_pair(&VectorField::zero(&c), &closed, &twist, &o).unwrap().passed());
    assert!(!is_admissible_pair(&VectorField::coordinate(&c, 0), &closed, &twist, &o).unwrap().passed());

    // Level 1: h symplectic, α = f, X with df + ι_X h = 0.
    let p = Chart::new("plane", ["q", "p"]).unwrap();
    let h = form("dp^dq", &p);
    let f = expr("q^2*p", &p);
    let x = VectorField::from_named(&p, [("p", expr("-2*q*p", &p)), ("q", expr("q^2", &p))]).unwrap();
    let alpha = KForm::function(&p, f).unwrap();
    assert!(is_admissible_pair(&x, &alpha, &h, &oracle(&p)).unwrap().passed());
}

#[test]
fn non_closed_twist_rejected() {
    let c = phase_space();
    let twist = form("q1*dq2^dq3^dp1", &c);
    let err = TwistedGraph::new(omega(&c), twist, SignConvention::Plus, oracle(&c)).unwrap_err();
    assert!(matches!(err, GeometryError::NotClosed));
}

#[test]
fn jacobi_defect_matches_twist() {
    let d = scaled();
    let c = d.chart().clone();
    let (cyclic, twist) = jacobi_defect(&d, &expr("p1", &c), &expr("q2", &c), &expr("p2", &c)).unwrap();
    assert_zero(d.oracle(), &(&cyclic - &twist));
    assert!(!cyclic.is_exactly_zero());

    let flat = untwisted();
    let (cyclic, twist) =
        jacobi_defect(&flat, &expr("q1*p2", &c), &expr("p1^2*q3", &c), &expr("q2*q3 + p3", &c)).unwrap();
    assert!(cyclic.is_exactly_zero() && twist.is_exactly_zero());
}

#[test]
fn theorem_checks_on_examples() {
    let d = untwisted();
    let c = d.chart().clone();
    for (f, g, k) in [
        ("2", "3", "q1"),
        ("q1", "p1", "q2*p2"),
        ("q2*p3 - q3*p2", "q3*p1 - q1*p3", "q1*p2 - q2*p1"),
    ] {
        let report = check_theorem(&d, &expr(f, &c), &expr(g, &c), &expr(k, &c)).unwrap();
        assert!(report.passed(), "{f}, {g}: {:?}", report.first_failure().map(|c| &c.label));
        let r = check_poiss_brak_adm(&d, &expr(f, &c), &expr(g, &c)).unwrap();
        assert!(r.passed());
    }
    assert!(check_poiss_brak_adm(&d, &expr("q1*p2", &c), &expr("q1*p2", &c)).unwrap().passed());
}

#[test]
fn symplectic_graph_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for d in [untwisted(), scaled()] {
        let f = random::poly_all(&mut rng, 6, 3);
        let r = check_symplgraph(&d, &f).unwrap();
        assert!(r.identity.passed());
        let r = check_symplgraph(&d, &Expr::int(4)).unwrap();
        assert!(r.lie_derivative.passed());
    }
    let d = untwisted();
    let r = check_symplgraph(&d, &expr("q1*p2^2", d.chart())).unwrap();
    assert!(r.lie_derivative.passed());
}

#[test]
fn image_under_d_examples() {
    let c = Chart::new("m", ["q1", "q2", "q3", "y1", "y2"]).unwrap();
    let o = oracle(&c);
    let zero = KForm::zero(&c, 3);
    let a = twisted_dirac::courant::GenSection::pair(VectorField::coordinate(&c, 3), form("d(q1*y1)", &c)).unwrap();
    let b = twisted_dirac::courant::GenSection::pair(VectorField::coordinate(&c, 4), form("d(q2^2)", &c)).unwrap();
    assert!(check_image_under_d(&[a.clone(), b.clone()], &zero, &o).unwrap().passed());

    let twist = random::volume_twist(&c, 2);
    assert!(check_image_under_d(&[a, b], &twist, &o).unwrap().passed());

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pairs: Vec<_> = (0..3).map(|_| random::isotropic_admissible_pair(&mut rng, &c, 2, 2)).collect();
    let report = check_image_under_d(&pairs, &twist, &o).unwrap();
    assert!(report.passed(), "{:?}", report.first_failure().map(|c| &c.label));
}

#[test]
fn sign_convention_negates_brackets_only() {
    let c = phase_space();
    let h = omega(&c).scale(&expr("1 + q1", &c));
    let plus = TwistedGraph::with_exact_twist(h.clone(), SignConvention::Plus, oracle(&c)).unwrap();
    let minus = TwistedGraph::with_exact_twist(h, SignConvention::Minus, oracle(&c)).unwrap();
    let (f, g) = (expr("q1*p2 + q3", &c), expr("p1^2 - q2", &c));
    let sum = &plus.poisson_bracket(&f, &g).unwrap() + &minus.poisson_bracket(&f, &g).unwrap();
    assert_zero(plus.oracle(), &sum);
    for fun in [&f, &expr("q2", &c)] {
        let a = plus.is_h_admissible("f", fun).unwrap().h_admissible.is_admissible();
        let b = minus.is_h_admissible("f", fun).unwrap().h_admissible.is_admissible();
        assert_eq!(a, b);
    }
    let x = minus.hamiltonian_vf(&f).unwrap();
    let residual = differential(&c, &f).unwrap().add(&h_interior(&minus, &x)).unwrap();
    assert!(residual.is_zero(minus.oracle()).unwrap().is_none());
}

fn h_interior(d: &TwistedGraph, x: &VectorField) -> KForm {
    d.h().interior(x).unwrap()
}

#[test]
fn conformal_example_reports_verdicts() {
    let c = phase_space();
    let phi = expr("1/2*(p1^2 + p2^2 + p3^2) + V((q1^2 + q2^2 + q3^2)^(1/2))", &c);
    let h = omega(&c).scale(&phi);
    let d = TwistedGraph::with_exact_twist(h, SignConvention::Plus, oracle(&c)).unwrap();
    assert!(d.nondegenerate());
    for l in ["q2*p3 - q3*p2", "q3*p1 - q1*p3", "q1*p2 - q2*p1"] {
        let r = d.is_h_admissible(l, &expr(l, &c)).unwrap();
        assert!(r.courant_admissible);
        // ι_{X_L} (dφ ^ ω) keeps the term -φ^{-1} dφ ^ dL, which does not vanish.
        let Admissibility::NotAdmissible(w) = &r.h_admissible else { panic!("{l}: {:?}", r.h_admissible) };
        let again = d.oracle().reevaluate(r.failing.as_ref().unwrap(), &w.point).unwrap();
        assert_eq!(again, w.value);
    }
}
