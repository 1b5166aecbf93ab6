mod common;

use std::sync::Arc;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twisted_dirac::exterior::{differential, parse_form, KForm, VectorField};
use twisted_dirac::random;
use twisted_dirac::symexpr::{eval, Chart, Expr, FuncEnv, Oracle, OracleConfig};

fn small_chart() -> Arc<Chart> {
    Chart::new("m", ["q1", "p1", "q2", "p2"]).unwrap()
}

fn zero(o: &Oracle, f: &KForm) -> bool {
    f.is_zero(o).unwrap().is_none()
}

#[test]
fn wedge_examples() {
    let c = phase_space();
    let dq1 = form("dq1", &c);
    assert!(dq1.wedge(&dq1).unwrap().is_exactly_zero());
    assert_eq!(form("dp1", &c).wedge(&dq1).unwrap(), form("dq1^dp1", &c).neg());

    // Chart order (q1, p1, q2): dp1 ^ dq2 is already increasing.
    let m = Chart::new("m", ["q1", "p1", "q2"]).unwrap();
    let w = form("q1*dq1", &m).wedge(&form("dp1^dq2", &m)).unwrap();
    assert_eq!(w.coefficient(&[0, 1, 2]), expr("q1", &m));
    let swapped = form("q1*dq1", &m).wedge(&form("dq2^dp1", &m)).unwrap();
    assert_eq!(swapped.coefficient(&[0, 1, 2]), expr("-q1", &m));
}

#[test]
fn exterior_derivative_examples() {
    let c = phase_space();
    assert_eq!(KForm::function(&c, expr("q1*p1", &c)).unwrap().d(), form("p1*dq1 + q1*dp1", &c));
    let phi = expr("1/2*(p1^2 + p2^2 + p3^2) + V((q1^2 + q2^2 + q3^2)^(1/2))", &c);
    let dphi = differential(&c, &phi).unwrap();
    let r = "(q1^2 + q2^2 + q3^2)^(1/2)";
    let expected = parse_form(
        &format!("p1*dp1 + p2*dp2 + p3*dp3 + V_d1({r})*(q1*dq1 + q2*dq2 + q3*dq3)/{r}"),
        &c,
    )
    .unwrap();
    assert!(zero(&oracle(&c), &dphi.sub(&expected).unwrap()));
}

#[test]
fn interior_examples() {
    let c = phase_space();
    let dp1 = VectorField::coordinate(&c, 3);
    assert_eq!(form("dp1^dq1", &c).interior(&dp1).unwrap(), form("dq1", &c));
    let vol = form("dq1^dq2^dq3", &c);
    let once = vol.interior(&VectorField::coordinate(&c, 0)).unwrap();
    assert_eq!(once.interior(&VectorField::coordinate(&c, 1)).unwrap(), form("dq3", &c));
    let fields = [&VectorField::coordinate(&c, 0), &VectorField::coordinate(&c, 1), &VectorField::coordinate(&c, 2)];
    assert_eq!(vol.evaluate(&fields).unwrap(), Expr::one());
}

#[test]
fn lie_derivative_examples() {
    let c = phase_space();
    let dq1 = VectorField::coordinate(&c, 0);
    assert_eq!(form("q1*dq2", &c).lie_derivative(&dq1).unwrap(), form("dq2", &c));
    assert!(omega(&c).lie_derivative(&VectorField::coordinate(&c, 3)).unwrap().is_exactly_zero());
    let f = expr("q1^2*p2", &c);
    assert_eq!(KForm::function(&c, f.clone()).unwrap().lie_derivative(&dq1).unwrap().as_function().unwrap(), expr("2*q1*p2", &c));
}

#[test]
fn bracket_and_apply_examples() {
    let c = phase_space();
    let (d1, d2) = (VectorField::coordinate(&c, 0), VectorField::coordinate(&c, 1));
    assert!(d1.bracket(&d2).unwrap().is_exactly_zero());
    let x = d2.scale(&expr("q1", &c));
    assert_eq!(x.bracket(&d1).unwrap(), d2.neg());
    assert_eq!(d1.apply(&expr("q1^2", &c)).unwrap(), expr("2*q1", &c));
    assert!(d1.apply(&Expr::int(5)).unwrap().is_exactly_zero());
    let y = VectorField::coordinate(&c, 2).scale(&expr("q2", &c));
    assert_eq!(y.apply(&expr("q3*p1", &c)).unwrap(), expr("q2*p1", &c));
}

#[test]
fn conformal_twist_coefficient() {
    let c = phase_space();
    let phi = expr("1/2*(p1^2 + p2^2 + p3^2)", &c);
    let l1 = expr("q2*p3 - q3*p2", &c);
    let w = differential(&c, &phi).unwrap().wedge(&differential(&c, &l1).unwrap()).unwrap();
    // dp1 ^ dq2 = -(dq2 ^ dp1); the stored coefficient is on dq2 ^ dp1.
    let coeff = (-w.coefficient(&[1, 3])).simplify();
    // By hand: p1 dp1 ^ p3 dq2 gives p1*p3, which vanishes at (1,0,0,0,1,0).
    assert_eq!(coeff, expr("p1*p3", &c));
    assert_eq!(eval(&coeff, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0], &FuncEnv::new()).unwrap(), 0.0);
    let v = oracle(&c).is_zero(&coeff).unwrap();
    let wit = v.witness().expect("nonzero");
    assert!(wit.value.abs() > 0.0);
}

#[test]
fn display_round_trips() {
    let c = small_chart();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let o = oracle(&c);
    for k in 0..=4 {
        let f = random::form(&mut rng, &c, k, 2);
        let back = parse_form(&f.display(), &c).unwrap();
        if f.is_exactly_zero() {
            assert!(back.is_exactly_zero());
            continue;
        }
        assert!(zero(&o, &back.sub(&f).unwrap()), "{}", f.display());
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn d_squared_vanishes(seed in any::<u64>(), k in 0usize..=3) {
        let c = small_chart();
        let mut r = rng(seed);
        let a = random::form(&mut r, &c, k, 3);
        prop_assert!(a.d().d().is_exactly_zero());
        prop_assert!(zero(&oracle(&c), &a.d().d()));
    }

    #[test]
    fn wedge_graded_commutative(seed in any::<u64>(), k in 0usize..=2, l in 0usize..=2) {
        let c = small_chart();
        let mut r = rng(seed);
        let (a, b) = (random::form(&mut r, &c, k, 2), random::form(&mut r, &c, l, 2));
        let sign = if (k * l) % 2 == 0 { Expr::one() } else { Expr::int(-1) };
        let diff = a.wedge(&b).unwrap().sub(&b.wedge(&a).unwrap().scale(&sign)).unwrap();
        prop_assert!(zero(&oracle(&c), &diff));
    }

    #[test]
    fn wedge_associative(seed in any::<u64>()) {
        let c = small_chart();
        let mut r = rng(seed);
        let (a, b, e) = (random::form(&mut r, &c, 1, 1), random::form(&mut r, &c, 1, 1), random::form(&mut r, &c, 2, 1));
        let lhs = a.wedge(&b).unwrap().wedge(&e).unwrap();
        let rhs = a.wedge(&b.wedge(&e).unwrap()).unwrap();
        prop_assert!(zero(&oracle(&c), &lhs.sub(&rhs).unwrap()));
    }

    #[test]
    fn d_is_graded_leibniz(seed in any::<u64>(), k in 0usize..=2) {
        let c = small_chart();
        let mut r = rng(seed);
        let (a, b) = (random::form(&mut r, &c, k, 2), random::form(&mut r, &c, 1, 2));
        let sign = if k % 2 == 0 { Expr::one() } else { Expr::int(-1) };
        let rhs = a.d().wedge(&b).unwrap().add(&a.wedge(&b.d()).unwrap().scale(&sign)).unwrap();
        prop_assert!(zero(&oracle(&c), &a.wedge(&b).unwrap().d().sub(&rhs).unwrap()));
    }

    #[test]
    fn interior_is_antiderivation(seed in any::<u64>(), k in 1usize..=2) {
        let c = small_chart();
        let mut r = rng(seed);
        let x = random::vector_field(&mut r, &c, 2);
        let (a, b) = (random::form(&mut r, &c, k, 2), random::form(&mut r, &c, 1, 2));
        let sign = if k % 2 == 0 { Expr::one() } else { Expr::int(-1) };
        let lhs = a.wedge(&b).unwrap().interior(&x).unwrap();
        let rhs = a.interior(&x).unwrap().wedge(&b).unwrap().add(&a.wedge(&b.interior(&x).unwrap()).unwrap().scale(&sign)).unwrap();
        prop_assert!(zero(&oracle(&c), &lhs.sub(&rhs).unwrap()));
        prop_assert!(a.interior(&x).unwrap().interior(&x).unwrap().is_exactly_zero());
    }

    #[test]
    fn lie_derivative_is_derivation_and_commutes_with_d(seed in any::<u64>(), k in 0usize..=2) {
        let c = small_chart();
        let o = oracle(&c);
        let mut r = rng(seed);
        let x = random::vector_field(&mut r, &c, 2);
        let (a, b) = (random::form(&mut r, &c, k, 2), random::form(&mut r, &c, 1, 2));
        let lhs = a.wedge(&b).unwrap().lie_derivative(&x).unwrap();
        let rhs = a.lie_derivative(&x).unwrap().wedge(&b).unwrap().add(&a.wedge(&b.lie_derivative(&x).unwrap()).unwrap()).unwrap();
        prop_assert!(zero(&o, &lhs.sub(&rhs).unwrap()));
        let comm = a.d().lie_derivative(&x).unwrap().sub(&a.lie_derivative(&x).unwrap().d()).unwrap();
        prop_assert!(zero(&o, &comm));
    }

    #[test]
    fn contraction_with_bracket(seed in any::<u64>(), k in 1usize..=3) {
        let c = small_chart();
        let mut r = rng(seed);
        let (x, y) = (random::vector_field(&mut r, &c, 2), random::vector_field(&mut r, &c, 2));
        let a = random::form(&mut r, &c, k, 2);
        let lhs = a.interior(&x.bracket(&y).unwrap()).unwrap();
        let rhs = a.interior(&y).unwrap().lie_derivative(&x).unwrap().sub(&a.lie_derivative(&x).unwrap().interior(&y).unwrap()).unwrap();
        prop_assert!(zero(&oracle(&c), &lhs.sub(&rhs).unwrap()));
    }

    #[test]
    fn vector_field_bracket_is_lie(seed in any::<u64>()) {
        let c = small_chart();
        let o = oracle(&c);
        let mut r = rng(seed);
        let (x, y, z) = (random::vector_field(&mut r, &c, 2), random::vector_field(&mut r, &c, 2), random::vector_field(&mut r, &c, 2));
        prop_assert!(x.bracket(&x).unwrap().is_exactly_zero());
        let anti = x.bracket(&y).unwrap().add(&y.bracket(&x).unwrap()).unwrap();
        prop_assert!(anti.is_exactly_zero());
        let jac = x.bracket(&y.bracket(&z).unwrap()).unwrap()
            .add(&y.bracket(&z.bracket(&x).unwrap()).unwrap()).unwrap()
            .add(&z.bracket(&x.bracket(&y).unwrap()).unwrap()).unwrap();
        prop_assert!(jac.is_zero(&o).unwrap().is_none());
    }

    #[test]
    fn apply_equals_contraction_of_differential(seed in any::<u64>()) {
        let c = small_chart();
        let mut r = rng(seed);
        let x = random::vector_field(&mut r, &c, 2);
        let f = random::expr(&mut r, 4, 3);
        let via_d = differential(&c, &f).unwrap().interior(&x).unwrap().as_function().unwrap();
        let o = Oracle::new(c.clone(), OracleConfig::default());
        prop_assert!(o.is_zero(&(&via_d - &x.apply(&f).unwrap())).unwrap().is_zero());
    }
}
