use num::{BigRational, One, Zero};
use proptest::prelude::*;
use twisted_dirac::liealg::linalg::{rank, rref, RatMatrix};
use twisted_dirac::liealg::{cartan_3form, contraction_kernel, same_span, triple_contraction, LieAlgebraData};
use twisted_dirac::LieError;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn half(n: i64) -> BigRational {
    BigRational::new(n.into(), 2.into())
}

type Constants = Vec<Vec<Vec<BigRational>>>;

/// `a` copies of so(3) with metrics `scales[i]·I` plus an abelian block with
/// the given diagonal metric.
fn block_algebra(scales: &[i64], abelian_diag: &[i64]) -> (Constants, RatMatrix) {
    let d = 3 * scales.len() + abelian_diag.len();
    let mut c = vec![vec![vec![q(0); d]; d]; d];
    let mut g = vec![vec![q(0); d]; d];
    for (b, &s) in scales.iter().enumerate() {
        let o = 3 * b;
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            c[o + i][o + j][o + k] = q(1);
            c[o + j][o + i][o + k] = q(-1);
        }
        for i in 0..3 {
            g[o + i][o + i] = q(s);
        }
    }
    for (i, &v) in abelian_diag.iter().enumerate() {
        let o = 3 * scales.len() + i;
        g[o][o] = q(v);
    }
    (c, g)
}

fn inverse(p: &RatMatrix) -> RatMatrix {
    let d = p.len();
    let mut aug: RatMatrix = p
        .iter()
        .enumerate()
        .map(|(i, row)| row.iter().cloned().chain((0..d).map(|j| if i == j { q(1) } else { q(0) })).collect())
        .collect();
    rref(&mut aug);
    aug.into_iter().map(|row| row[d..].to_vec()).collect()
}

/// Structure constants and metric in the basis `e'_i = Σ_j P_ij e_j`.
fn change_basis(c: &Constants, g: &RatMatrix, p: &RatMatrix) -> (Constants, RatMatrix) {
    let d = p.len();
    let pinv = inverse(p);
    let mut c2 = vec![vec![vec![q(0); d]; d]; d];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let mut s = BigRational::zero();
                for a in 0..d {
                    for b in 0..d {
                        for e in 0..d {
                            if !c[a][b][e].is_zero() {
                                s += &p[i][a] * &p[j][b] * &c[a][b][e] * &pinv[e][k];
                            }
                        }
                    }
                }
                c2[i][j][k] = s;
            }
        }
    }
    let mut g2 = vec![vec![q(0); d]; d];
    for i in 0..d {
        for j in 0..d {
            let mut s = BigRational::zero();
            for a in 0..d {
                for b in 0..d {
                    s += &p[i][a] * &g[a][b] * &p[j][b];
                }
            }
            g2[i][j] = s;
        }
    }
    (c2, g2)
}

#[test]
fn so3_table() {
    let l = LieAlgebraData::so3();
    let h = cartan_3form(&l).unwrap();
    assert_eq!(*h.get(0, 1, 2), half(1));
    assert_eq!(*h.get(1, 0, 2), half(-1));
    assert_eq!(triple_contraction(&l, 0, 1, 2).unwrap(), half(-1));
    assert!(triple_contraction(&l, 0, 0, 2).unwrap().is_zero());
    assert!(matches!(triple_contraction(&l, 0, 1, 3), Err(LieError::IndexOutOfRange { index: 3, dim: 3 })));
    assert!(contraction_kernel(&l).unwrap().is_empty());
    assert!(l.center().is_empty());
}

#[test]
fn abelian_kernel_is_everything() {
    for d in 1..=5 {
        let l = LieAlgebraData::abelian(d).unwrap();
        assert!(cartan_3form(&l).unwrap().is_zero());
        let k = contraction_kernel(&l).unwrap();
        assert_eq!(k.len(), d);
        assert_eq!(rank(&k), d);
    }
    assert!(matches!(LieAlgebraData::abelian(0), Err(LieError::EmptyAlgebra)));
}

#[test]
fn heisenberg_is_rejected_for_any_metric() {
    let brackets = [(0, 1, vec![q(0), q(0), q(1)])];
    for g in [
        vec![vec![q(1), q(0), q(0)], vec![q(0), q(1), q(0)], vec![q(0), q(0), q(1)]],
        vec![vec![q(0), q(0), q(1)], vec![q(0), q(1), q(0)], vec![q(1), q(0), q(0)]],
        vec![vec![q(0), q(0), q(0)], vec![q(0), q(0), q(0)], vec![q(0), q(0), q(0)]],
    ] {
        let err = LieAlgebraData::from_brackets(3, &brackets, g).unwrap_err();
        assert!(matches!(err, LieError::NotInvariant { .. } | LieError::Degenerate), "{err:?}");
    }
}

#[test]
fn invalid_inputs_are_reported() {
    let (mut c, g) = block_algebra(&[1], &[]);
    c[1][0][2] = q(0);
    assert!(matches!(LieAlgebraData::new(c, g.clone()), Err(LieError::NotAntisymmetric { .. })));

    // [X0,X1] = X1, [X0,X2] = X0 violates Jacobi.
    let brackets = [(0, 1, vec![q(0), q(1), q(0)]), (0, 2, vec![q(1), q(0), q(0)])];
    assert!(matches!(LieAlgebraData::from_brackets(3, &brackets, g.clone()), Err(LieError::Jacobi { .. })));

    let mut asym = g.clone();
    asym[0][1] = q(1);
    let (c, _) = block_algebra(&[1], &[]);
    assert!(matches!(LieAlgebraData::new(c, asym), Err(LieError::NotSymmetric { i: 0, j: 1 })));
}

fn scales() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(prop_oneof![-3i64..=-1, 1i64..=3], 0..=2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn accepted_algebras_satisfy_invariants(
        so3_scales in scales(),
        abelian in prop::collection::vec(prop_oneof![-2i64..=-1, 1i64..=2], 0..=2),
        entries in prop::collection::vec(-2i64..=2, 64),
    ) {
        let d = 3 * so3_scales.len() + abelian.len();
        prop_assume!(d > 0);
        let (c, g) = block_algebra(&so3_scales, &abelian);
        // Unit lower-triangular times upper-triangular keeps P invertible.
        let mut lower = vec![vec![q(0); d]; d];
        let mut upper = vec![vec![q(0); d]; d];
        for i in 0..d {
            lower[i][i] = BigRational::one();
            upper[i][i] = BigRational::one();
            for j in 0..i {
                lower[i][j] = q(entries[(i * d + j) % 64]);
                upper[j][i] = q(entries[(j * d + i + 17) % 64]);
            }
        }
        let p: RatMatrix = (0..d).map(|i| (0..d).map(|j| (0..d).map(|k| &lower[i][k] * &upper[k][j]).sum()).collect()).collect();
        let (c2, g2) = change_basis(&c, &g, &p);
        let l = LieAlgebraData::new(c2, g2).unwrap();

        let h = cartan_3form(&l).unwrap();
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let v = h.get(i, j, k).clone();
                    prop_assert_eq!(h.get(j, i, k), &-v.clone());
                    prop_assert_eq!(h.get(i, k, j), &-v.clone());
                    prop_assert_eq!(h.get(k, j, i), &-v.clone());
                    let t = h.contraction(i, j, k).clone();
                    prop_assert_eq!(h.contraction(j, i, k), &-t.clone());
                    prop_assert_eq!(h.contraction(i, k, j), &-t);
                }
            }
        }
        prop_assert_eq!(&triple_contraction(&l, 0, d - 1, d / 2).unwrap(), h.contraction(0, d - 1, d / 2));
        let kernel = contraction_kernel(&l).unwrap();
        prop_assert!(same_span(&kernel, &l.center()));
        prop_assert_eq!(kernel.len(), abelian.len());
    }
}
