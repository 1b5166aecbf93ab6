//! Cartan 3-form of a Lie algebra with an invariant bilinear form, computed
//! exactly from structure constants.

pub mod linalg;

use num::{BigRational, Zero};

use crate::error::LieError;
use linalg::{nullspace, rank, span_basis, RatMatrix};

/// Structure constants `[X_i, X_j] = Σ_k C^k_{ij} X_k` and a bilinear form.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebraData {
    dim: usize,
    /// `c[i][j][k] = C^k_{ij}`.
    c: Vec<Vec<Vec<BigRational>>>,
    g: RatMatrix,
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

impl LieAlgebraData {
    /// Validates antisymmetry, the Jacobi identity, symmetry and
    /// nondegeneracy of `g`, and ad-invariance.
    pub fn new(c: Vec<Vec<Vec<BigRational>>>, g: RatMatrix) -> Result<LieAlgebraData, LieError> {
        let dim = c.len();
        if dim == 0 {
            return Err(LieError::EmptyAlgebra);
        }
        if c.iter().any(|row| row.len() != dim || row.iter().any(|v| v.len() != dim)) {
            return Err(LieError::Shape("structure constants"));
        }
        if g.len() != dim || g.iter().any(|row| row.len() != dim) {
            return Err(LieError::Shape("bilinear form"));
        }
        let l = LieAlgebraData { dim, c, g };
        l.validate()?;
        Ok(l)
    }

    /// Builds from a list of brackets `(i, j, [c_0, ..., c_{d-1}])` meaning
    /// `[X_i, X_j] = Σ c_k X_k`; the opposite order is filled in by
    /// antisymmetry and unlisted pairs commute.
    pub fn from_brackets(
        dim: usize,
        brackets: &[(usize, usize, Vec<BigRational>)],
        g: RatMatrix,
    ) -> Result<LieAlgebraData, LieError> {
        let mut c = vec![vec![vec![BigRational::zero(); dim]; dim]; dim];
        for (i, j, coeffs) in brackets {
            for &index in [i, j] {
                if index >= dim {
                    return Err(LieError::IndexOutOfRange { index, dim });
                }
            }
            if coeffs.len() != dim {
                return Err(LieError::Shape("bracket coefficients"));
            }
            for k in 0..dim {
                c[*i][*j][k] = coeffs[k].clone();
                c[*j][*i][k] = -coeffs[k].clone();
            }
        }
        LieAlgebraData::new(c, g)
    }

    /// `so(3)` with `[X_i, X_j] = ε_{ijk} X_k` and the identity form.
    pub fn so3() -> LieAlgebraData {
        let brackets = [
            (0, 1, vec![q(0), q(0), q(1)]),
            (1, 2, vec![q(1), q(0), q(0)]),
            (2, 0, vec![q(0), q(1), q(0)]),
        ];
        LieAlgebraData::from_brackets(3, &brackets, identity(3)).expect("so(3) is valid")
    }

    /// The abelian algebra of dimension `d` with the identity form.
    pub fn abelian(d: usize) -> Result<LieAlgebraData, LieError> {
        LieAlgebraData::from_brackets(d, &[], identity(d))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `C^k_{ij}`.
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &BigRational {
        &self.c[i][j][k]
    }

    pub fn metric(&self) -> &RatMatrix {
        &self.g
    }

    fn validate(&self) -> Result<(), LieError> {
        let d = self.dim;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    if self.c[i][j][k] != -self.c[j][i][k].clone() {
                        return Err(LieError::NotAntisymmetric { i, j, k });
                    }
                }
            }
        }
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let mut s = BigRational::zero();
                        for m in 0..d {
                            s += &self.c[i][j][m] * &self.c[m][k][l];
                            s += &self.c[j][k][m] * &self.c[m][i][l];
                            s += &self.c[k][i][m] * &self.c[m][j][l];
                        }
                        if !s.is_zero() {
                            return Err(LieError::Jacobi { i, j, k, l });
                        }
                    }
                }
            }
        }
        for i in 0..d {
            for j in 0..d {
                if self.g[i][j] != self.g[j][i] {
                    return Err(LieError::NotSymmetric { i, j });
                }
            }
        }
        if rank(&self.g) < d {
            return Err(LieError::Degenerate);
        }
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    // <[X_i, X_j], X_k> + <X_j, [X_i, X_k]>
                    let mut s = BigRational::zero();
                    for m in 0..d {
                        s += &self.c[i][j][m] * &self.g[m][k];
                        s += &self.c[i][k][m] * &self.g[j][m];
                    }
                    if !s.is_zero() {
                        return Err(LieError::NotInvariant { i, j, k });
                    }
                }
            }
        }
        Ok(())
    }

    /// Basis of the center `{v : [v, X_i] = 0 for all i}`.
    pub fn center(&self) -> Vec<Vec<BigRational>> {
        let d = self.dim;
        // Row (j, k) of the map v -> Σ_i v_i C^k_{ij}.
        let m: RatMatrix = (0..d)
            .flat_map(|j| (0..d).map(move |k| (j, k)))
            .map(|(j, k)| (0..d).map(|i| self.c[i][j][k].clone()).collect())
            .collect();
        nullspace(&m, d)
    }
}

fn identity(d: usize) -> RatMatrix {
    (0..d).map(|i| (0..d).map(|j| if i == j { q(1) } else { q(0) }).collect()).collect()
}

/// An alternating trilinear form on a `dim`-dimensional space.
#[derive(Clone, Debug, PartialEq)]
pub struct Trilinear {
    dim: usize,
    values: Vec<BigRational>,
}

impl Trilinear {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Value on the basis triple `(X_i, X_j, X_k)`.
    pub fn get(&self, i: usize, j: usize, k: usize) -> &BigRational {
        &self.values[(i * self.dim + j) * self.dim + k]
    }

    /// `ι_{X_l} ι_{X_m} ι_{X_n}` of the form, innermost first.
    pub fn contraction(&self, l: usize, m: usize, n: usize) -> &BigRational {
        self.get(n, m, l)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }
}

/// `H_G(X_i, X_j, X_k) = ½ <[X_i, X_j], X_k> = ½ Σ_m C^m_{ij} g_{mk}`,
/// verified alternating.
pub fn cartan_3form(l: &LieAlgebraData) -> Result<Trilinear, LieError> {
    let d = l.dim;
    let half = BigRational::new(1.into(), 2.into());
    let mut values = Vec::with_capacity(d * d * d);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let s: BigRational = (0..d).map(|m| &l.c[i][j][m] * &l.g[m][k]).sum();
                values.push(&half * s);
            }
        }
    }
    let t = Trilinear { dim: d, values };
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let v = t.get(i, j, k);
                let alternating = *t.get(j, i, k) == -v.clone()
                    && *t.get(i, k, j) == -v.clone()
                    && *t.get(k, j, i) == -v.clone();
                if !alternating {
                    return Err(LieError::NotInvariant { i, j, k });
                }
            }
        }
    }
    Ok(t)
}

/// `ι_{X_l} ι_{X_m} ι_{X_n} H_G = H_G(X_n, X_m, X_l)`, innermost first.
pub fn triple_contraction(l: &LieAlgebraData, a: usize, b: usize, c: usize) -> Result<BigRational, LieError> {
    for index in [a, b, c] {
        if index >= l.dim {
            return Err(LieError::IndexOutOfRange { index, dim: l.dim });
        }
    }
    Ok(cartan_3form(l)?.contraction(a, b, c).clone())
}

/// Basis of `{v : ι_v H_G = 0}`. For a nondegenerate invariant form this is
/// the center of the algebra.
pub fn contraction_kernel(l: &LieAlgebraData) -> Result<Vec<Vec<BigRational>>, LieError> {
    let h = cartan_3form(l)?;
    let d = l.dim;
    let m: RatMatrix = (0..d)
        .flat_map(|j| (0..d).map(move |k| (j, k)))
        .map(|(j, k)| (0..d).map(|i| h.get(i, j, k).clone()).collect())
        .collect();
    Ok(nullspace(&m, d))
}

/// True when two lists of vectors span the same subspace.
pub fn same_span(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> bool {
    span_basis(a) == span_basis(b)
}
