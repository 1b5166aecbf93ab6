//! Sections of `TM ⊕ Λ^{n-1}T*M` and the brackets acting on them.

use std::sync::Arc;

use crate::error::{ChartError, GeometryError};
use crate::exterior::{KForm, VectorField};
use crate::symexpr::{Chart, Expr};

/// A pair `(X, α)` with `α` of degree `level - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct GenSection {
    level: usize,
    x: VectorField,
    alpha: KForm,
}

impl GenSection {
    pub fn new(level: usize, x: VectorField, alpha: KForm) -> Result<GenSection, GeometryError> {
        if level == 0 {
            return Err(GeometryError::Invalid("section level must be at least 1".into()));
        }
        if alpha.degree() != level - 1 {
            return Err(GeometryError::Degree { expected: level - 1, found: alpha.degree() });
        }
        if x.chart() != alpha.chart() {
            return Err(ChartError::Mismatch.into());
        }
        Ok(GenSection { level, x, alpha })
    }

    /// A level-2 section `X ⊕ ξ`.
    pub fn pair(x: VectorField, xi: KForm) -> Result<GenSection, GeometryError> {
        GenSection::new(2, x, xi)
    }

    pub fn zero(chart: &Arc<Chart>, level: usize) -> GenSection {
        GenSection { level, x: VectorField::zero(chart), alpha: KForm::zero(chart, level - 1) }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn vector(&self) -> &VectorField {
        &self.x
    }

    pub fn form(&self) -> &KForm {
        &self.alpha
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.x.chart()
    }

    pub fn add(&self, other: &GenSection) -> Result<GenSection, GeometryError> {
        same_level(self, other)?;
        GenSection::new(self.level, self.x.add(&other.x)?, self.alpha.add(&other.alpha)?)
    }

    pub fn sub(&self, other: &GenSection) -> Result<GenSection, GeometryError> {
        same_level(self, other)?;
        GenSection::new(self.level, self.x.sub(&other.x)?, self.alpha.sub(&other.alpha)?)
    }

    pub fn scale(&self, f: &Expr) -> GenSection {
        GenSection { level: self.level, x: self.x.scale(f), alpha: self.alpha.scale(f) }
    }

    /// All scalar coefficients: vector components followed by form
    /// coefficients. A section vanishes iff every entry does.
    pub fn entries(&self) -> Vec<Expr> {
        self.x.components().iter().cloned().chain(self.alpha.coefficients().cloned()).collect()
    }

    pub fn is_exactly_zero(&self) -> bool {
        self.x.is_exactly_zero() && self.alpha.is_exactly_zero()
    }
}

fn same_level(a: &GenSection, b: &GenSection) -> Result<(), GeometryError> {
    if a.level != b.level {
        return Err(GeometryError::Level(a.level, b.level));
    }
    if a.chart() != b.chart() {
        return Err(ChartError::Mismatch.into());
    }
    Ok(())
}

fn require_level(a: &GenSection, b: &GenSection, n: usize) -> Result<(), GeometryError> {
    same_level(a, b)?;
    if a.level != n {
        return Err(GeometryError::LevelRequired { expected: n, found: a.level });
    }
    Ok(())
}

fn require_degree(h: &KForm, degree: usize) -> Result<(), GeometryError> {
    if h.degree() != degree {
        return Err(GeometryError::Degree { expected: degree, found: h.degree() });
    }
    Ok(())
}

/// `ι_X β + ι_Y α`, the pairing without its factor one half.
fn pairing_sum(a: &GenSection, b: &GenSection) -> Result<KForm, GeometryError> {
    a.alpha.interior(&b.x)?.add(&b.alpha.interior(&a.x)?)
}

/// Symmetric pairing `½(ι_X β + ι_Y α)`, of degree `n - 2`. At level 1 the
/// contraction of a function vanishes and the zero function is returned.
pub fn pairing(a: &GenSection, b: &GenSection) -> Result<KForm, GeometryError> {
    same_level(a, b)?;
    if a.level == 1 {
        return Ok(KForm::zero(a.chart(), 0));
    }
    Ok(pairing_sum(a, b)?.scale(&Expr::rational(1, 2)))
}

/// The pairing of two level-2 sections as a function.
pub fn pairing_scalar(a: &GenSection, b: &GenSection) -> Result<Expr, GeometryError> {
    require_level(a, b, 2)?;
    Ok(pairing(a, b)?.coefficient(&[]))
}

/// `([X,Y], L_X η - L_Y ξ - ½ d(ι_X η - ι_Y ξ))`.
pub fn courant_bracket(a: &GenSection, b: &GenSection) -> Result<GenSection, GeometryError> {
    require_level(a, b, 2)?;
    skew_untwisted(a, b)
}

/// The untwisted Courant bracket at any level `n`, with the same formula as
/// [`courant_bracket`] applied to `(n-1)`-forms.
pub fn courant_bracket_n(a: &GenSection, b: &GenSection) -> Result<GenSection, GeometryError> {
    same_level(a, b)?;
    skew_untwisted(a, b)
}

fn skew_untwisted(a: &GenSection, b: &GenSection) -> Result<GenSection, GeometryError> {
    let (x, xi) = (&a.x, &a.alpha);
    let (y, eta) = (&b.x, &b.alpha);
    let lie = eta.lie_derivative(x)?.sub(&xi.lie_derivative(y)?)?;
    let exact = eta.interior(x)?.sub(&xi.interior(y)?)?.d().scale(&Expr::rational(1, 2));
    GenSection::new(a.level, x.bracket(y)?, lie.sub(&exact)?)
}

/// `([X,Y], L_X η - ι_Y dξ)`.
pub fn dorfman_bracket(a: &GenSection, b: &GenSection) -> Result<GenSection, GeometryError> {
    require_level(a, b, 2)?;
    dorfman_untwisted(a, b)
}

fn dorfman_untwisted(a: &GenSection, b: &GenSection) -> Result<GenSection, GeometryError> {
    let form = b.alpha.lie_derivative(&a.x)?.sub(&a.alpha.d().interior(&b.x)?)?;
    GenSection::new(a.level, a.x.bracket(&b.x)?, form)
}

/// `ι_Y ι_X H`.
fn double_contraction(x: &VectorField, y: &VectorField, h: &KForm) -> Result<KForm, GeometryError> {
    h.interior(x)?.interior(y)
}

/// Courant bracket with the twisting term `- ι_Y ι_X H` added to the form
/// part.
pub fn twisted_courant_bracket(a: &GenSection, b: &GenSection, h: &KForm) -> Result<GenSection, GeometryError> {
    require_level(a, b, 2)?;
    require_degree(h, 3)?;
    let base = skew_untwisted(a, b)?;
    let twist = double_contraction(&a.x, &b.x, h)?;
    GenSection::new(2, base.x, base.alpha.sub(&twist)?)
}

/// Derived bracket `([X,Y], L_X β - ι_Y dα - ι_Y ι_X H)` for any level `n`,
/// with `H` of degree `n + 1`. Not antisymmetric in general.
pub fn derived_bracket(a: &GenSection, b: &GenSection, h: &KForm) -> Result<GenSection, GeometryError> {
    same_level(a, b)?;
    require_degree(h, a.level + 1)?;
    let base = dorfman_untwisted(a, b)?;
    let twist = double_contraction(&a.x, &b.x, h)?;
    GenSection::new(a.level, base.x, base.alpha.sub(&twist)?)
}

/// Antisymmetrization `½([A,B] - [B,A])` of [`derived_bracket`]. At level 2
/// this coincides with [`twisted_courant_bracket`].
pub fn derived_bracket_skew(a: &GenSection, b: &GenSection, h: &KForm) -> Result<GenSection, GeometryError> {
    let ab = derived_bracket(a, b, h)?;
    let ba = derived_bracket(b, a, h)?;
    Ok(ab.sub(&ba)?.scale(&Expr::rational(1, 2)))
}

/// Courant tensor `T(A, B, C) = ι_Z θ + ι_{[X,Y]} γ` where `([X,Y], θ)` is
/// the twisted bracket of `A = (X, ·)` and `B = (Y, ·)`, and `C = (Z, γ)`.
///
/// This is the pairing of `[A,B]_H` with `C` taken without the factor one
/// half, which is the normalization under which the tensor of graph sections
/// equals the Jacobi sum and twisting shifts it by `- H(X, Y, Z)`.
pub fn courant_tensor(a: &GenSection, b: &GenSection, c: &GenSection, h: &KForm) -> Result<Expr, GeometryError> {
    require_level(a, b, 2)?;
    same_level(a, c)?;
    let ab = twisted_courant_bracket(a, b, h)?;
    Ok(pairing_sum(&ab, c)?.coefficient(&[]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twisted_bracket_of_coordinate_fields() {
        let c = Chart::new("m", ["q1", "q2", "q3"]).unwrap();
        let h = KForm::from_terms(&c, 3, [(vec![0, 1, 2], Expr::one())]).unwrap();
        let a = GenSection::pair(VectorField::coordinate(&c, 0), KForm::zero(&c, 1)).unwrap();
        let b = GenSection::pair(VectorField::coordinate(&c, 1), KForm::zero(&c, 1)).unwrap();
        let r = twisted_courant_bracket(&a, &b, &h).unwrap();
        assert!(r.vector().is_exactly_zero());
        assert_eq!(r.form(), &KForm::basis(&c, 2).neg());
    }

    #[test]
    fn level_one_pairing_is_zero() {
        let c = Chart::new("m", ["x"]).unwrap();
        let a = GenSection::new(1, VectorField::coordinate(&c, 0), KForm::function(&c, Expr::var(0)).unwrap()).unwrap();
        assert!(pairing(&a, &a).unwrap().is_exactly_zero());
        assert!(courant_bracket(&a, &a).is_err());
    }
}
