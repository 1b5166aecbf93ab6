//! Seeded generators for expressions, fields, forms and admissible pairs,
//! used by property tests and the acceptance runs.

use std::sync::Arc;

use rand::Rng;

use crate::courant::GenSection;
use crate::exterior::{KForm, VectorField};
use crate::symexpr::{Chart, Expr};

/// Nonzero integer coefficient in `[-3, 3]`.
fn coefficient<R: Rng>(rng: &mut R) -> i64 {
    let c = rng.gen_range(1..=3);
    if rng.gen_bool(0.5) {
        -c
    } else {
        c
    }
}

/// Random polynomial of total degree at most `degree` in the given
/// generators, with up to `terms` monomials.
pub fn poly_in<R: Rng>(rng: &mut R, gens: &[Expr], degree: u32, terms: usize) -> Expr {
    let count = rng.gen_range(1..=terms.max(1));
    let monomials = (0..count).map(|_| {
        let total = rng.gen_range(0..=degree);
        let mut factors = vec![Expr::int(coefficient(rng))];
        if !gens.is_empty() {
            for _ in 0..total {
                factors.push(gens[rng.gen_range(0..gens.len())].clone());
            }
        }
        Expr::product(factors)
    });
    Expr::sum(monomials.collect::<Vec<_>>()).simplify()
}

/// Random polynomial in the coordinates with the given indices.
pub fn poly<R: Rng>(rng: &mut R, vars: &[usize], degree: u32, terms: usize) -> Expr {
    let gens: Vec<Expr> = vars.iter().map(|&i| Expr::var(i)).collect();
    poly_in(rng, &gens, degree, terms)
}

/// Polynomial in every coordinate of a `dim`-dimensional chart.
pub fn poly_all<R: Rng>(rng: &mut R, dim: usize, degree: u32) -> Expr {
    let vars: Vec<usize> = (0..dim).collect();
    poly(rng, &vars, degree, 4)
}

/// Random expression mixing polynomials, an unknown function `V`,
/// `sqrt(1 + x²)` and division by `1 + x²`, all finite on positive boxes.
pub fn expr<R: Rng>(rng: &mut R, dim: usize, depth: u32) -> Expr {
    let x = Expr::var(rng.gen_range(0..dim));
    if depth == 0 {
        return poly_all(rng, dim, 2);
    }
    let positive = Expr::sum([Expr::one(), x.powi(2)]);
    match rng.gen_range(0..5) {
        0 => poly_all(rng, dim, 2),
        1 => Expr::apply("V", expr(rng, dim, depth - 1)),
        2 => Expr::product([expr(rng, dim, depth - 1), positive.sqrt()]),
        3 => Expr::product([expr(rng, dim, depth - 1), positive.powi(-1)]),
        _ => Expr::sum([expr(rng, dim, depth - 1), expr(rng, dim, depth - 1)]),
    }
}

pub fn vector_field<R: Rng>(rng: &mut R, chart: &Arc<Chart>, degree: u32) -> VectorField {
    let comps = (0..chart.dim())
        .map(|_| if rng.gen_bool(0.8) { poly_all(rng, chart.dim(), degree) } else { Expr::zero() })
        .collect();
    VectorField::new(chart, comps).expect("generated on the chart")
}

/// Random `k`-form whose coefficients are polynomials of the given degree.
pub fn form<R: Rng>(rng: &mut R, chart: &Arc<Chart>, k: usize, degree: u32) -> KForm {
    let dim = chart.dim();
    let mut terms = Vec::new();
    for mask in 0u64..(1u64 << dim) {
        if mask.count_ones() as usize == k && rng.gen_bool(0.7) {
            let idx: Vec<usize> = (0..dim).filter(|i| mask >> i & 1 == 1).collect();
            terms.push((idx, poly_all(rng, dim, degree)));
        }
    }
    KForm::from_terms(chart, k, terms).expect("generated on the chart")
}

pub fn section<R: Rng>(rng: &mut R, chart: &Arc<Chart>, level: usize, degree: u32) -> GenSection {
    let x = vector_field(rng, chart, degree);
    let alpha = form(rng, chart, level - 1, degree);
    GenSection::new(level, x, alpha).expect("consistent level")
}

/// `dx_0 ∧ ... ∧ dx_n` on the first `n + 1` coordinates.
pub fn volume_twist(chart: &Arc<Chart>, n: usize) -> KForm {
    KForm::from_terms(chart, n + 1, [((0..=n).collect(), Expr::one())]).expect("chart has n + 1 coordinates")
}

/// `(n-1)`-form on the coordinates `vars`, with polynomial coefficients in
/// the same coordinates.
fn form_on<R: Rng>(rng: &mut R, chart: &Arc<Chart>, vars: &[usize], k: usize, degree: u32) -> KForm {
    let mut terms = Vec::new();
    for mask in 0u64..(1u64 << vars.len()) {
        if mask.count_ones() as usize == k {
            let idx: Vec<usize> = (0..vars.len()).filter(|i| mask >> i & 1 == 1).map(|i| vars[i]).collect();
            terms.push((idx, poly(rng, vars, degree, 3)));
        }
    }
    KForm::from_terms(chart, k, terms).expect("generated on the chart")
}

/// Fills the first `n + 1` components of `X` so that `dα + ι_X H = 0` for
/// `H` = [`volume_twist`], given `dα` built only from `dx_0..dx_n`.
fn solve_components(n: usize, d_alpha: &KForm, x: &mut [Expr]) {
    for (j, xj) in x.iter_mut().enumerate().take(n + 1) {
        let hat: Vec<usize> = (0..=n).filter(|&i| i != j).collect();
        let c = d_alpha.coefficient(&hat);
        // ι_{∂_j} H = (-1)^j dx_hat_j
        *xj = if j % 2 == 0 { -c } else { c };
    }
}

/// Admissible pair `(X, α)` at level `n` for `H = dx_0 ∧ ... ∧ dx_n`:
/// `α = α₀ + dψ` with `α₀` supported on the first `n + 1` coordinates, and
/// the remaining components of `X` arbitrary.
pub fn admissible_pair<R: Rng>(rng: &mut R, chart: &Arc<Chart>, n: usize, degree: u32) -> GenSection {
    assert!(chart.dim() > n, "chart needs at least n + 1 coordinates");
    let dim = chart.dim();
    let core: Vec<usize> = (0..=n).collect();
    let alpha0 = form_on(rng, chart, &core, n - 1, degree);
    let mut x: Vec<Expr> = (0..dim).map(|_| poly_all(rng, dim, degree)).collect();
    solve_components(n, &alpha0.d(), &mut x);
    let alpha = if n >= 2 { alpha0.add(&form(rng, chart, n - 2, degree).d()).expect("same chart") } else { alpha0 };
    GenSection::new(n, VectorField::new(chart, x).expect("on chart"), alpha).expect("degree n - 1")
}

/// Admissible pairs for `H = dx_0 ∧ ... ∧ dx_n` with pairwise vanishing
/// pairings: `α` lives on `x_1..x_n`, and `X` has no components there.
pub fn isotropic_admissible_pair<R: Rng>(rng: &mut R, chart: &Arc<Chart>, n: usize, degree: u32) -> GenSection {
    assert!(chart.dim() > n, "chart needs at least n + 1 coordinates");
    let dim = chart.dim();
    let inner: Vec<usize> = (1..=n).collect();
    let alpha = form_on(rng, chart, &inner, n - 1, degree);
    let mut x: Vec<Expr> = (0..dim)
        .map(|i| if i > n { poly_all(rng, dim, degree) } else { Expr::zero() })
        .collect();
    let top = alpha.d().coefficient(&inner);
    x[0] = -top;
    GenSection::new(n, VectorField::new(chart, x).expect("on chart"), alpha).expect("degree n - 1")
}
