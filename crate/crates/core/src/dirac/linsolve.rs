//! Gauss-Jordan elimination over the expression field.

use crate::error::OracleError;
use crate::symexpr::{Expr, Oracle};

pub(crate) type Matrix = Vec<Vec<Expr>>;

/// Whether an entry may serve as a pivot. Constants and nonzero rational
/// functions are decided exactly; anything else goes to the oracle.
fn usable_pivot(e: &Expr, oracle: &Oracle) -> Result<Option<u8>, OracleError> {
    if e.is_exactly_zero() {
        return Ok(None);
    }
    if e.as_constant().is_some() {
        return Ok(Some(0));
    }
    if e.is_rational_class() {
        return Ok(Some(1));
    }
    Ok((!oracle.is_zero(e)?.is_zero()).then_some(2))
}

/// Picks the row at or below `from` with the best pivot in column `col`.
fn choose_pivot(m: &Matrix, col: usize, from: usize, oracle: &Oracle) -> Result<Option<usize>, OracleError> {
    let mut best: Option<(u8, usize)> = None;
    for (r, row) in m.iter().enumerate().skip(from) {
        if let Some(rank) = usable_pivot(&row[col], oracle)? {
            if best.is_none_or(|(b, _)| rank < b) {
                best = Some((rank, r));
                if rank == 0 {
                    break;
                }
            }
        }
    }
    Ok(best.map(|(_, r)| r))
}

/// Row-reduces `m` in place over its first `cols` columns, returning the
/// pivot column of each reduced row.
pub(crate) fn reduce(m: &mut Matrix, cols: usize, oracle: &Oracle) -> Result<Vec<usize>, OracleError> {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = choose_pivot(m, c, r, oracle)? else { continue };
        m.swap(r, p);
        let inv = (Expr::one() / &m[r][c]).simplify();
        for x in m[r].iter_mut() {
            *x = (&inv * &*x).simplify();
        }
        for i in 0..rows {
            if i == r || m[i][c].is_exactly_zero() {
                continue;
            }
            let factor = m[i][c].clone();
            for j in 0..m[i].len() {
                if m[r][j].is_exactly_zero() {
                    continue;
                }
                m[i][j] = (&m[i][j] - &factor * &m[r][j]).simplify();
            }
        }
        pivots.push(c);
        r += 1;
    }
    Ok(pivots)
}

/// Inverse of a square matrix, or `None` when no full set of pivots exists.
pub(crate) fn inverse(m: &Matrix, oracle: &Oracle) -> Result<Option<Matrix>, OracleError> {
    let n = m.len();
    let mut aug: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Expr::one() } else { Expr::zero() }));
            r
        })
        .collect();
    let pivots = reduce(&mut aug, n, oracle)?;
    if pivots.len() < n {
        return Ok(None);
    }
    Ok(Some(aug.into_iter().map(|row| row[n..].to_vec()).collect()))
}

/// Solves `m x = b`, setting free unknowns to zero. Returns `None` when the
/// system is inconsistent on the sampling box.
pub(crate) fn solve(m: &Matrix, b: &[Expr], oracle: &Oracle) -> Result<Option<Vec<Expr>>, OracleError> {
    let n = m.first().map_or(0, Vec::len);
    let mut aug: Matrix = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = reduce(&mut aug, n, oracle)?;
    for row in aug.iter().skip(pivots.len()) {
        if !oracle.is_zero(&row[n])?.is_zero() {
            return Ok(None);
        }
    }
    let mut x = vec![Expr::zero(); n];
    for (row, &c) in aug.iter().zip(&pivots) {
        x[c] = row[n].clone();
    }
    Ok(Some(x))
}

/// `m v`, simplified.
pub(crate) fn apply(m: &Matrix, v: &[Expr]) -> Vec<Expr> {
    m.iter()
        .map(|row| {
            let terms = row
                .iter()
                .zip(v)
                .filter(|(a, b)| !a.is_exactly_zero() && !b.is_exactly_zero())
                .map(|(a, b)| a * b);
            Expr::sum(terms).simplify()
        })
        .collect()
}
