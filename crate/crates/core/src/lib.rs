//! Symbolic exterior calculus for twisted Courant brackets and Dirac
//! structures.
//!
//! Scalars are exact [`symexpr::Expr`] trees. Forms and vector fields live in
//! [`exterior`], the generalized-tangent-bundle brackets in [`courant`],
//! graph-type Dirac structures and their Poisson algebras in [`dirac`], and
//! the exact Lie-algebra computations in [`liealg`]. Every "vanishes
//! identically" claim is decided by the seeded [`symexpr::Oracle`].

pub mod check;
pub mod courant;
pub mod dirac;
pub mod error;
pub mod exterior;
pub mod liealg;
pub mod random;
pub mod symexpr;

pub use error::{ChartError, EvalError, GeometryError, LieError, OracleError, ParseError};
