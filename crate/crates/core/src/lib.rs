//! Explicit estimates around primes between consecutive cubes: zeta
//! evaluation with error control, mollifier polynomials, divisor-sum tails,
//! mean-square integrals, a constants ledger evaluated in log-space, zero
//! location on the critical line, and sieve-based prime censuses.
//!
//! Every inequality the library checks is reported as a
//! [`check::BoundCheckRecord`] with a margin-based verdict.

pub mod analytic;
pub mod arith;
pub mod check;
pub mod constants;
pub mod dirichlet;
pub mod divisor;
pub mod error;
pub mod logscale;
pub mod point;
pub mod primes;
pub mod quadrature;
pub mod sum;
pub mod zeros;
pub mod zeta;

pub use check::{BoundCheckRecord, CheckMode, Verdict};
pub use error::{Error, Result};
pub use point::{ComplexPoint, EvaluatedValue};
