//! Fixed-point arbitrary-precision real and complex arithmetic.
//!
//! A [`Real`] stores `mant * 2^-prec` with a `BigInt` mantissa. All binary
//! operations require equal `prec` and round toward minus infinity, so each
//! operation adds at most one ulp (`2^-prec`) of absolute error on top of
//! propagated input error. Pipelines run with generous guard bits and state
//! their final error budgets where they matter (theta truncation, coefficient
//! recognition).

mod cmatrix;
mod complex;
mod elementary;
mod real;

pub use cmatrix::CMatrix;
pub use complex::Complex;
pub use elementary::{cis, exp_2pi_i, exp_complex};
pub use real::Real;
