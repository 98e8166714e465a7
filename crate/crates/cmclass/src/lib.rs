//! Class invariants and class polynomials for CM fields via Siegel theta constants.
//!
//! The crate builds the full chain from a CM field given by an integer
//! polynomial to class polynomials of theta-quotient invariants:
//!
//! - [`numfield`]: number fields, maximal orders, fractional ideals in Hermite
//!   normal form, prime decomposition, class groups, residue unit groups.
//! - [`cmtypes`]: CM types, reflex fields, type norms of elements and ideals,
//!   polarizations `(𝔟, ξ)` and CM points.
//! - [`symplectic`]: symplectic matrices, bases of polarized lattices, period
//!   matrices, and reduction to the Siegel fundamental domain.
//! - [`theta`]: theta characteristics and products, arbitrary-precision
//!   evaluation, and the symbolic action of `GSp` on theta quotients.
//! - [`reciprocity`]: the Galois action of ideals of the reflex field on
//!   values of modular functions at a CM point.
//! - [`invariants`]: orbit searches for class invariants, class polynomials
//!   with coefficient recognition over a real quadratic field, Igusa
//!   invariants, companion polynomials, and reduction mod p.
//!
//! Exact arithmetic is built on `num-bigint`; floating arithmetic is a
//! fixed-point big-float layer in [`arith`] with explicit error accounting.

pub mod arith;
pub mod cmtypes;
pub mod error;
pub mod linalg;
pub mod numfield;
pub mod par;
pub mod polyring;
pub mod symplectic;
pub mod theta;

pub use error::{Error, Result};
