//! Siegel theta constants: characteristics, formal products, numerical
//! evaluation, and the exact action of `GSp_2g(Z/NZ)`.
//!
//! The central object is [`ThetaProduct`], a balanced quotient of theta
//! constants together with a root-of-unity prefactor. Products of level
//! `N = 2 den^2` carry an exact right action of `GSp_2g(Z/NZ)`
//! ([`gsp_action`]) compatible with numerical evaluation on the Siegel
//! upper half-space ([`eval_product`]): for integral symplectic `A`,
//! `(f^A)(tau) = f(A tau)`.

mod action;
mod chars;
mod eval;
mod product;

pub use action::{gsp_action, gsp_action_with_lifts, kappa_estimate};
pub use chars::ThetaChar;
pub use eval::{eval_product, theta_eval, ThetaCache};
pub use product::ThetaProduct;
