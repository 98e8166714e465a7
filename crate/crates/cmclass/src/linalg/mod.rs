//! Exact linear algebra: rational matrices, integer Hermite/Smith normal
//! forms, LLL reduction, short-vector enumeration, and mod-p kernels.

mod fincke_pohst;
mod lll;
pub mod modp;
mod qmat;
mod zmat;

pub use fincke_pohst::{eval_quadratic_form, short_vectors};
pub use lll::lll_reduce;
pub use qmat::QMat;
pub use zmat::{hnf, hnf_with_transform, kernel_mod, snf_with_transforms, ZMat};
