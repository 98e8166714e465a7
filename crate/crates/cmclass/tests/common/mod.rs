//! Shared integration-test fixture: the worked degree-4 CM point on
//! `K = Q[X]/(X^4 + 27X^2 + 52)` with its polarization and symplectic basis.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;

use cmclass::numfield::{FieldElement, NumberField};

pub fn cm_field() -> NumberField {
    NumberField::new(&[52, 0, 27, 0, 1]).unwrap()
}

/// `(c0 + c1 a + c2 a^2 + c3 a^3) / den` in the power basis.
pub fn elem(k: &NumberField, c: [i64; 4], den: i64) -> FieldElement {
    let d = BigInt::from(den);
    k.element(
        c.iter()
            .map(|&x| BigRational::new(BigInt::from(x), d.clone()))
            .collect(),
    )
}

/// The principal polarization `xi = 2 / (-5882941509 a^3 - 146560028765 a)`.
pub fn worked_xi(k: &NumberField) -> FieldElement {
    let inner = elem(k, [0, -146_560_028_765, 0, -5_882_941_509], 1);
    k.scale(&k.inv(&inner).unwrap(), &BigRational::from_integer(BigInt::from(2)))
}

/// A basis of the maximal order whose Gram matrix under `E_xi` is `Omega`.
pub fn worked_basis(k: &NumberField) -> Vec<FieldElement> {
    vec![
        elem(k, [143_846, 300_821, 5_774, 12_075], 4),
        elem(k, [-228_898, -673_565, -9_188, -27_037], 4),
        elem(k, [601_642, 300_821, 24_150, 12_075], 4),
        elem(k, [-745_488, 0, -29_924, 0], 4),
    ]
}
