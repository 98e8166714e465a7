//! Rational theta characteristics, their parity, and the Dupont numbering
//! for `g = 2`, `D = 2`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// A theta characteristic `(c_1, c_2)` with `c_i = num_i / den`:
/// two `g`-vectors of integer numerators over one even positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ThetaChar {
    den: BigInt,
    num1: Vec<BigInt>,
    num2: Vec<BigInt>,
}

impl ThetaChar {
    pub fn new(den: BigInt, num1: Vec<BigInt>, num2: Vec<BigInt>) -> Result<ThetaChar> {
        if !den.is_positive() || !den.is_even() {
            return Err(Error::InvalidInput(
                "characteristic denominator must be even and positive".into(),
            ));
        }
        if num1.len() != num2.len() || num1.is_empty() {
            return Err(Error::InvalidInput(
                "characteristic halves must have equal positive length".into(),
            ));
        }
        Ok(ThetaChar { den, num1, num2 })
    }

    pub fn from_small(den: i64, num1: &[i64], num2: &[i64]) -> Result<ThetaChar> {
        ThetaChar::new(
            BigInt::from(den),
            num1.iter().map(|&x| BigInt::from(x)).collect(),
            num2.iter().map(|&x| BigInt::from(x)).collect(),
        )
    }

    /// The characteristic `theta[(a,b), (c,d)]` named `theta_idx` in Dupont's
    /// numbering: `idx = 16b + 8a + 4d + 2c` with `a,b,c,d in {0, 1/2}`.
    pub fn from_dupont(idx: u8) -> Result<ThetaChar> {
        if idx >= 16 {
            return Err(Error::InvalidInput(format!("Dupont index {idx} out of range")));
        }
        let a = i64::from((idx >> 2) & 1);
        let b = i64::from((idx >> 3) & 1);
        let c = i64::from(idx & 1);
        let d = i64::from((idx >> 1) & 1);
        ThetaChar::from_small(2, &[a, b], &[c, d])
    }

    /// Inverse of `from_dupont` for reduced `g = 2`, `D = 2` characteristics.
    pub fn dupont_index(&self) -> Option<u8> {
        if self.g() != 2 || self.den != BigInt::from(2) || !self.is_reduced() {
            return None;
        }
        let bit = |x: &BigInt| u8::try_from(x.mod_floor(&BigInt::from(2))).unwrap();
        Some(
            4 * bit(&self.num1[0])
                + 8 * bit(&self.num1[1])
                + bit(&self.num2[0])
                + 2 * bit(&self.num2[1]),
        )
    }

    pub fn g(&self) -> usize {
        self.num1.len()
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn num1(&self) -> &[BigInt] {
        &self.num1
    }

    pub fn num2(&self) -> &[BigInt] {
        &self.num2
    }

    pub fn c1(&self) -> Vec<BigRational> {
        self.num1.iter().map(|n| BigRational::new(n.clone(), self.den.clone())).collect()
    }

    pub fn c2(&self) -> Vec<BigRational> {
        self.num2.iter().map(|n| BigRational::new(n.clone(), self.den.clone())).collect()
    }

    pub fn is_reduced(&self) -> bool {
        self.num1
            .iter()
            .chain(self.num2.iter())
            .all(|n| !n.is_negative() && *n < self.den)
    }

    /// Canonical representative with numerators in `[0, den)` and the phase
    /// `r` with `theta[self] = exp(2 pi i r) theta[reduced]`, from
    /// `theta[c_1 + n_1, c_2 + n_2] = exp(2 pi i c_1 n_2^t) theta[c_1, c_2]`.
    pub fn reduce(&self) -> (ThetaChar, BigRational) {
        let red1: Vec<BigInt> = self.num1.iter().map(|n| n.mod_floor(&self.den)).collect();
        let red2: Vec<BigInt> = self.num2.iter().map(|n| n.mod_floor(&self.den)).collect();
        let mut r = BigRational::zero();
        for i in 0..self.g() {
            let shift2 = (&self.num2[i] - &red2[i]) / &self.den;
            r += BigRational::new(&red1[i] * shift2, self.den.clone());
        }
        (ThetaChar { den: self.den.clone(), num1: red1, num2: red2 }, r)
    }

    /// Theta constants with half-integral characteristic and odd parity
    /// (`4 c_1 c_2^t` odd) vanish identically by the `v -> -v - 2c_1`
    /// symmetry of the defining sum.
    pub fn is_identically_zero(&self) -> bool {
        let two = BigInt::from(2);
        let half_integral = self
            .num1
            .iter()
            .chain(self.num2.iter())
            .all(|n| (n * &two).mod_floor(&self.den).is_zero());
        if !half_integral {
            return false;
        }
        let dot: BigInt = self.num1.iter().zip(&self.num2).map(|(x, y)| x * y).sum();
        let four_c1c2 = BigInt::from(4) * dot;
        let dd = &self.den * &self.den;
        if !four_c1c2.mod_floor(&dd).is_zero() {
            return false;
        }
        (four_c1c2 / dd).is_odd()
    }
}
