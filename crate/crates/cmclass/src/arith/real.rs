//! Fixed-point real numbers with `BigInt` mantissas.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use once_cell::sync::Lazy;

/// Value `mant * 2^-prec`. Operands of binary operations must share `prec`.
#[derive(Clone, PartialEq, Eq)]
pub struct Real {
    mant: BigInt,
    prec: u32,
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({:.6e} @{})", self.to_f64(), self.prec)
    }
}

impl Real {
    pub fn from_mant(mant: BigInt, prec: u32) -> Self {
        Real { mant, prec }
    }

    pub fn zero(prec: u32) -> Self {
        Real { mant: BigInt::zero(), prec }
    }

    pub fn one(prec: u32) -> Self {
        Real { mant: BigInt::one() << prec, prec }
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Real { mant: BigInt::from(v) << prec, prec }
    }

    pub fn from_bigint(v: &BigInt, prec: u32) -> Self {
        Real { mant: v.clone() << prec, prec }
    }

    /// Rounds `num/den` to the nearest representable value (ties toward -inf).
    pub fn from_ratio_parts(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        assert!(!den.is_zero(), "division by zero");
        let (num, den) = if den.is_negative() {
            (-num.clone(), -den.clone())
        } else {
            (num.clone(), den.clone())
        };
        let scaled = (num << (prec + 1)) / den;
        Real { mant: (scaled + 1) >> 1, prec }
    }

    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        Self::from_ratio_parts(q.numer(), q.denom(), prec)
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn mant(&self) -> &BigInt {
        &self.mant
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.mant.clone(), BigInt::one() << self.prec)
    }

    /// Approximate conversion; saturates to infinity on overflow.
    pub fn to_f64(&self) -> f64 {
        if self.mant.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits();
        if bits <= 1023 {
            if let Some(v) = self.mant.to_f64() {
                return v / 2f64.powi(self.prec as i32).max(f64::MIN_POSITIVE);
            }
        }
        let shift = bits as i64 - 53;
        let top = (&self.mant >> shift).to_f64().unwrap_or(0.0);
        let e = shift - self.prec as i64;
        if e > 1020 {
            if self.mant.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY }
        } else {
            top * 2f64.powi(e as i32)
        }
    }

    /// log2 of |value|, rounded up; `None` for zero. Cheap magnitude probe.
    pub fn log2_abs_ceil(&self) -> Option<i64> {
        if self.mant.is_zero() {
            None
        } else {
            Some(self.mant.bits() as i64 - self.prec as i64)
        }
    }

    /// Re-round to a new precision.
    pub fn with_prec(&self, prec: u32) -> Self {
        if prec >= self.prec {
            Real { mant: &self.mant << (prec - self.prec), prec }
        } else {
            Real { mant: &self.mant >> (self.prec - prec), prec }
        }
    }

    fn check(&self, other: &Real) {
        assert_eq!(self.prec, other.prec, "mixed precisions");
    }

    pub fn add(&self, other: &Real) -> Real {
        self.check(other);
        Real { mant: &self.mant + &other.mant, prec: self.prec }
    }

    pub fn sub(&self, other: &Real) -> Real {
        self.check(other);
        Real { mant: &self.mant - &other.mant, prec: self.prec }
    }

    pub fn neg(&self) -> Real {
        Real { mant: -&self.mant, prec: self.prec }
    }

    pub fn abs(&self) -> Real {
        Real { mant: self.mant.abs(), prec: self.prec }
    }

    pub fn mul(&self, other: &Real) -> Real {
        self.check(other);
        Real { mant: (&self.mant * &other.mant) >> self.prec, prec: self.prec }
    }

    pub fn sqr(&self) -> Real {
        Real { mant: (&self.mant * &self.mant) >> self.prec, prec: self.prec }
    }

    pub fn mul_i64(&self, k: i64) -> Real {
        Real { mant: &self.mant * k, prec: self.prec }
    }

    /// Exact scaling by `2^k`.
    pub fn shl2(&self, k: i64) -> Real {
        let mant = if k >= 0 { &self.mant << k } else { &self.mant >> (-k) };
        Real { mant, prec: self.prec }
    }

    pub fn div(&self, other: &Real) -> Real {
        self.check(other);
        assert!(!other.mant.is_zero(), "division by zero");
        let mut num = &self.mant << self.prec;
        let mut den = other.mant.clone();
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        Real { mant: num.div_floor(&den), prec: self.prec }
    }

    pub fn recip(&self) -> Real {
        Real::one(self.prec).div(self)
    }

    /// Floor square root of a nonnegative value.
    pub fn sqrt(&self) -> Real {
        assert!(!self.mant.is_negative(), "sqrt of negative value");
        Real { mant: (&self.mant << self.prec).sqrt(), prec: self.prec }
    }

    pub fn floor_int(&self) -> BigInt {
        (&self.mant) >> self.prec
    }

    pub fn round_int(&self) -> BigInt {
        (&self.mant + (BigInt::one() << (self.prec - 1))) >> self.prec
    }

    pub fn cmp(&self, other: &Real) -> Ordering {
        self.check(other);
        self.mant.cmp(&other.mant)
    }

    pub fn cmp_abs(&self, other: &Real) -> Ordering {
        self.check(other);
        self.mant.abs().cmp(&other.mant.abs())
    }

    /// `|self| < 2^-k`.
    pub fn abs_below_pow2(&self, k: i64) -> bool {
        if self.mant.is_zero() {
            return true;
        }
        (self.prec as i64) - (self.mant.bits() as i64) > k
    }
}

static PI_CACHE: Lazy<Mutex<HashMap<u32, BigInt>>> = Lazy::new(|| Mutex::new(HashMap::new()));
static LN2_CACHE: Lazy<Mutex<HashMap<u32, BigInt>>> = Lazy::new(|| Mutex::new(HashMap::new()));

/// Fixed-point arctan(1/x) for integer x >= 2, by the alternating series.
fn atan_inv_mant(x: i64, prec: u32) -> BigInt {
    let x2 = BigInt::from(x) * BigInt::from(x);
    let mut term = (BigInt::one() << prec) / BigInt::from(x);
    let mut acc = BigInt::zero();
    let mut k: i64 = 0;
    while !term.is_zero() {
        let t = &term / BigInt::from(2 * k + 1);
        if t.is_zero() {
            break;
        }
        if k % 2 == 0 {
            acc += t;
        } else {
            acc -= t;
        }
        term /= &x2;
        k += 1;
    }
    acc
}

impl Real {
    /// pi, cached per precision. Machin: 16 atan(1/5) - 4 atan(1/239).
    pub fn pi(prec: u32) -> Real {
        if let Some(m) = PI_CACHE.lock().unwrap().get(&prec) {
            return Real { mant: m.clone(), prec };
        }
        let wp = prec + 32;
        let mant: BigInt = (atan_inv_mant(5, wp) * 16 - atan_inv_mant(239, wp) * 4) >> 32;
        PI_CACHE.lock().unwrap().insert(prec, mant.clone());
        Real { mant, prec }
    }

    /// ln 2, cached per precision. 2 atanh(1/3).
    pub fn ln2(prec: u32) -> Real {
        if let Some(m) = LN2_CACHE.lock().unwrap().get(&prec) {
            return Real { mant: m.clone(), prec };
        }
        let wp = prec + 32;
        let mut term = (BigInt::from(2) << wp) / BigInt::from(3);
        let mut acc = BigInt::zero();
        let mut k: i64 = 0;
        while !term.is_zero() {
            let t = &term / BigInt::from(2 * k + 1);
            if t.is_zero() {
                break;
            }
            acc += t;
            term /= 9;
            k += 1;
        }
        let mant: BigInt = acc >> 32;
        LN2_CACHE.lock().unwrap().insert(prec, mant.clone());
        Real { mant, prec }
    }
}
