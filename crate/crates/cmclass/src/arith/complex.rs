//! Complex numbers over [`Real`].

use std::fmt;

use num_rational::BigRational;

use super::Real;

#[derive(Clone, PartialEq, Eq)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Complex({:.6e} + {:.6e} i)", self.re.to_f64(), self.im.to_f64())
    }
}

impl Complex {
    pub fn new(re: Real, im: Real) -> Self {
        assert_eq!(re.prec(), im.prec(), "mixed precisions");
        Complex { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        Complex { re: Real::zero(prec), im: Real::zero(prec) }
    }

    pub fn one(prec: u32) -> Self {
        Complex { re: Real::one(prec), im: Real::zero(prec) }
    }

    pub fn from_real(re: Real) -> Self {
        let prec = re.prec();
        Complex { re, im: Real::zero(prec) }
    }

    pub fn from_rationals(re: &BigRational, im: &BigRational, prec: u32) -> Self {
        Complex { re: Real::from_rational(re, prec), im: Real::from_rational(im, prec) }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Complex { re: self.re.with_prec(prec), im: self.im.with_prec(prec) }
    }

    pub fn add(&self, other: &Complex) -> Complex {
        Complex { re: self.re.add(&other.re), im: self.im.add(&other.im) }
    }

    pub fn sub(&self, other: &Complex) -> Complex {
        Complex { re: self.re.sub(&other.re), im: self.im.sub(&other.im) }
    }

    pub fn neg(&self) -> Complex {
        Complex { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn conj(&self) -> Complex {
        Complex { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn mul(&self, other: &Complex) -> Complex {
        let re = self.re.mul(&other.re).sub(&self.im.mul(&other.im));
        let im = self.re.mul(&other.im).add(&self.im.mul(&other.re));
        Complex { re, im }
    }

    pub fn sqr(&self) -> Complex {
        let re = self.re.sqr().sub(&self.im.sqr());
        let im = self.re.mul(&self.im).shl2(1);
        Complex { re, im }
    }

    pub fn scale(&self, s: &Real) -> Complex {
        Complex { re: self.re.mul(s), im: self.im.mul(s) }
    }

    pub fn mul_i64(&self, k: i64) -> Complex {
        Complex { re: self.re.mul_i64(k), im: self.im.mul_i64(k) }
    }

    pub fn shl2(&self, k: i64) -> Complex {
        Complex { re: self.re.shl2(k), im: self.im.shl2(k) }
    }

    /// Multiplication by i.
    pub fn mul_i(&self) -> Complex {
        Complex { re: self.im.neg(), im: self.re.clone() }
    }

    pub fn norm2(&self) -> Real {
        self.re.sqr().add(&self.im.sqr())
    }

    pub fn abs(&self) -> Real {
        self.norm2().sqrt()
    }

    pub fn recip(&self) -> Complex {
        let n = self.norm2();
        assert!(!n.is_zero(), "division by zero");
        Complex { re: self.re.div(&n), im: self.im.neg().div(&n) }
    }

    pub fn div(&self, other: &Complex) -> Complex {
        self.mul(&other.recip())
    }

    /// Principal branch square root.
    pub fn sqrt(&self) -> Complex {
        let prec = self.prec();
        let m = self.abs();
        let half = |x: &Real| x.shl2(-1);
        let u2 = half(&m.add(&self.re));
        let v2 = half(&m.sub(&self.re));
        let u = u2.sqrt();
        let v = v2.sqrt();
        // Im >= 0 picks +v; Im < 0 picks -v. Im == 0, Re < 0 maps to +i sqrt(|Re|).
        if self.im.is_negative() {
            Complex { re: u, im: v.neg() }
        } else {
            let _ = prec;
            Complex { re: u, im: v }
        }
    }

    pub fn pow_u64(&self, mut e: u64) -> Complex {
        let mut base = self.clone();
        let mut acc = Complex::one(self.prec());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr();
            }
        }
        acc
    }

    /// `|self - other| < 2^-k` componentwise.
    pub fn close_to(&self, other: &Complex, k: i64) -> bool {
        self.re.sub(&other.re).abs_below_pow2(k) && self.im.sub(&other.im).abs_below_pow2(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_principal_branch() {
        let prec = 160;
        // sqrt(-4) = 2i
        let z = Complex::new(Real::from_i64(-4, prec), Real::zero(prec));
        let s = z.sqrt();
        assert!(s.re.abs_below_pow2(70));
        assert!(s.im.sub(&Real::from_i64(2, prec)).abs_below_pow2(70));
        // sqrt(z)^2 = z for a generic value in the lower half plane
        let z = Complex::new(Real::from_i64(3, prec), Real::from_i64(-7, prec));
        let s = z.sqrt();
        assert!(s.sqr().close_to(&z, 150));
        assert!(!s.re.is_negative());
    }

    #[test]
    fn recip_mul_roundtrip() {
        let prec = 160;
        let z = Complex::new(Real::from_i64(5, prec), Real::from_i64(-2, prec));
        let w = z.recip().mul(&z);
        assert!(w.close_to(&Complex::one(prec), 150));
    }
}
