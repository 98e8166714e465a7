//! Elementary functions: exp, cos/sin, and exponentials of rational phases.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use super::{Complex, Real};

/// Guard bits for internal computation of elementary functions.
const GUARD: u32 = 96;
/// Argument-halving steps before the Taylor series.
const HALVINGS: u32 = 24;

impl Real {
    /// exp(x). Range-reduces by ln 2, halves the remainder, and squares back.
    pub fn exp(&self) -> Real {
        let prec = self.prec();
        let wp = prec + GUARD;
        let x = self.with_prec(wp);
        let ln2 = Real::ln2(wp);
        let n = x.div(&ln2).round_int();
        // exp underflows to, or overflows beyond, representable range
        let nb = n.to_i64().expect("exp argument out of range");
        assert!(nb.unsigned_abs() < 1 << 34, "exp argument out of range");
        if nb < -(wp as i64) - 4 {
            return Real::zero(prec);
        }
        let r = x.sub(&ln2.mul(&Real::from_bigint(&n, wp)));
        let r = r.shl2(-(HALVINGS as i64));
        // Taylor sum of exp(r), |r| < 2^-HALVINGS
        let mut term = Real::one(wp);
        let mut acc = Real::one(wp);
        let mut k: i64 = 1;
        loop {
            term = term.mul(&r);
            term = term.div(&Real::from_i64(k, wp));
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term);
            k += 1;
        }
        for _ in 0..HALVINGS {
            acc = acc.sqr();
        }
        acc.shl2(nb).with_prec(prec)
    }
}

/// cos(x) + i sin(x). Reduces mod 2 pi, halves, Taylor, squares back.
pub fn cis(x: &Real) -> Complex {
    let prec = x.prec();
    let wp = prec + GUARD;
    let x = x.with_prec(wp);
    let two_pi = Real::pi(wp).shl2(1);
    let k = x.div(&two_pi).round_int();
    let x = x.sub(&two_pi.mul(&Real::from_bigint(&k, wp)));
    let y = x.shl2(-(HALVINGS as i64));
    // cos/sin Taylor at |y| < 2^-HALVINGS
    let mut cos = Real::one(wp);
    let mut sin = y.clone();
    let mut term = y.clone();
    let mut k: i64 = 2;
    loop {
        term = term.mul(&y).div(&Real::from_i64(k, wp));
        if term.is_zero() {
            break;
        }
        // k even: cos term, sign (-1)^(k/2); k odd: sin term, sign (-1)^((k-1)/2)
        let sgn = if (k / 2) % 2 == 0 { 1 } else { -1 };
        if k % 2 == 0 {
            cos = cos.add(&term.mul_i64(sgn));
        } else {
            sin = sin.add(&term.mul_i64(sgn));
        }
        k += 1;
    }
    let mut z = Complex::new(cos, sin);
    for _ in 0..HALVINGS {
        z = z.sqr();
    }
    z.with_prec(prec)
}

/// exp(z) for complex z.
pub fn exp_complex(z: &Complex) -> Complex {
    let m = z.re.exp();
    cis(&z.im).scale(&m)
}

/// exp(2 pi i q) for rational q; exact for denominators 1, 2, 4.
pub fn exp_2pi_i(q: &BigRational, prec: u32) -> Complex {
    let q = q - q.floor();
    let den = q.denom();
    let num = q.numer();
    if den.is_one() {
        return Complex::one(prec);
    }
    if *den == BigInt::from(2) {
        return Complex::one(prec).neg();
    }
    if *den == BigInt::from(4) {
        let z = Complex::new(Real::zero(prec), Real::one(prec));
        let r = num.mod_floor(&BigInt::from(4)).to_u64().unwrap();
        return z.pow_u64(r);
    }
    let wp = prec + GUARD;
    let angle = Real::pi(wp).shl2(1).mul(&Real::from_rational(&q, wp));
    cis(&angle).with_prec(prec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_one_is_e() {
        let e = Real::one(200).exp();
        assert!((e.to_f64() - std::f64::consts::E).abs() < 1e-14);
        // exp(1) exp(-1) = 1
        let p = e.mul(&Real::from_i64(-1, 200).exp());
        assert!(p.sub(&Real::one(200)).abs_below_pow2(190));
    }

    #[test]
    fn cis_is_on_unit_circle_and_additive() {
        let prec = 200;
        let a = Real::from_rational(&BigRational::new(BigInt::from(7), BigInt::from(5)), prec);
        let b = Real::from_rational(&BigRational::new(BigInt::from(-31), BigInt::from(9)), prec);
        let za = cis(&a);
        let zb = cis(&b);
        assert!(za.norm2().sub(&Real::one(prec)).abs_below_pow2(prec as i64 - 10));
        let sum = cis(&a.add(&b));
        assert!(za.mul(&zb).close_to(&sum, prec as i64 - 10));
    }

    #[test]
    fn roots_of_unity() {
        let prec = 192;
        let q = BigRational::new(BigInt::one(), BigInt::from(8));
        let z = exp_2pi_i(&q, prec);
        // zeta_8^8 = 1, zeta_8^4 = -1
        assert!(z.pow_u64(8).close_to(&Complex::one(prec), prec as i64 - 12));
        assert!(z.pow_u64(4).close_to(&Complex::one(prec).neg(), prec as i64 - 12));
        // real and imaginary parts are sqrt(1/2)
        let h = Real::from_rational(&BigRational::new(BigInt::one(), BigInt::from(2)), prec).sqrt();
        assert!(z.re.sub(&h).abs_below_pow2(prec as i64 - 12));
    }

    #[test]
    fn exp_complex_matches_product_form() {
        let prec = 200;
        let z = Complex::new(Real::from_i64(-2, prec), Real::from_i64(3, prec));
        let w = exp_complex(&z);
        let expected_abs = Real::from_i64(-2, prec).exp();
        assert!(w.abs().sub(&expected_abs).abs_below_pow2(prec as i64 - 16));
    }
}
