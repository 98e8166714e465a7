//! Numerical evaluation of theta constants and theta products.
//!
//! `theta[c](tau) = sum_{v in Z^g} exp(pi i (v+c1) tau (v+c1)^t
//!                                     + 2 pi i (v+c1) c2^t)`
//! summed literally over a box that provably captures the requested
//! precision. The lattice phase `(v+c1) c2^t` is kept as an exact rational,
//! so characteristic shifts are exercised by the series itself rather than
//! folded away beforehand.

use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::chars::ThetaChar;
use super::product::ThetaProduct;
use crate::arith::{exp_2pi_i, exp_complex, Complex, Real};
use crate::error::{Error, Result};
use crate::symplectic::PeriodMatrix;

/// Guard bits carried through the term-by-term summation.
const EVAL_GUARD: u32 = 48;

/// Lower bound, in `f64`, for the smallest eigenvalue of `Im tau`. Exact
/// closed form (up to a 1% rounding haircut) for `g <= 2`, Gershgorin
/// beyond that.
fn min_im_eigenvalue(tau: &PeriodMatrix) -> f64 {
    let g = tau.g();
    let y = |i: usize, j: usize| tau.at(i, j).im.to_f64();
    let bound = match g {
        1 => y(0, 0),
        2 => {
            let (a, d, b) = (y(0, 0), y(1, 1), y(0, 1));
            (a + d - ((a - d) * (a - d) + 4.0 * b * b).sqrt()) / 2.0
        }
        _ => (0..g)
            .map(|i| {
                let off: f64 = (0..g).filter(|&j| j != i).map(|j| y(i, j).abs()).sum();
                y(i, i) - off
            })
            .fold(f64::INFINITY, f64::min),
    };
    bound * 0.99
}

/// Evaluates one theta constant to `prec` correct bits.
///
/// Identically vanishing characteristics return an exact zero. The period
/// matrix must carry at least `prec` bits, and `Im tau` must stay at least
/// `2^(-prec/4)` away from degenerate (otherwise the truncation radius, and
/// the run time, explode quadratically).
pub fn theta_eval(ch: &ThetaChar, tau: &PeriodMatrix, prec: u32) -> Result<Complex> {
    if ch.g() != tau.g() {
        return Err(Error::InvalidInput(format!(
            "characteristic has genus {} but tau has genus {}",
            ch.g(),
            tau.g()
        )));
    }
    if prec == 0 {
        return Err(Error::InvalidInput("requested precision must be positive".into()));
    }
    if tau.prec() < prec {
        return Err(Error::Numerical(format!(
            "tau carries {} bits but {prec} were requested",
            tau.prec()
        )));
    }
    if ch.is_identically_zero() {
        return Ok(Complex::zero(prec));
    }
    let g = ch.g();
    let lam = min_im_eigenvalue(tau);
    if !(lam > 2f64.powi(-((prec / 4) as i32))) {
        return Err(Error::Numerical(format!(
            "Im tau is too close to degenerate for {prec} bits (lambda_min ~ {lam:.3e})"
        )));
    }

    // Split c1 = center + frac/den with frac in [0, den); the substitution
    // v -> v - center leaves the series invariant term by term, so the
    // enumeration window stays near the origin for any input numerators.
    let den = ch.den();
    let den_f = den.to_f64().expect("finite denominator");
    let centers: Vec<BigInt> = ch.num1().iter().map(|n| n.div_floor(den)).collect();
    let fracs: Vec<BigInt> =
        ch.num1().iter().zip(&centers).map(|(n, c)| n - den * c).collect();
    let frac_f: Vec<f64> = fracs.iter().map(|f| f.to_f64().unwrap() / den_f).collect();

    // Truncation radius: the tail over ||v + c1|| >= R of exp(-pi lam ||x||^2)
    // is below 2^-(prec+20) once pi lam R^2 exceeds the requested bits plus
    // the shell-count term g ln(2R+1) plus 34 nats of headroom. Three
    // fixed-point rounds converge because R appears only logarithmically.
    let pi_f = std::f64::consts::PI;
    let mut r = 2.0f64;
    for _ in 0..3 {
        r = (((prec as f64) * std::f64::consts::LN_2
            + (g as f64) * (2.0 * r + 1.0).ln()
            + 34.0)
            / (pi_f * lam))
            .sqrt();
    }
    let rr = r * r + 1e-6;

    let lo: Vec<i64> = frac_f.iter().map(|c| (-c - r).ceil() as i64).collect();
    let hi: Vec<i64> = frac_f.iter().map(|c| (-c + r).floor() as i64).collect();
    if lo.iter().zip(&hi).any(|(l, h)| l > h) {
        // no lattice point within R of -c1: the whole series is below the
        // tail bound
        return Ok(Complex::zero(prec));
    }

    let wp = prec + EVAL_GUARD;
    let tauw = tau.tau().with_prec(wp);
    let pi = Real::pi(wp);
    let den2 = den * den;

    // Per-axis tables of the scaled numerator m = den*v + frac, its exact
    // value m/den, and an f64 shadow for the sphere test.
    let axis: Vec<Vec<(BigInt, Real, f64)>> = (0..g)
        .map(|i| {
            (lo[i]..=hi[i])
                .map(|w| {
                    let m = den * w + &fracs[i];
                    let x = Real::from_ratio_parts(&m, den, wp);
                    let xf = m.to_f64().unwrap() / den_f;
                    (m, x, xf)
                })
                .collect()
        })
        .collect();

    let mut acc = Complex::zero(wp);
    let mut idx = vec![0usize; g];
    'points: loop {
        let sumsq: f64 = (0..g).map(|i| axis[i][idx[i]].2 * axis[i][idx[i]].2).sum();
        if sumsq <= rr {
            // Q = x tau x^t
            let mut q = Complex::zero(wp);
            for i in 0..g {
                let mut row = Complex::zero(wp);
                for j in 0..g {
                    row = row.add(&tauw.at(i, j).scale(&axis[j][idx[j]].1));
                }
                q = q.add(&row.scale(&axis[i][idx[i]].1));
            }
            // lattice phase x . c2 = sum m_i n2_i / den^2, exactly
            let mut lnum = BigInt::from(0);
            for i in 0..g {
                lnum += &axis[i][idx[i]].0 * &ch.num2()[i];
            }
            let two_l = Real::from_ratio_parts(&(lnum * 2), &den2, wp);
            // exp(pi i Q + 2 pi i L)
            let term = exp_complex(&Complex::new(
                pi.mul(&q.im).neg(),
                pi.mul(&q.re.add(&two_l)),
            ));
            acc = acc.add(&term);
        }
        // odometer over the box
        let mut k = 0;
        loop {
            if k == g {
                break 'points;
            }
            idx[k] += 1;
            if idx[k] < axis[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
    Ok(acc.with_prec(prec))
}

/// Evaluates a theta product, prefactor included, to `prec` bits.
///
/// A factor that vanishes identically yields an exact zero if it sits in the
/// numerator and an error if it sits in the denominator; a denominator
/// factor that merely evaluates below `2^(-prec)` in absolute value is also
/// rejected rather than amplified.
pub fn eval_product(f: &ThetaProduct, tau: &PeriodMatrix, prec: u32) -> Result<Complex> {
    eval_product_impl(f, tau, prec, None)
}

fn eval_product_impl(
    f: &ThetaProduct,
    tau: &PeriodMatrix,
    prec: u32,
    cache: Option<&ThetaCache>,
) -> Result<Complex> {
    for (ch, e) in f.factors() {
        if e < 0 && ch.is_identically_zero() {
            return Err(Error::Numerical(
                "denominator theta constant vanishes identically".into(),
            ));
        }
    }
    if f.factors().any(|(ch, e)| e > 0 && ch.is_identically_zero()) {
        return Ok(Complex::zero(prec));
    }
    let wp = prec + 16;
    let mut acc = exp_2pi_i(f.prefactor(), wp);
    for (ch, e) in f.factors() {
        let v = match cache {
            Some(c) => c.eval(ch, tau, wp)?,
            None => theta_eval(ch, tau, wp)?,
        };
        if e > 0 {
            acc = acc.mul(&v.pow_u64(e as u64));
        } else {
            if v.norm2().abs_below_pow2(-(2 * prec as i64)) {
                return Err(Error::Numerical(format!(
                    "theta denominator vanishes numerically at exponent {e}"
                )));
            }
            acc = acc.mul(&v.recip().pow_u64(e.unsigned_abs()));
        }
    }
    Ok(acc.with_prec(prec))
}

/// Process-local memoization of theta constants, keyed by characteristic,
/// a digest of the period matrix mantissas, and the precision.
#[derive(Default)]
pub struct ThetaCache {
    map: Mutex<HashMap<(ThetaChar, u64, u32), Complex>>,
}

fn tau_digest(tau: &PeriodMatrix) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    tau.g().hash(&mut h);
    tau.prec().hash(&mut h);
    for i in 0..tau.g() {
        for j in 0..tau.g() {
            tau.at(i, j).re.mant().hash(&mut h);
            tau.at(i, j).im.mant().hash(&mut h);
        }
    }
    h.finish()
}

impl ThetaCache {
    pub fn new() -> ThetaCache {
        ThetaCache::default()
    }

    /// Cached [`theta_eval`].
    pub fn eval(&self, ch: &ThetaChar, tau: &PeriodMatrix, prec: u32) -> Result<Complex> {
        let key = (ch.clone(), tau_digest(tau), prec);
        if let Some(v) = self.map.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let v = theta_eval(ch, tau, prec)?;
        self.map.lock().unwrap().insert(key, v.clone());
        Ok(v)
    }

    /// Cached [`eval_product`]; factors shared between products are
    /// evaluated once per `(tau, prec)`.
    pub fn eval_product(&self, f: &ThetaProduct, tau: &PeriodMatrix, prec: u32) -> Result<Complex> {
        eval_product_impl(f, tau, prec, Some(self))
    }

    pub fn len(&self) -> usize {
        self.map.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::CMatrix;
    use num_rational::BigRational;

    fn pm(entries: &[(i64, i64, i64)], g: usize, prec: u32) -> PeriodMatrix {
        let data: Vec<Complex> = entries
            .iter()
            .map(|&(re_n, im_n, d)| {
                Complex::from_rationals(
                    &BigRational::new(BigInt::from(re_n), BigInt::from(d)),
                    &BigRational::new(BigInt::from(im_n), BigInt::from(d)),
                    prec,
                )
            })
            .collect();
        PeriodMatrix::new(CMatrix::new(g, g, data)).unwrap()
    }

    fn theta_g1(n1: i64, n2: i64, tau: &PeriodMatrix, prec: u32) -> Complex {
        theta_eval(&ThetaChar::from_small(2, &[n1], &[n2]).unwrap(), tau, prec).unwrap()
    }

    #[test]
    fn classical_values_on_the_imaginary_axis() {
        let prec = 220;
        let tau = pm(&[(0, 1, 1)], 1, prec);
        // theta[0,0](i) = pi^(1/4) / Gamma(3/4)
        let t00 = theta_g1(0, 0, &tau, prec);
        assert!((t00.re.to_f64() - 1.0864348112133080).abs() < 1e-15);
        assert!(t00.im.is_zero() || t00.im.abs_below_pow2(-(prec as i64) + 8));
        // theta[0,1/2](i) = theta[1/2,0](i)
        let t01 = theta_g1(0, 1, &tau, prec);
        let t10 = theta_g1(1, 0, &tau, prec);
        assert!(t01.close_to(&t10, -(prec as i64) + 12));
        // the odd characteristic vanishes identically
        let odd = theta_g1(1, 1, &tau, prec);
        assert!(odd.re.is_zero() && odd.im.is_zero());
    }

    #[test]
    fn jacobi_quartic_identity() {
        let prec = 200;
        for tau in [pm(&[(0, 1, 1)], 1, prec), pm(&[(1, 2, 3)], 1, prec), pm(&[(-2, 7, 5)], 1, prec)] {
            let a = theta_g1(0, 0, &tau, prec).pow_u64(4);
            let b = theta_g1(0, 1, &tau, prec).pow_u64(4);
            let c = theta_g1(1, 0, &tau, prec).pow_u64(4);
            assert!(a.close_to(&b.add(&c), -(prec as i64) + 24));
        }
    }

    #[test]
    fn diagonal_period_matrices_split_into_products() {
        let prec = 180;
        let tau2 = pm(&[(0, 1, 1), (0, 0, 1), (0, 0, 1), (0, 2, 1)], 2, prec);
        let tau_a = pm(&[(0, 1, 1)], 1, prec);
        let tau_b = pm(&[(0, 2, 1)], 1, prec);
        // theta[(a,b),(c,d)](diag) = theta[a,c](tau_a) theta[b,d](tau_b)
        for (a, b, c, d) in [(0, 0, 0, 0), (1, 0, 0, 1), (0, 1, 1, 0), (1, 1, 0, 0)] {
            let joint = theta_eval(
                &ThetaChar::from_small(2, &[a, b], &[c, d]).unwrap(),
                &tau2,
                prec,
            )
            .unwrap();
            let split = theta_g1(a, c, &tau_a, prec).mul(&theta_g1(b, d, &tau_b, prec));
            assert!(joint.close_to(&split, -(prec as i64) + 24));
        }
    }

    #[test]
    fn shifting_c2_multiplies_by_the_lattice_phase() {
        let prec = 160;
        let tau = pm(&[(1, 5, 4), (1, 1, 4), (1, 1, 4), (-1, 7, 4)], 2, prec);
        let base = ThetaChar::from_small(2, &[1, 0], &[1, 1]).unwrap();
        // c2 -> c2 + (2, -3): numerators shift by den * n2
        let shifted = ThetaChar::from_small(2, &[1, 0], &[1 + 2 * 2, 1 - 2 * 3]).unwrap();
        // phase c1 . n2^t = 1/2 * 2 + 0 * (-3) = 1
        let lhs = theta_eval(&shifted, &tau, prec).unwrap();
        let rhs = theta_eval(&base, &tau, prec).unwrap();
        assert!(lhs.close_to(&rhs, -(prec as i64) + 24));
        // c1 -> c1 + (1, -1) leaves the value untouched (pure relabeling)
        let c1shift = ThetaChar::from_small(2, &[1 + 2, 0 - 2], &[1, 1]).unwrap();
        let lhs = theta_eval(&c1shift, &tau, prec).unwrap();
        assert!(lhs.close_to(&rhs, -(prec as i64) + 24));
        // an integer c2 shift with odd pairing picks up the phase e(1/2) = -1
        let odd_shift = ThetaChar::from_small(2, &[1, 0], &[1 + 2, 1]).unwrap();
        let lhs = theta_eval(&odd_shift, &tau, prec).unwrap();
        assert!(lhs.close_to(&rhs.neg(), -(prec as i64) + 24));
    }

    #[test]
    fn truncation_is_stable_across_precisions() {
        let hi_prec = 320;
        let tau_hi = pm(&[(1, 10, 7)], 1, hi_prec);
        let lo = theta_g1(0, 0, &tau_hi, 128);
        let hi = theta_g1(0, 0, &tau_hi, hi_prec);
        assert!(lo.close_to(&hi.with_prec(128), -120));
    }

    #[test]
    fn product_evaluation_handles_prefactors_and_inverses() {
        let prec = 150;
        let tau = pm(&[(0, 1, 1), (0, 1, 3), (0, 1, 3), (0, 3, 2)], 2, prec);
        // the empty product is exactly 1
        let one = eval_product(&ThetaProduct::one(), &tau, prec).unwrap();
        assert_eq!(one.re, Real::one(prec));
        assert!(one.im.is_zero());
        // f * f^-1 evaluates to 1
        let f: ThetaProduct = "zeta8^2 * t12^6 / (t8^2 * t9^2 * t15^2)".parse().unwrap();
        let v = eval_product(&f, &tau, prec).unwrap();
        let w = eval_product(&f.inv(), &tau, prec).unwrap();
        assert!(v.mul(&w).close_to(&Complex::one(prec), -(prec as i64) + 30));
        // the zeta8^2 prefactor is an exact factor of i
        let bare = eval_product(&f.with_zeta8(-2), &tau, prec).unwrap();
        assert!(v.close_to(&bare.mul_i(), -(prec as i64) + 30));
        // an identically vanishing numerator factor collapses to exact zero
        let z = ThetaProduct::from_factor(ThetaChar::from_dupont(5).unwrap(), 1);
        assert!(eval_product(&z, &tau, prec).unwrap().is_zero());
        // ... and in the denominator it is an error
        let z = z.inv();
        assert!(matches!(eval_product(&z, &tau, prec), Err(Error::Numerical(_))));
    }

    #[test]
    fn rejections() {
        let prec = 64;
        let tau = pm(&[(0, 1, 1)], 1, prec);
        // more bits requested than tau carries
        assert!(matches!(
            theta_eval(&ThetaChar::from_small(2, &[0], &[0]).unwrap(), &tau, 128),
            Err(Error::Numerical(_))
        ));
        // genus mismatch
        assert!(matches!(
            theta_eval(&ThetaChar::from_small(2, &[0, 0], &[0, 0]).unwrap(), &tau, prec),
            Err(Error::InvalidInput(_))
        ));
        // Im tau too small for the requested precision
        let thin = pm(&[(0, 1, 1 << 20)], 1, prec);
        assert!(matches!(
            theta_eval(&ThetaChar::from_small(2, &[0], &[0]).unwrap(), &thin, prec),
            Err(Error::Numerical(_))
        ));
    }

    #[test]
    fn cache_deduplicates_work() {
        let prec = 140;
        let tau = pm(&[(0, 1, 1), (0, 1, 3), (0, 1, 3), (0, 3, 2)], 2, prec);
        let cache = ThetaCache::new();
        let f: ThetaProduct = "t12^6 / (t8^2 * t9^2 * t15^2)".parse().unwrap();
        let v1 = cache.eval_product(&f, &tau, prec).unwrap();
        let hits = cache.len();
        assert_eq!(hits, 4);
        let v2 = cache.eval_product(&f, &tau, prec).unwrap();
        assert_eq!(cache.len(), hits);
        assert_eq!(v1.re.mant(), v2.re.mant());
        let direct = eval_product(&f, &tau, prec).unwrap();
        assert!(v1.close_to(&direct, -(prec as i64) + 20));
    }
}
