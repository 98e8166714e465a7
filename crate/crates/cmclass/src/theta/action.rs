//! Action of `GSp_2g(Z/NZ)` on quotients of theta constants of level
//! `N = 2 den^2`.
//!
//! For a matrix `A` with blocks `(a, b; c, d)`, multiplier `nu`, and any
//! integer lifts of the entries and of `t = nu^-1 mod N`, a characteristic
//! `c = (c1; c2)` maps to
//!
//! `(d1; d2) = A^t (c1 - (t/2) diag(c d^t); c2 - (t/2) diag(a b^t))`
//!
//! and each factor `theta[c]` picks up the exact phase `e(r)` with
//!
//! `r = (t (d d1 - c d2)^t (-b d1 + a d2 + diag(a b^t)) - d1^t d2) / 2`.
//!
//! On balanced quotients (total exponent zero) the automorphy factors
//! cancel, so the action is an exact map of formal products; the constant
//! prefactor `e(rho)` transforms through the cyclotomic character as
//! `rho -> nu rho`. Everything below works with the scaled numerators
//! `n = den * c`, which keeps all intermediates integral except the final
//! rational phase with denominator dividing `2 den^2`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::chars::ThetaChar;
use super::eval::theta_eval;
use super::product::ThetaProduct;
use crate::arith::{exp_2pi_i, CMatrix, Complex, Real};
use crate::error::{Error, Result};
use crate::linalg::ZMat;
use crate::symplectic::{act_on_h, mod_inverse, PeriodMatrix, SympMatrix, SympMatrixModN};

fn block(m: &ZMat, ri: usize, ci: usize, g: usize) -> Vec<Vec<BigInt>> {
    (0..g)
        .map(|i| (0..g).map(|j| m.at(ri + i, ci + j).clone()).collect())
        .collect()
}

/// `diag(X Y^t)` as a vector: entry `i` is `sum_k X[i][k] Y[i][k]`.
fn diag_xyt(x: &[Vec<BigInt>], y: &[Vec<BigInt>]) -> Vec<BigInt> {
    x.iter()
        .zip(y)
        .map(|(xr, yr)| xr.iter().zip(yr).map(|(p, q)| p * q).sum())
        .collect()
}

fn dot(x: &[BigInt], y: &[BigInt]) -> BigInt {
    x.iter().zip(y).map(|(p, q)| p * q).sum()
}

/// Image characteristic and exact phase for one theta factor under the lift
/// `(a, b; c, d)` with `t` lifting the inverse multiplier. The output
/// characteristic is unreduced; reduction happens when the factors are
/// reassembled into a product.
pub(crate) fn transform_char(
    lift: &ZMat,
    t: &BigInt,
    ch: &ThetaChar,
) -> (ThetaChar, BigRational) {
    let g = ch.g();
    assert_eq!(lift.rows, 2 * g, "lift size does not match characteristic genus");
    assert_eq!(lift.rows, lift.cols, "lift must be square");
    let den = ch.den();
    let half_den = den / 2;
    let a = block(lift, 0, 0, g);
    let b = block(lift, 0, g, g);
    let c = block(lift, g, 0, g);
    let d = block(lift, g, g, g);
    let diag_ab = diag_xyt(&a, &b);
    let diag_cd = diag_xyt(&c, &d);

    let u1: Vec<BigInt> = (0..g)
        .map(|i| &ch.num1()[i] - &half_den * t * &diag_cd[i])
        .collect();
    let u2: Vec<BigInt> = (0..g)
        .map(|i| &ch.num2()[i] - &half_den * t * &diag_ab[i])
        .collect();
    // (m1; m2) = A^t (u1; u2)
    let m1: Vec<BigInt> = (0..g)
        .map(|i| (0..g).map(|k| &a[k][i] * &u1[k] + &c[k][i] * &u2[k]).sum())
        .collect();
    let m2: Vec<BigInt> = (0..g)
        .map(|i| (0..g).map(|k| &b[k][i] * &u1[k] + &d[k][i] * &u2[k]).sum())
        .collect();
    // scaled arguments of the phase bilinear form
    let w1: Vec<BigInt> = (0..g)
        .map(|i| (0..g).map(|k| &d[i][k] * &m1[k] - &c[i][k] * &m2[k]).sum())
        .collect();
    let w2: Vec<BigInt> = (0..g)
        .map(|i| {
            let s: BigInt = (0..g).map(|k| &a[i][k] * &m2[k] - &b[i][k] * &m1[k]).sum();
            s + den * &diag_ab[i]
        })
        .collect();
    let r = BigRational::new(t * dot(&w1, &w2) - dot(&m1, &m2), BigInt::from(2) * den * den);
    let image = ThetaChar::new(den.clone(), m1, m2).expect("transform preserves the denominator");
    (image, r)
}

/// Applies `A in GSp_2g(Z/NZ)` to a balanced theta product of level `N`.
///
/// The composite is a right action: `(f^A)^B = f^(AB)`. The result does not
/// depend on the choice of entry lifts, which [`gsp_action_with_lifts`]
/// exposes for direct verification.
pub fn gsp_action(a: &SympMatrixModN, f: &ThetaProduct) -> Result<ThetaProduct> {
    if let Some(level) = f.level() {
        if *a.modulus() != level {
            return Err(Error::InvalidInput(format!(
                "matrix modulus {} does not match the product level {level}",
                a.modulus()
            )));
        }
        if a.g() != f.factors().next().map(|(ch, _)| ch.g()).unwrap_or(a.g()) {
            return Err(Error::InvalidInput("matrix genus does not match the product".into()));
        }
    }
    let t = mod_inverse(a.nu(), a.modulus()).ok_or_else(|| Error::NotInvertible {
        modulus: a.modulus().clone(),
    })?;
    gsp_action_with_lifts(a.mat(), &t, a.nu(), f)
}

/// [`gsp_action`] with explicit integer lifts: `lift` reduces to the matrix
/// entries, `t` to the inverse multiplier, and `nu` to the multiplier, all
/// modulo the product level `N`. Any choice of lifts yields the same
/// product, provided the prefactor denominator divides `N` (always true for
/// products produced by this module).
pub fn gsp_action_with_lifts(
    lift: &ZMat,
    t: &BigInt,
    nu: &BigInt,
    f: &ThetaProduct,
) -> Result<ThetaProduct> {
    if !f.is_balanced() {
        return Err(Error::UnbalancedProduct(f.total_exponent()));
    }
    let mut prefactor = f.prefactor() * BigRational::from_integer(nu.clone());
    let mut factors = Vec::with_capacity(f.num_factors());
    for (ch, e) in f.factors() {
        let (image, r) = transform_char(lift, t, ch);
        prefactor += r * BigRational::from_integer(BigInt::from(e));
        factors.push((image, e));
    }
    Ok(ThetaProduct::new(prefactor, factors))
}

fn integral_lift(a: &SympMatrix) -> Result<ZMat> {
    if !a.is_integral() {
        return Err(Error::InvalidInput("matrix must have integer entries".into()));
    }
    let n = 2 * a.g();
    let mut m = ZMat::zero(n, n);
    for i in 0..n {
        for j in 0..n {
            *m.at_mut(i, j) = a.mat().at(i, j).to_integer();
        }
    }
    Ok(m)
}

/// Estimates the eighth-root-of-unity constant `kappa(A)` in the automorphy
/// relation `theta[0](A tau) = kappa(A) sqrt(det(c tau + d)) e(r)
/// theta[image](tau)` for integral symplectic `A` (multiplier 1), returning
/// the exponent `j` with `kappa = zeta_8^j`.
///
/// The square root uses the principal branch, so `j` is well defined modulo
/// a possible shift by 4; `kappa^2 = zeta_4^j` and all statements about
/// `kappa^2` and `kappa^4` are branch-independent.
pub fn kappa_estimate(a: &SympMatrix, tau: &PeriodMatrix, prec: u32) -> Result<u8> {
    if a.g() != tau.g() {
        return Err(Error::InvalidInput("matrix and tau genus differ".into()));
    }
    if !a.nu().is_one() {
        return Err(Error::InvalidInput(
            "kappa is defined for multiplier-1 symplectic matrices".into(),
        ));
    }
    if tau.prec() < prec {
        return Err(Error::Numerical(format!(
            "tau carries {} bits but {prec} were requested",
            tau.prec()
        )));
    }
    let g = a.g();
    let lift = integral_lift(a)?;
    let char0 = ThetaChar::new(BigInt::from(2), vec![BigInt::zero(); g], vec![BigInt::zero(); g])
        .expect("zero characteristic");
    let (image, r) = transform_char(&lift, &BigInt::one(), &char0);

    let atau = act_on_h(a, tau)?;
    let lhs = theta_eval(&char0, &atau, prec)?;
    let rhs = theta_eval(&image, tau, prec)?;
    if rhs.norm2().abs_below_pow2(-(prec as i64)) {
        return Err(Error::Numerical("transformed theta constant vanishes at tau".into()));
    }
    // det(c tau + d) at the working precision
    let zblock = |ri: usize, ci: usize| -> CMatrix {
        let mut out = CMatrix::zero(g, g, prec);
        for i in 0..g {
            for j in 0..g {
                *out.at_mut(i, j) =
                    Complex::from_real(Real::from_bigint(lift.at(ri + i, ci + j), prec));
            }
        }
        out
    };
    let ctd = zblock(g, 0).mul(&tau.tau().with_prec(prec)).add(&zblock(g, g));
    let scale = ctd.det().sqrt().mul(&exp_2pi_i(&r, prec)).mul(&rhs);
    if scale.norm2().abs_below_pow2(-(prec as i64)) {
        return Err(Error::Numerical("automorphy denominator vanishes at tau".into()));
    }
    let kappa = lhs.div(&scale);

    let mut best = (f64::INFINITY, 0u8);
    for j in 0..8u8 {
        let root = exp_2pi_i(&BigRational::new(BigInt::from(j), BigInt::from(8)), prec);
        let dist = kappa.sub(&root).abs().to_f64();
        if dist < best.0 {
            best = (dist, j);
        }
    }
    let ambiguity = 2f64.powi(-((prec / 4) as i32)).max(0.2);
    if best.0 > ambiguity {
        return Err(Error::Numerical(format!(
            "kappa estimate ({:.6}, {:.6}) is not near an 8th root of unity",
            kappa.re.to_f64(),
            kappa.im.to_f64()
        )));
    }
    Ok(best.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn sp(rows: [[i64; 4]; 4]) -> SympMatrix {
        let rows: Vec<Vec<BigInt>> =
            rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        SympMatrix::from_int_rows(&rows).unwrap()
    }

    fn invariant_quotient() -> ThetaProduct {
        "zeta8^2 * t12^6 / (t8^2 * t9^2 * t15^2)".parse().unwrap()
    }

    fn simple_quotient() -> ThetaProduct {
        "t0 * t1 / (t2 * t3)".parse().unwrap()
    }

    /// Random word in generators of `Sp_4(Z)`: the symplectic involution,
    /// unit upper translations, and GL(2) embeddings.
    fn random_sp4(rng: &mut ChaCha8Rng, len: usize) -> SympMatrix {
        let mut m = SympMatrix::identity(2);
        for _ in 0..len {
            let pick = rng.gen_range(0..3u8);
            let f = match pick {
                0 => SympMatrix::omega(2),
                1 => {
                    let (p, q, s) = (
                        rng.gen_range(-2i64..=2),
                        rng.gen_range(-2i64..=2),
                        rng.gen_range(-2i64..=2),
                    );
                    sp([[1, 0, p, q], [0, 1, q, s], [0, 0, 1, 0], [0, 0, 0, 1]])
                }
                _ => {
                    // [[U, 0], [0, U^-t]] for U = [[1, k], [0, 1]] or a swap
                    if rng.gen_bool(0.5) {
                        let k = rng.gen_range(-2i64..=2);
                        sp([[1, k, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, -k, 1]])
                    } else {
                        sp([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
                    }
                }
            };
            m = m.mul(&f);
        }
        m
    }

    fn tau_fixture(prec: u32) -> PeriodMatrix {
        let e = |re: BigRational, im: BigRational| Complex::from_rationals(&re, &im, prec);
        let data = vec![
            e(ratio(1, 5), ratio(3, 2)),
            e(ratio(-1, 7), ratio(1, 3)),
            e(ratio(-1, 7), ratio(1, 3)),
            e(ratio(1, 11), ratio(9, 5)),
        ];
        PeriodMatrix::new(CMatrix::new(2, 2, data)).unwrap()
    }

    #[test]
    fn identity_fixes_every_product() {
        let id = SympMatrixModN::identity(2, BigInt::from(8)).unwrap();
        for f in [invariant_quotient(), simple_quotient(), ThetaProduct::one()] {
            assert_eq!(gsp_action(&id, &f).unwrap(), f);
        }
    }

    #[test]
    fn the_section_scales_the_second_characteristic_half() {
        // theta[c1, c2]^i(t) = theta[c1, t c2] with no extra phase, and the
        // constant prefactor moves through the cyclotomic character.
        let f = invariant_quotient();
        for t in [3i64, 5, 7] {
            let sec = SympMatrixModN::section_i(2, BigInt::from(8), &BigInt::from(t)).unwrap();
            let acted = gsp_action(&sec, &f).unwrap();
            let expected = ThetaProduct::new(
                ratio(2 * t, 8),
                f.factors().map(|(ch, e)| {
                    let scaled: Vec<BigInt> = ch.num2().iter().map(|x| x * t).collect();
                    (
                        ThetaChar::new(ch.den().clone(), ch.num1().to_vec(), scaled).unwrap(),
                        e,
                    )
                }),
            );
            assert_eq!(acted, expected);
        }
    }

    #[test]
    fn unbalanced_products_are_rejected() {
        let f = ThetaProduct::from_factor(ThetaChar::from_dupont(0).unwrap(), 2);
        let id = SympMatrixModN::identity(2, BigInt::from(8)).unwrap();
        assert!(matches!(gsp_action(&id, &f), Err(Error::UnbalancedProduct(2))));
    }

    #[test]
    fn mismatched_levels_are_rejected() {
        let f = invariant_quotient();
        let id = SympMatrixModN::identity(2, BigInt::from(6)).unwrap();
        assert!(matches!(gsp_action(&id, &f), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn lifts_do_not_matter() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x6163_7469_6f6e_0001);
        let n = BigInt::from(8);
        let f = invariant_quotient();
        for _ in 0..25 {
            let a = random_sp4(&mut rng, 5).reduce_mod(&n).unwrap();
            let t = mod_inverse(a.nu(), &n).unwrap();
            let base = gsp_action(&a, &f).unwrap();
            // shift every entry and both scalars by random multiples of N
            let mut shifted = a.mat().clone();
            for i in 0..4 {
                for j in 0..4 {
                    *shifted.at_mut(i, j) += &n * BigInt::from(rng.gen_range(-5i64..=5));
                }
            }
            let t2 = &t + &n * BigInt::from(rng.gen_range(-5i64..=5));
            let nu2 = a.nu() + &n * BigInt::from(rng.gen_range(-5i64..=5));
            let alt = gsp_action_with_lifts(&shifted, &t2, &nu2, &f).unwrap();
            assert_eq!(base, alt);
        }
    }

    #[test]
    fn composition_is_a_right_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x6163_7469_6f6e_0002);
        let n = BigInt::from(8);
        for f in [invariant_quotient(), simple_quotient()] {
            for _ in 0..25 {
                let a = random_sp4(&mut rng, 4);
                let b = random_sp4(&mut rng, 4);
                let am = a.reduce_mod(&n).unwrap();
                let bm = b.reduce_mod(&n).unwrap();
                let ab = a.mul(&b).reduce_mod(&n).unwrap();
                let step = gsp_action(&bm, &gsp_action(&am, &f).unwrap()).unwrap();
                let joint = gsp_action(&ab, &f).unwrap();
                assert_eq!(step, joint);
            }
        }
    }

    #[test]
    fn action_matches_the_transformation_law_numerically() {
        let prec = 100;
        let tau = tau_fixture(prec + 64);
        let mut rng = ChaCha8Rng::seed_from_u64(0x6163_7469_6f6e_0003);
        let n = BigInt::from(8);
        let f = invariant_quotient();
        for _ in 0..4 {
            let a = random_sp4(&mut rng, 3);
            let acted = gsp_action(&a.reduce_mod(&n).unwrap(), &f).unwrap();
            let lhs = super::super::eval::eval_product(&acted, &tau, prec).unwrap();
            let atau = act_on_h(&a, &tau).unwrap();
            let rhs = super::super::eval::eval_product(&f, &atau, prec).unwrap();
            assert!(
                lhs.close_to(&rhs, -(prec as i64) / 2),
                "transformation law failed numerically"
            );
        }
    }

    #[test]
    fn kappa_is_trivial_on_the_identity_and_eighth_roots_square_consistently() {
        let prec = 96;
        let tau = tau_fixture(prec + 32);
        let id = SympMatrix::identity(2);
        assert_eq!(kappa_estimate(&id, &tau, prec).unwrap(), 0);

        let mut rng = ChaCha8Rng::seed_from_u64(0x6163_7469_6f6e_0004);
        let mut checked = 0;
        for _ in 0..8 {
            let a = random_sp4(&mut rng, 2);
            let b = random_sp4(&mut rng, 2);
            let (ja, jb, jab) = match (
                kappa_estimate(&a, &tau, prec),
                kappa_estimate(&b, &tau, prec),
                kappa_estimate(&a.mul(&b), &tau, prec),
            ) {
                (Ok(x), Ok(y), Ok(z)) => (x, y, z),
                // a word can push tau into territory where the series is
                // rejected; skip those samples
                _ => continue,
            };
            // genus 2: kappa^4 = 1, so the exponent is even
            assert_eq!(ja % 2, 0);
            assert_eq!(jb % 2, 0);
            // kappa^2 is multiplicative
            assert_eq!((2 * jab) % 8, (2 * ja + 2 * jb) % 8);
            checked += 1;
        }
        assert!(checked >= 4, "too many kappa samples were rejected");
    }
}
