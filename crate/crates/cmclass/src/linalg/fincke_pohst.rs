//! Short-vector enumeration for positive definite rational Gram matrices
//! (Fincke-Pohst). Everything is exact: the Gram matrix is first LLL-reduced
//! (working on the Gram matrix alone, carrying the unimodular transform),
//! then decomposed as an LDL^t over the rationals, and each candidate is
//! accepted by exact evaluation of the form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{QMat, ZMat};
use crate::error::{Error, Result};

/// floor(sqrt(x)) for x >= 0.
fn rational_sqrt_floor(x: &BigRational) -> BigInt {
    assert!(!x.is_negative());
    let prod = x.numer() * x.denom();
    prod.sqrt().div_floor(x.denom())
}

/// `u * g * u^t` for an integer row transform `u`.
fn transform_gram(g: &QMat, u: &ZMat) -> QMat {
    let n = g.rows;
    let mut t = QMat::zero(n, n);
    for i in 0..n {
        for b in 0..n {
            let mut acc = BigRational::zero();
            for a in 0..n {
                if !u.at(i, a).is_zero() {
                    acc += BigRational::from_integer(u.at(i, a).clone()) * g.at(a, b);
                }
            }
            *t.at_mut(i, b) = acc;
        }
    }
    let mut out = QMat::zero(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = BigRational::zero();
            for b in 0..n {
                if !u.at(j, b).is_zero() {
                    acc += t.at(i, b) * BigRational::from_integer(u.at(j, b).clone());
                }
            }
            *out.at_mut(i, j) = acc;
        }
    }
    out
}

/// Gram-Schmidt data of a Gram matrix: squared lengths `b[i]` and the
/// lower-triangular coefficients `mu[i][j]` (with `mu[i][i] = 1`). Errors on
/// a form that is not positive definite.
fn gso(g: &QMat) -> Result<(Vec<BigRational>, Vec<Vec<BigRational>>)> {
    let n = g.rows;
    let mut b = vec![BigRational::zero(); n];
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        mu[i][i] = BigRational::one();
        for j in 0..i {
            let mut num = g.at(i, j).clone();
            for l in 0..j {
                num -= &mu[i][l] * &mu[j][l] * &b[l];
            }
            mu[i][j] = num / &b[j];
        }
        let mut d = g.at(i, i).clone();
        for l in 0..i {
            d -= &mu[i][l] * &mu[i][l] * &b[l];
        }
        if !d.is_positive() {
            return Err(Error::InvalidInput(
                "Gram matrix is not positive definite".into(),
            ));
        }
        b[i] = d;
    }
    Ok((b, mu))
}

/// LLL reduction of a positive definite Gram matrix. Returns `(g', u)` with
/// `g' = u g u^t` reduced and `u` unimodular.
fn gram_lll(g: &QMat) -> Result<(QMat, ZMat)> {
    let n = g.rows;
    let mut u = ZMat::identity(n);
    let mut cur = g.clone();
    // validates positive definiteness even for n = 1
    let (_, _) = gso(&cur)?;
    if n <= 1 {
        return Ok((cur, u));
    }
    let delta = BigRational::new(BigInt::from(99), BigInt::from(100));
    let mut k = 1usize;
    while k < n {
        let (b, mut mu) = gso(&cur)?;
        // size-reduce row k, updating mu in place
        let mut changed = false;
        for j in (0..k).rev() {
            let q = mu[k][j].round().to_integer();
            if q.is_zero() {
                continue;
            }
            u.addmul_row(k, j, &-q.clone());
            let qr = BigRational::from_integer(q);
            for l in 0..=j {
                let adj = &qr * &mu[j][l];
                mu[k][l] -= adj;
            }
            changed = true;
        }
        if changed {
            cur = transform_gram(g, &u);
        }
        let lhs = &b[k];
        let rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &b[k - 1];
        if *lhs >= rhs {
            k += 1;
        } else {
            u.swap_rows(k, k - 1);
            cur = transform_gram(g, &u);
            k = k.max(2) - 1;
        }
    }
    Ok((cur, u))
}

/// All nonzero integer vectors `x` with `x^t G x <= bound`, up to sign: for
/// each +/- pair exactly the representative whose first nonzero coordinate is
/// positive is returned. `G` must be symmetric positive definite. `budget`
/// bounds the number of enumeration nodes, not just the number of results.
pub fn short_vectors(g: &QMat, bound: &BigRational, budget: usize) -> Result<Vec<Vec<BigInt>>> {
    let n = g.rows;
    assert_eq!(n, g.cols);
    let (gr, u) = gram_lll(g)?;
    // LDL^t of the reduced Gram: q[i][i] = d_i, q[i][j] (j > i) the mixed
    // coefficients, so that Q(z) = sum_i d_i (z_i + sum_{j>i} q_ij z_j)^2
    let mut q: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| gr.at(i, j).clone()).collect())
        .collect();
    for i in 0..n {
        for j in (i + 1)..n {
            // current Schur complement is kept in the upper triangle
            let qji = q[i][j].clone();
            let qii = q[i][i].clone();
            for k in j..n {
                let v = &q[j][k] - &qji / &qii * &q[i][k];
                q[j][k] = v;
            }
        }
        if !q[i][i].is_positive() {
            return Err(Error::InvalidInput(
                "Gram matrix is not positive definite".into(),
            ));
        }
        let qii = q[i][i].clone();
        for j in (i + 1)..n {
            let v = &q[i][j] / &qii;
            q[i][j] = v;
        }
    }

    let mut found: Vec<Vec<BigInt>> = Vec::new();
    let mut z = vec![BigInt::zero(); n];
    let mut nodes = 0usize;

    // Depth-first over coordinates n-1 down to 0. t = remaining bound,
    // c = center offset for the current coordinate.
    struct Frame {
        t: BigRational,
        c: BigRational,
        x_cur: BigInt,
        x_hi: BigInt,
    }
    let center = |q: &Vec<Vec<BigRational>>, z: &Vec<BigInt>, i: usize| -> BigRational {
        let mut c = BigRational::zero();
        for j in (i + 1)..n {
            c += &q[i][j] * BigRational::from_integer(z[j].clone());
        }
        c
    };
    let mut stack: Vec<Frame> = Vec::with_capacity(n + 1);
    {
        let i = n - 1;
        let r: BigInt = rational_sqrt_floor(&(bound / &q[i][i])) + 1;
        stack.push(Frame {
            t: bound.clone(),
            c: BigRational::zero(),
            x_cur: -r.clone(),
            x_hi: r,
        });
    }
    while let Some(frame) = stack.last() {
        let i = n - stack.len();
        if frame.x_cur > frame.x_hi {
            stack.pop();
            continue;
        }
        nodes += 1;
        if nodes > budget {
            return Err(Error::BudgetExhausted(format!(
                "short vector enumeration past {budget} nodes"
            )));
        }
        let xi = frame.x_cur.clone();
        z[i] = xi.clone();
        let shifted = BigRational::from_integer(xi) + &frame.c;
        let contrib = &q[i][i] * &shifted * &shifted;
        let rem = &frame.t - &contrib;
        stack.last_mut().unwrap().x_cur += 1;
        if rem.is_negative() {
            continue;
        }
        if i == 0 {
            // keep one of each +/- pair at the reduced-coordinate level
            let lead = z.iter().find(|v| !v.is_zero());
            if lead.is_some_and(|v| v.is_positive()) {
                // map back through the LLL transform: x = z U
                let mut x = vec![BigInt::zero(); n];
                for (zi, urow) in z.iter().zip(0..n) {
                    if zi.is_zero() {
                        continue;
                    }
                    for (xj, uj) in x.iter_mut().zip(u.row(urow)) {
                        *xj += zi * uj;
                    }
                }
                // normalize sign: first nonzero coordinate positive
                if x.iter().find(|v| !v.is_zero()).unwrap().is_negative() {
                    for v in x.iter_mut() {
                        *v = -v.clone();
                    }
                }
                found.push(x);
            }
            continue;
        }
        let ni = i - 1;
        let c = center(&q, &z, ni);
        let r = rational_sqrt_floor(&(&rem / &q[ni][ni])) + 1;
        let lo = (-&c).floor().to_integer() - &r;
        let hi = (-&c).ceil().to_integer() + &r;
        stack.push(Frame { t: rem, c, x_cur: lo, x_hi: hi });
    }
    Ok(found)
}

/// Exact evaluation of `x^t G x`.
pub fn eval_quadratic_form(g: &QMat, x: &[BigInt]) -> BigRational {
    let n = g.rows;
    let mut acc = BigRational::zero();
    for i in 0..n {
        for j in 0..n {
            acc += g.at(i, j) * BigRational::from_integer(&x[i] * &x[j]);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn counts_match_brute_force_on_random_form() {
        // G = A^t A for A = [[2,1],[1,3]] gives a pos def form
        let g = QMat::new(2, 2, vec![q(5), q(5), q(5), q(10)]);
        let bound = q(40);
        let fast = short_vectors(&g, &bound, 10_000).unwrap();
        let mut brute = Vec::new();
        for a in -10..=10i64 {
            for b in -10..=10i64 {
                if (a, b) == (0, 0) {
                    continue;
                }
                let v = 5 * a * a + 10 * a * b + 10 * b * b;
                let first_nonzero_pos = if a != 0 { a > 0 } else { b > 0 };
                if v <= 40 && first_nonzero_pos {
                    brute.push(vec![BigInt::from(a), BigInt::from(b)]);
                }
            }
        }
        let mut fast_sorted = fast.clone();
        fast_sorted.sort();
        brute.sort();
        assert_eq!(fast_sorted, brute);
        for v in &fast {
            assert!(eval_quadratic_form(&g, v) <= bound);
        }
    }

    #[test]
    fn rejects_indefinite() {
        let g = QMat::new(2, 2, vec![q(1), q(0), q(0), q(-1)]);
        assert!(short_vectors(&g, &q(10), 100).is_err());
    }

    #[test]
    fn four_dimensional_counts_match_brute_force() {
        // G = A^t A for the triangular A with rows (2,1,0,0), (0,2,1,0),
        // (0,0,2,1), (0,0,0,2); brute force over a covering box gives 142
        // vectors of norm <= 30 up to sign, 16 of norm exactly 30
        let g = QMat::new(
            4,
            4,
            [4, 2, 0, 0, 2, 5, 2, 0, 0, 2, 5, 2, 0, 0, 2, 5]
                .iter()
                .map(|&t| q(t))
                .collect(),
        );
        let bound = q(30);
        let fast = short_vectors(&g, &bound, 100_000).unwrap();
        let mut brute = Vec::new();
        for x0 in -6..=6i64 {
            for x1 in -6..=6i64 {
                for x2 in -6..=6i64 {
                    for x3 in -6..=6i64 {
                        let x = [x0, x1, x2, x3];
                        if x.iter().all(|&c| c == 0) {
                            continue;
                        }
                        if *x.iter().find(|&&c| c != 0).unwrap() < 0 {
                            continue;
                        }
                        let xv: Vec<BigInt> = x.iter().map(|&c| BigInt::from(c)).collect();
                        if eval_quadratic_form(&g, &xv) <= bound {
                            brute.push(xv);
                        }
                    }
                }
            }
        }
        let mut fast_sorted = fast.clone();
        fast_sorted.sort();
        brute.sort();
        assert_eq!(fast_sorted.len(), 142);
        assert_eq!(fast_sorted, brute);
        let exact: usize = fast
            .iter()
            .filter(|v| eval_quadratic_form(&g, v) == bound)
            .count();
        assert_eq!(exact, 16);
    }

    #[test]
    fn skewed_lattice_is_enumerated_quickly() {
        // a very skewed Gram matrix (HNF-style basis of a sublattice); the
        // node budget is tight enough that enumeration only passes if the
        // basis is reduced first
        let a = [[1849i64, 0, 0, 0], [731, 1, 0, 0], [912, 0, 1, 0], [555, 0, 0, 1]];
        let mut gm = QMat::zero(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = 0i64;
                for (ar, br) in a[i].iter().zip(a[j].iter()) {
                    acc += ar * br;
                }
                *gm.at_mut(i, j) = q(acc);
            }
        }
        let vecs = short_vectors(&gm, &q(400), 20_000).unwrap();
        assert!(!vecs.is_empty());
        for v in &vecs {
            assert!(eval_quadratic_form(&gm, v) <= q(400));
        }
    }
}
