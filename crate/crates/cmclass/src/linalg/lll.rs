//! LLL reduction with exact rational Gram-Schmidt. The lattices here are
//! tiny (dimension <= 6) with large entries, which exact arithmetic handles
//! comfortably.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ZMat;

#[cfg(test)]
fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn to_rat(v: &BigInt) -> BigRational {
    BigRational::from_integer(v.clone())
}

/// In-place LLL on the rows of `basis` with delta = 3/4. Zero rows are not
/// allowed. Returns the reduced basis (rows, shortest first tendency).
pub fn lll_reduce(basis: &ZMat) -> ZMat {
    let n = basis.rows;
    if n <= 1 {
        return basis.clone();
    }
    let mut b = basis.rows_vec();
    let delta = BigRational::new(BigInt::from(3), BigInt::from(4));

    // mu[i][j] for j < i, and squared GSO norms
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    let mut bstar_norm2 = vec![BigRational::zero(); n];
    let compute_gso = |b: &Vec<Vec<BigInt>>,
                       mu: &mut Vec<Vec<BigRational>>,
                       bstar_norm2: &mut Vec<BigRational>| {
        let dim = b[0].len();
        let mut bstar: Vec<Vec<BigRational>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut v: Vec<BigRational> = b[i].iter().map(to_rat).collect();
            for j in 0..i {
                let num: BigRational =
                    (0..dim).map(|k| to_rat(&b[i][k]) * &bstar[j][k]).sum();
                let m = if bstar_norm2[j].is_zero() {
                    BigRational::zero()
                } else {
                    num / &bstar_norm2[j]
                };
                mu[i][j] = m.clone();
                for k in 0..dim {
                    let t = &v[k] - &m * &bstar[j][k];
                    v[k] = t;
                }
            }
            bstar_norm2[i] = v.iter().map(|x| x * x).sum();
            bstar.push(v);
        }
    };
    compute_gso(&b, &mut mu, &mut bstar_norm2);

    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut k = 1;
    let mut rounds = 0usize;
    while k < n {
        rounds += 1;
        assert!(rounds < 100_000, "LLL failed to terminate");
        // size-reduce b[k] against b[j], j < k
        for j in (0..k).rev() {
            if mu[k][j].clone().abs() > half {
                let q = (&mu[k][j] + &half).floor().to_integer();
                for t in 0..b[0].len() {
                    let v = &b[k][t] - &q * &b[j][t];
                    b[k][t] = v;
                }
                compute_gso(&b, &mut mu, &mut bstar_norm2);
            }
        }
        // Lovasz condition
        let lhs = bstar_norm2[k].clone();
        let rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &bstar_norm2[k - 1];
        if lhs >= rhs {
            k += 1;
        } else {
            b.swap(k, k - 1);
            compute_gso(&b, &mut mu, &mut bstar_norm2);
            k = k.max(2) - 1;
            if k == 0 {
                k = 1;
            }
        }
    }
    ZMat::from_rows(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn reduces_classic_basis() {
        let m = ZMat::from_rows(vec![
            vec![z(1), z(1), z(1)],
            vec![z(-1), z(0), z(2)],
            vec![z(3), z(5), z(6)],
        ]);
        let r = lll_reduce(&m);
        // determinant is preserved up to sign
        let g = |m: &ZMat| {
            let a = m.rows_vec();
            &a[0][0] * (&a[1][1] * &a[2][2] - &a[1][2] * &a[2][1])
                - &a[0][1] * (&a[1][0] * &a[2][2] - &a[1][2] * &a[2][0])
                + &a[0][2] * (&a[1][0] * &a[2][1] - &a[1][1] * &a[2][0])
        };
        assert_eq!(g(&m).abs(), g(&r).abs());
        // first vector should be genuinely short
        let n0: BigInt = dot(r.row(0), r.row(0));
        assert!(n0 <= z(3));
    }

    #[test]
    fn finds_integer_relation() {
        // x = 41/7 encoded as a relation lattice: rows (1, 0, C*7), (0, 1, C*41);
        // the shortest vector is the relation (41, -7, 0) up to sign.
        let c = BigInt::from(1i64 << 40);
        let m = ZMat::from_rows(vec![
            vec![z(1), z(0), (&c * z(7))],
            vec![z(0), z(1), (&c * z(41))],
        ]);
        let r = lll_reduce(&m);
        let row = r.row(0);
        assert!(row[2].is_zero());
        assert_eq!((row[0].clone().abs(), row[1].clone().abs()), (z(41), z(7)));
        assert_ne!(row[0].sign(), row[1].sign());
    }
}
