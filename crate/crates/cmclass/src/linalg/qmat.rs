//! Dense matrices over the rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigRational>,
}

impl QMat {
    pub fn new(rows: usize, cols: usize, data: Vec<BigRational>) -> Self {
        assert_eq!(data.len(), rows * cols);
        QMat { rows, cols, data }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        QMat { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = BigRational::one();
        }
        m
    }

    pub fn from_int_rows(rows: &[Vec<BigInt>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let data = rows
            .iter()
            .flat_map(|row| row.iter().map(|v| BigRational::from_integer(v.clone())))
            .collect();
        QMat::new(r, c, data)
    }

    pub fn at(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut BigRational {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> QMat {
        let mut m = QMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *m.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        m
    }

    pub fn mul(&self, other: &QMat) -> QMat {
        assert_eq!(self.cols, other.rows);
        let mut m = QMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = m.at(i, j) + a * other.at(k, j);
                    *m.at_mut(i, j) = v;
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.at(i, j) * &v[j]).sum())
            .collect()
    }

    pub fn add(&self, other: &QMat) -> QMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        QMat { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: &BigRational) -> QMat {
        QMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    /// Gauss-Jordan inverse; `None` when singular.
    pub fn inverse(&self) -> Option<QMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = QMat::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a.at(r, col).is_zero())?;
            if pivot != col {
                for j in 0..n {
                    a.data.swap(col * n + j, pivot * n + j);
                    inv.data.swap(col * n + j, pivot * n + j);
                }
            }
            let pinv = a.at(col, col).recip();
            for j in 0..n {
                let v = a.at(col, j) * &pinv;
                *a.at_mut(col, j) = v;
                let v = inv.at(col, j) * &pinv;
                *inv.at_mut(col, j) = v;
            }
            for r in 0..n {
                if r == col || a.at(r, col).is_zero() {
                    continue;
                }
                let f = a.at(r, col).clone();
                for j in 0..n {
                    let v = a.at(r, j) - &f * a.at(col, j);
                    *a.at_mut(r, j) = v;
                    let v = inv.at(r, j) - &f * inv.at(col, j);
                    *inv.at_mut(r, j) = v;
                }
            }
        }
        Some(inv)
    }

    /// Solves `self * x = b`; `None` when singular (square systems only).
    pub fn solve(&self, b: &[BigRational]) -> Option<Vec<BigRational>> {
        Some(self.inverse()?.mul_vec(b))
    }

    pub fn det(&self) -> BigRational {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut det = BigRational::one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !a.at(r, col).is_zero()) else {
                return BigRational::zero();
            };
            if pivot != col {
                for j in 0..n {
                    a.data.swap(col * n + j, pivot * n + j);
                }
                det = -det;
            }
            det *= a.at(col, col);
            let pinv = a.at(col, col).recip();
            for r in (col + 1)..n {
                if a.at(r, col).is_zero() {
                    continue;
                }
                let f = a.at(r, col) * &pinv;
                for j in col..n {
                    let v = a.at(r, j) - &f * a.at(col, j);
                    *a.at_mut(r, j) = v;
                }
            }
        }
        det
    }

    /// Basis of the right kernel.
    pub fn kernel(&self) -> Vec<Vec<BigRational>> {
        let mut a = self.clone();
        let rows = self.rows;
        let cols = self.cols;
        let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
        let mut r = 0;
        for c in 0..cols {
            let Some(p) = (r..rows).find(|&i| !a.at(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..cols {
                    a.data.swap(r * cols + j, p * cols + j);
                }
            }
            let pinv = a.at(r, c).recip();
            for j in 0..cols {
                let v = a.at(r, j) * &pinv;
                *a.at_mut(r, j) = v;
            }
            for i in 0..rows {
                if i == r || a.at(i, c).is_zero() {
                    continue;
                }
                let f = a.at(i, c).clone();
                for j in 0..cols {
                    let v = a.at(i, j) - &f * a.at(r, j);
                    *a.at_mut(i, j) = v;
                }
            }
            pivot_of_col[c] = Some(r);
            r += 1;
            if r == rows {
                break;
            }
        }
        let mut basis = Vec::new();
        for c in 0..cols {
            if pivot_of_col[c].is_some() {
                continue;
            }
            let mut v = vec![BigRational::zero(); cols];
            v[c] = BigRational::one();
            for (cc, pr) in pivot_of_col.iter().enumerate() {
                if let Some(pr) = pr {
                    v[cc] = -a.at(*pr, c).clone();
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Least common multiple of entry denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        let mut l = BigInt::one();
        for v in &self.data {
            l = num_integer::lcm(l, v.denom().clone());
        }
        l.abs()
    }
}
