//! Small dense complex matrices (period matrices are g x g with g <= 2,
//! but the routines are generic in the dimension).

use super::{Complex, Real};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Complex>,
}

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex>) -> Self {
        assert_eq!(data.len(), rows * cols);
        CMatrix { rows, cols, data }
    }

    pub fn zero(rows: usize, cols: usize, prec: u32) -> Self {
        CMatrix { rows, cols, data: vec![Complex::zero(prec); rows * cols] }
    }

    pub fn identity(n: usize, prec: u32) -> Self {
        let mut m = Self::zero(n, n, prec);
        for i in 0..n {
            *m.at_mut(i, i) = Complex::one(prec);
        }
        m
    }

    pub fn prec(&self) -> u32 {
        self.data[0].prec()
    }

    pub fn at(&self, i: usize, j: usize) -> &Complex {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Complex {
        &mut self.data[i * self.cols + j]
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.with_prec(prec)).collect(),
        }
    }

    pub fn transpose(&self) -> CMatrix {
        let mut m = CMatrix::zero(self.cols, self.rows, self.prec());
        for i in 0..self.rows {
            for j in 0..self.cols {
                *m.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        m
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.sub(b)).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows);
        let prec = self.prec();
        let mut m = CMatrix::zero(self.rows, other.cols, prec);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Complex::zero(prec);
                for k in 0..self.cols {
                    acc = acc.add(&self.at(i, k).mul(other.at(k, j)));
                }
                *m.at_mut(i, j) = acc;
            }
        }
        m
    }

    /// Gaussian elimination with partial pivoting on |pivot|^2.
    pub fn inverse(&self) -> Option<CMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let prec = self.prec();
        let mut a = self.clone();
        let mut inv = CMatrix::identity(n, prec);
        for col in 0..n {
            let mut best = col;
            let mut best_mag = a.at(col, col).norm2();
            for r in (col + 1)..n {
                let mag = a.at(r, col).norm2();
                if mag.cmp(&best_mag) == std::cmp::Ordering::Greater {
                    best = r;
                    best_mag = mag;
                }
            }
            if best_mag.is_zero() {
                return None;
            }
            if best != col {
                for j in 0..n {
                    let tmp = a.at(col, j).clone();
                    *a.at_mut(col, j) = a.at(best, j).clone();
                    *a.at_mut(best, j) = tmp;
                    let tmp = inv.at(col, j).clone();
                    *inv.at_mut(col, j) = inv.at(best, j).clone();
                    *inv.at_mut(best, j) = tmp;
                }
            }
            let pinv = a.at(col, col).recip();
            for j in 0..n {
                *a.at_mut(col, j) = a.at(col, j).mul(&pinv);
                *inv.at_mut(col, j) = inv.at(col, j).mul(&pinv);
            }
            for r in 0..n {
                if r == col || a.at(r, col).is_zero() {
                    continue;
                }
                let f = a.at(r, col).clone();
                for j in 0..n {
                    let v = a.at(r, j).sub(&f.mul(a.at(col, j)));
                    *a.at_mut(r, j) = v;
                    let v = inv.at(r, j).sub(&f.mul(inv.at(col, j)));
                    *inv.at_mut(r, j) = v;
                }
            }
        }
        Some(inv)
    }

    pub fn det(&self) -> Complex {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let prec = self.prec();
        match n {
            1 => self.at(0, 0).clone(),
            2 => self.at(0, 0).mul(self.at(1, 1)).sub(&self.at(0, 1).mul(self.at(1, 0))),
            _ => {
                // LU with partial pivoting
                let mut a = self.clone();
                let mut det = Complex::one(prec);
                for col in 0..n {
                    let mut best = col;
                    let mut best_mag = a.at(col, col).norm2();
                    for r in (col + 1)..n {
                        let mag = a.at(r, col).norm2();
                        if mag.cmp(&best_mag) == std::cmp::Ordering::Greater {
                            best = r;
                            best_mag = mag;
                        }
                    }
                    if best_mag.is_zero() {
                        return Complex::zero(prec);
                    }
                    if best != col {
                        for j in 0..n {
                            let tmp = a.at(col, j).clone();
                            *a.at_mut(col, j) = a.at(best, j).clone();
                            *a.at_mut(best, j) = tmp;
                        }
                        det = det.neg();
                    }
                    det = det.mul(a.at(col, col));
                    let pinv = a.at(col, col).recip();
                    for r in (col + 1)..n {
                        let f = a.at(r, col).mul(&pinv);
                        for j in col..n {
                            let v = a.at(r, j).sub(&f.mul(a.at(col, j)));
                            *a.at_mut(r, j) = v;
                        }
                    }
                }
                det
            }
        }
    }

    /// Componentwise imaginary part.
    pub fn im(&self) -> Vec<Real> {
        self.data.iter().map(|z| z.im.clone()).collect()
    }

    pub fn max_entry_distance(&self, other: &CMatrix) -> Real {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut best = Real::zero(self.prec());
        for (a, b) in self.data.iter().zip(&other.data) {
            let d = a.sub(b);
            for part in [d.re.abs(), d.im.abs()] {
                if part.cmp(&best) == std::cmp::Ordering::Greater {
                    best = part;
                }
            }
        }
        best
    }
}
