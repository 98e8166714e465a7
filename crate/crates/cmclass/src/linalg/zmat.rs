//! Integer matrices, Hermite and Smith normal forms.
//!
//! Rows are the generating vectors. The Hermite form here is row-style: the
//! nonzero rows come first, each pivot is positive, entries below a pivot are
//! zero and entries above it are reduced into `[0, pivot)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<BigInt>,
}

impl ZMat {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Self {
        assert_eq!(data.len(), rows * cols);
        ZMat { rows, cols, data }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        ZMat { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        ZMat::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows_vec(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// row[a] += k * row[b]
    pub fn addmul_row(&mut self, a: usize, b: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self.at(a, j) + k * self.at(b, j);
            *self.at_mut(a, j) = v;
        }
    }

    pub fn negate_row(&mut self, a: usize) {
        for j in 0..self.cols {
            let v = -self.at(a, j).clone();
            *self.at_mut(a, j) = v;
        }
    }

    pub fn mul(&self, other: &ZMat) -> ZMat {
        assert_eq!(self.cols, other.rows);
        let mut m = ZMat::zero(self.rows, other.cols);
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

    pub fn transpose(&self) -> ZMat {
        let mut m = ZMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *m.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        m
    }
}

/// Row Hermite normal form together with a unimodular `U` with `U * m = H`.
pub fn hnf_with_transform(m: &ZMat) -> (ZMat, ZMat) {
    let mut h = m.clone();
    let mut u = ZMat::identity(m.rows);
    let rows = m.rows;
    let cols = m.cols;
    let mut pivot_row = 0;
    for col in 0..cols {
        if pivot_row == rows {
            break;
        }
        // Euclidean reduction in this column below pivot_row
        loop {
            // find row with smallest nonzero |entry|
            let mut best: Option<usize> = None;
            for r in pivot_row..rows {
                if h.at(r, col).is_zero() {
                    continue;
                }
                match best {
                    None => best = Some(r),
                    Some(b) => {
                        if h.at(r, col).abs() < h.at(b, col).abs() {
                            best = Some(r)
                        }
                    }
                }
            }
            let Some(b) = best else { break };
            h.swap_rows(pivot_row, b);
            u.swap_rows(pivot_row, b);
            let mut done = true;
            let p = h.at(pivot_row, col).clone();
            for r in (pivot_row + 1)..rows {
                if h.at(r, col).is_zero() {
                    continue;
                }
                let q = -h.at(r, col).div_floor(&p);
                h.addmul_row(r, pivot_row, &q);
                u.addmul_row(r, pivot_row, &q);
                if !h.at(r, col).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h.at(pivot_row, col).is_zero() {
            continue;
        }
        if h.at(pivot_row, col).is_negative() {
            h.negate_row(pivot_row);
            u.negate_row(pivot_row);
        }
        // reduce entries above the pivot into [0, pivot)
        let p = h.at(pivot_row, col).clone();
        for r in 0..pivot_row {
            let q = -h.at(r, col).div_floor(&p);
            h.addmul_row(r, pivot_row, &q);
            u.addmul_row(r, pivot_row, &q);
        }
        pivot_row += 1;
    }
    (h, u)
}

/// Row Hermite normal form with zero rows dropped.
pub fn hnf(m: &ZMat) -> ZMat {
    let (h, _) = hnf_with_transform(m);
    let nonzero: Vec<Vec<BigInt>> = (0..h.rows)
        .map(|i| h.row(i).to_vec())
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();
    ZMat::from_rows(nonzero)
}

/// Basis (as rows) of the lattice `{u in Z^n : a * u = 0 mod d}` for an
/// `m x n` integer matrix `a`. Computed from the row HNF of the stacked
/// system with the condition coordinates leading, so the rows whose leading
/// block vanishes span exactly the solution lattice.
pub fn kernel_mod(a: &ZMat, d: &BigInt) -> ZMat {
    let m = a.rows;
    let n = a.cols;
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n + m);
    for i in 0..n {
        // image of the unit vector e_i: (column i of a | e_i)
        let mut r = vec![BigInt::zero(); m + n];
        for j in 0..m {
            r[j] = a.at(j, i).clone();
        }
        r[m + i] = BigInt::one();
        rows.push(r);
    }
    for j in 0..m {
        let mut r = vec![BigInt::zero(); m + n];
        r[j] = d.clone();
        rows.push(r);
    }
    let h = hnf(&ZMat::from_rows(rows));
    let mut out = Vec::new();
    for i in 0..h.rows {
        if h.row(i)[..m].iter().all(|x| x.is_zero()) {
            out.push(h.row(i)[m..].to_vec());
        }
    }
    if out.is_empty() {
        return ZMat::zero(0, n);
    }
    ZMat::from_rows(out)
}

/// Smith normal form: returns `(d, u, v)` with `u * m * v = diag(d)`,
/// `u`, `v` unimodular, and each `d[i]` dividing `d[i+1]`.
pub fn snf_with_transforms(m: &ZMat) -> (Vec<BigInt>, ZMat, ZMat) {
    let mut a = m.clone();
    let mut u = ZMat::identity(m.rows);
    let mut v = ZMat::identity(m.cols);
    let n = m.rows.min(m.cols);
    let mut t = 0;
    while t < n {
        // find smallest nonzero entry in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..m.rows {
            for j in t..m.cols {
                if a.at(i, j).is_zero() {
                    continue;
                }
                match best {
                    None => best = Some((i, j)),
                    Some((bi, bj)) => {
                        if a.at(i, j).abs() < a.at(bi, bj).abs() {
                            best = Some((i, j))
                        }
                    }
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap_rows(t, bi);
        u.swap_rows(t, bi);
        swap_cols(&mut a, t, bj);
        swap_cols(&mut v, t, bj);
        let mut clean = true;
        let p = a.at(t, t).clone();
        for i in (t + 1)..m.rows {
            if a.at(i, t).is_zero() {
                continue;
            }
            let q = -a.at(i, t).div_floor(&p);
            a.addmul_row(i, t, &q);
            u.addmul_row(i, t, &q);
            if !a.at(i, t).is_zero() {
                clean = false;
            }
        }
        for j in (t + 1)..m.cols {
            if a.at(t, j).is_zero() {
                continue;
            }
            let q = -a.at(t, j).div_floor(&p);
            addmul_col(&mut a, j, t, &q);
            addmul_col(&mut v, j, t, &q);
            if !a.at(t, j).is_zero() {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // ensure divisibility of the rest of the block by the pivot
        let mut fixed = false;
        'outer: for i in (t + 1)..m.rows {
            for j in (t + 1)..m.cols {
                if !(a.at(i, j) % a.at(t, t)).is_zero() {
                    let one = BigInt::one();
                    a.addmul_row(t, i, &one);
                    u.addmul_row(t, i, &one);
                    fixed = true;
                    break 'outer;
                }
            }
        }
        if fixed {
            continue;
        }
        if a.at(t, t).is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    let d = (0..n).map(|i| a.at(i, i).clone()).collect();
    (d, u, v)
}

fn swap_cols(m: &mut ZMat, a: usize, b: usize) {
    if a == b {
        return;
    }
    for i in 0..m.rows {
        m.data.swap(i * m.cols + a, i * m.cols + b);
    }
}

fn addmul_col(m: &mut ZMat, a: usize, b: usize, k: &BigInt) {
    if k.is_zero() {
        return;
    }
    for i in 0..m.rows {
        let v = m.at(i, a) + k * m.at(i, b);
        *m.at_mut(i, a) = v;
    }
}
