//! Finite-dimensional commutative F_p-algebras given by structure constants:
//! radical via the Frobenius kernel, splitting of the semisimple quotient
//! into fields through Lagrange idempotents on the Frobenius fixed space,
//! and the resulting maximal ideals. This is the exact kernel behind both
//! the round-2 maximal order steps and prime decomposition at index primes.

use crate::linalg::modp::{self, kernel_mod_p};

/// Commutative algebra over F_p with basis e_0..e_{n-1}.
#[derive(Clone, Debug)]
pub(crate) struct AlgebraModP {
    pub n: usize,
    pub p: u64,
    /// mult[i][j] = coordinates of e_i * e_j
    pub mult: Vec<Vec<Vec<u64>>>,
    /// coordinates of the ring identity
    pub one: Vec<u64>,
}

impl AlgebraModP {
    pub fn mul(&self, u: &[u64], v: &[u64]) -> Vec<u64> {
        let p = self.p;
        let mut out = vec![0u64; self.n];
        for (i, &ui) in u.iter().enumerate() {
            if ui == 0 {
                continue;
            }
            for (j, &vj) in v.iter().enumerate() {
                if vj == 0 {
                    continue;
                }
                let c = modp::mul(ui, vj, p);
                for (o, &m) in out.iter_mut().zip(&self.mult[i][j]) {
                    *o = modp::add(*o, modp::mul(c, m, p), p);
                }
            }
        }
        out
    }

    pub fn pow(&self, u: &[u64], mut e: u64) -> Vec<u64> {
        let mut acc = self.one.clone();
        let mut base = u.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Matrix (row-major, n x n) of x -> x^(p^k); linear because Frobenius is.
    fn frobenius_matrix(&self, k: u32) -> Vec<Vec<u64>> {
        let mut m = vec![vec![0u64; self.n]; self.n];
        let e = self.p.pow(k);
        for i in 0..self.n {
            let mut v = vec![0u64; self.n];
            v[i] = 1;
            let w = self.pow(&v, e);
            for (l, row) in m.iter_mut().enumerate() {
                row[i] = w[l];
            }
        }
        m
    }

    /// Basis of the nilradical: kernel of x -> x^(p^m) with p^m >= n.
    pub fn radical_basis(&self) -> Vec<Vec<u64>> {
        let mut m = 0u32;
        let mut q = 1u64;
        while (q as usize) < self.n {
            q *= self.p;
            m += 1;
        }
        kernel_mod_p(&self.frobenius_matrix(m.max(1)), self.p)
    }

    /// Maximal ideals of the algebra: for each one, a spanning set of its
    /// coordinate vectors and the residue field degree f.
    pub fn maximal_ideal_data(&self) -> Vec<(Vec<Vec<u64>>, usize)> {
        let p = self.p;
        let rad = self.radical_basis();
        // complement basis of the radical inside the algebra
        let mut ech = Echelon::new(self.n, p);
        for r in &rad {
            assert!(ech.insert_plain(r.clone()));
        }
        let mut comp: Vec<Vec<u64>> = Vec::new();
        for i in 0..self.n {
            let mut v = vec![0u64; self.n];
            v[i] = 1;
            if ech.insert_plain(v.clone()) {
                comp.push(v);
            }
        }
        let m = comp.len();
        assert!(m > 0, "semisimple quotient of a unital algebra is nonzero");
        // projection to quotient coords: augmented echelon over [rad | comp]
        let mut basis = Echelon::with_tags(self.n, rad.len() + m, p);
        for (t, r) in rad.iter().enumerate() {
            basis.insert_tagged(r.clone(), t);
        }
        for (t, c) in comp.iter().enumerate() {
            basis.insert_tagged(c.clone(), rad.len() + t);
        }
        let project = |x: &[u64]| -> Vec<u64> {
            let coords = basis.express(x).expect("full basis spans the algebra");
            coords[rad.len()..].to_vec()
        };
        // quotient algebra structure constants
        let mut qmult = vec![vec![vec![0u64; m]; m]; m];
        for i in 0..m {
            for j in 0..m {
                qmult[i][j] = project(&self.mul(&comp[i], &comp[j]));
            }
        }
        let qone = project(&self.one);
        let quot = AlgebraModP { n: m, p, mult: qmult, one: qone };
        // split the semisimple quotient into primitive idempotents
        let mut fields: Vec<(Vec<u64>, usize)> = Vec::new();
        let mut stack = vec![quot.one.clone()];
        while let Some(e) = stack.pop() {
            // subalgebra e * quot with identity e
            let mut sub = Echelon::new(m, p);
            let mut sub_basis: Vec<Vec<u64>> = Vec::new();
            for i in 0..m {
                let mut v = vec![0u64; m];
                v[i] = 1;
                let w = quot.mul(&e, &v);
                if sub.insert_plain(w.clone()) {
                    sub_basis.push(w);
                }
            }
            let f = sub_basis.len();
            // Frobenius fixed space inside the subalgebra, in sub coords
            let mut coords = Echelon::with_tags(m, f, p);
            for (t, b) in sub_basis.iter().enumerate() {
                coords.insert_tagged(b.clone(), t);
            }
            let mut fro = vec![vec![0u64; f]; f];
            for (j, b) in sub_basis.iter().enumerate() {
                let w = quot.pow(b, p);
                let c = coords.express(&w).expect("subalgebra is Frobenius stable");
                for (l, row) in fro.iter_mut().enumerate() {
                    // (F - I) directly
                    row[j] = modp::sub(c[l], u64::from(l == j), p);
                }
            }
            let fixed = kernel_mod_p(&fro, p);
            if fixed.len() <= 1 {
                fields.push((e, f));
                continue;
            }
            // a fixed vector independent of the identity splits e
            let e_sub = coords.express(&e).expect("identity lies in subalgebra");
            let mut pick = Echelon::new(f, p);
            pick.insert_plain(e_sub);
            let b_sub = fixed
                .into_iter()
                .find(|v| pick.clone().insert_plain(v.clone()))
                .expect("fixed space exceeds the scalars");
            let b: Vec<u64> = {
                let mut acc = vec![0u64; m];
                for (c, base) in b_sub.iter().zip(&sub_basis) {
                    for (a, &x) in acc.iter_mut().zip(base) {
                        *a = modp::add(*a, modp::mul(*c, x, p), p);
                    }
                }
                acc
            };
            // minimal polynomial of b over F_p (with identity e) splits into
            // distinct linear factors; Lagrange idempotents refine e.
            let mut pows = Echelon::with_tags(m, f + 1, p);
            let mut pow_list: Vec<Vec<u64>> = Vec::new();
            let mut cur = e.clone();
            let min_coeffs: Vec<u64> = loop {
                if !pows.insert_tagged(cur.clone(), pow_list.len()) {
                    let c = pows
                        .express(&cur)
                        .expect("dependent power is expressible");
                    let k = pow_list.len();
                    let mut coeffs = vec![0u64; k + 1];
                    for (i, v) in c.iter().take(k).enumerate() {
                        coeffs[i] = modp::sub(0, *v, p);
                    }
                    coeffs[k] = 1;
                    break coeffs;
                }
                pow_list.push(cur.clone());
                cur = quot.mul(&cur, &b);
            };
            let minpoly = modp::PolyP::new(min_coeffs, p);
            let rts = modp::roots(&minpoly, 0);
            assert!(
                rts.len() == minpoly.degree(),
                "Frobenius-fixed element must have a split minimal polynomial"
            );
            for &a in &rts {
                // Lagrange idempotent prod_{a' != a} (b - a' e)/(a - a')
                let mut idem = e.clone();
                for &a2 in &rts {
                    if a2 == a {
                        continue;
                    }
                    let scale = modp::inv(modp::sub(a, a2, p), p);
                    let shifted: Vec<u64> = b
                        .iter()
                        .zip(&e)
                        .map(|(&bb, &ee)| {
                            modp::mul(modp::sub(bb, modp::mul(a2, ee, p), p), scale, p)
                        })
                        .collect();
                    idem = quot.mul(&idem, &shifted);
                }
                debug_assert_eq!(quot.mul(&idem, &idem), idem);
                stack.push(idem);
            }
        }
        // maximal ideal for idempotent e: kernel of x -> e * project(x)
        let mut out = Vec::new();
        for (e, f) in fields {
            let mut mat = vec![vec![0u64; self.n]; m];
            for i in 0..self.n {
                let mut v = vec![0u64; self.n];
                v[i] = 1;
                let w = quot.mul(&e, &project(&v));
                for (l, row) in mat.iter_mut().enumerate() {
                    row[i] = w[l];
                }
            }
            let ker = kernel_mod_p(&mat, p);
            assert_eq!(ker.len(), self.n - f);
            out.push((ker, f));
        }
        out.sort_by(|a, b| (a.1, &a.0).cmp(&(b.1, &b.0)));
        out
    }
}

/// Row echelon accumulator over F_p with optional bookkeeping columns so a
/// vector can be expressed in the inserted basis.
#[derive(Clone)]
struct Echelon {
    p: u64,
    dim: usize,
    tags: usize,
    /// rows normalized to pivot 1; each is (vector | bookkeeping)
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl Echelon {
    fn new(dim: usize, p: u64) -> Self {
        Echelon { p, dim, tags: 0, rows: vec![], pivots: vec![] }
    }

    fn with_tags(dim: usize, tags: usize, p: u64) -> Self {
        Echelon { p, dim, tags, rows: vec![], pivots: vec![] }
    }

    fn reduce(&self, mut v: Vec<u64>) -> Vec<u64> {
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            let c = v[piv];
            if c == 0 {
                continue;
            }
            for (a, b) in v.iter_mut().zip(row) {
                *a = modp::sub(*a, modp::mul(c, *b, self.p), self.p);
            }
        }
        v
    }

    fn insert_plain(&mut self, v: Vec<u64>) -> bool {
        let mut w = v;
        w.resize(self.dim + self.tags, 0);
        self.insert_row(w)
    }

    fn insert_tagged(&mut self, v: Vec<u64>, tag: usize) -> bool {
        let mut w = v;
        w.resize(self.dim + self.tags, 0);
        w[self.dim + tag] = 1;
        self.insert_row(w)
    }

    fn insert_row(&mut self, v: Vec<u64>) -> bool {
        let mut w = self.reduce(v);
        let Some(piv) = w[..self.dim].iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = modp::inv(w[piv], self.p);
        for x in w.iter_mut() {
            *x = modp::mul(*x, inv, self.p);
        }
        self.rows.push(w);
        self.pivots.push(piv);
        true
    }

    /// Coefficients of `v` on the inserted (tagged) vectors, if it lies in
    /// their span.
    fn express(&self, v: &[u64]) -> Option<Vec<u64>> {
        let mut w = v.to_vec();
        w.resize(self.dim + self.tags, 0);
        let r = self.reduce(w);
        if r[..self.dim].iter().any(|&x| x != 0) {
            return None;
        }
        Some(r[self.dim..].iter().map(|&x| modp::sub(0, x, self.p)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// F_p[x]/(f) as an algebra, for cross-checking against direct factoring.
    fn poly_algebra(f: &modp::PolyP) -> AlgebraModP {
        let n = f.degree();
        let p = f.p;
        let mut mult = vec![vec![vec![0u64; n]; n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut xi = vec![0u64; i + 1];
                xi[i] = 1;
                let mut xj = vec![0u64; j + 1];
                xj[j] = 1;
                let prod = modp::PolyP::new(xi, p).mul(&modp::PolyP::new(xj, p)).rem(f);
                let mut c = prod.coeffs.clone();
                c.resize(n, 0);
                mult[i][j] = c;
            }
        }
        let mut one = vec![0u64; n];
        one[0] = 1;
        AlgebraModP { n, p, mult, one }
    }

    #[test]
    fn radical_of_nonreduced_quotient() {
        // F_5[x]/(x^2): radical = (x)
        let f = modp::PolyP::new(vec![0, 0, 1], 5);
        let a = poly_algebra(&f);
        let rad = a.radical_basis();
        assert_eq!(rad.len(), 1);
        assert_eq!(rad[0][0], 0);
        assert_ne!(rad[0][1], 0);
    }

    #[test]
    fn maximal_ideals_match_polynomial_factorization() {
        // x^4 - 1 mod 13 splits into 4 linear factors: 4 maximal ideals, f = 1
        let f = modp::PolyP::new(vec![12, 0, 0, 0, 1], 13);
        let a = poly_algebra(&f);
        let mi = a.maximal_ideal_data();
        assert_eq!(mi.len(), 4);
        assert!(mi.iter().all(|(k, fd)| *fd == 1 && k.len() == 3));

        // x^4 + 1 mod 7 = two quadratic factors: 2 maximal ideals, f = 2
        let g = modp::PolyP::new(vec![1, 0, 0, 0, 1], 7);
        let b = poly_algebra(&g);
        let mj = b.maximal_ideal_data();
        assert_eq!(mj.len(), 2);
        assert!(mj.iter().all(|(k, fd)| *fd == 2 && k.len() == 2));

        // (x^2 + 1)^2 mod 3: one maximal ideal of degree 2 (ramified shape)
        let h = modp::PolyP::new(vec![1, 0, 2, 0, 1], 3);
        let c = poly_algebra(&h);
        let mk = c.maximal_ideal_data();
        assert_eq!(mk.len(), 1);
        assert_eq!(mk[0].1, 2);

        // totally split times inert: (x)(x-1)(x^2+1) mod 3
        let x = modp::PolyP::new(vec![0, 1], 3);
        let x1 = modp::PolyP::new(vec![2, 1], 3);
        let q = modp::PolyP::new(vec![1, 0, 1], 3);
        let fh = x.mul(&x1).mul(&q);
        let d = poly_algebra(&fh);
        let md = d.maximal_ideal_data();
        let degs: Vec<usize> = md.iter().map(|(_, fd)| *fd).collect();
        assert_eq!(degs, vec![1, 1, 2]);
    }

    #[test]
    fn totally_split_at_p2() {
        // x^2 + x mod 2 = x(x+1): F_2 x F_2, two maximal ideals
        let f = modp::PolyP::new(vec![0, 1, 1], 2);
        let a = poly_algebra(&f);
        let mi = a.maximal_ideal_data();
        assert_eq!(mi.len(), 2);
        assert!(mi.iter().all(|(_, fd)| *fd == 1));
    }
}
