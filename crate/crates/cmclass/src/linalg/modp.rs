//! Arithmetic over F_p and F_{p^2} for word-sized p, polynomial factorization
//! (squarefree / distinct-degree / equal-degree splitting), and mod-p linear
//! algebra. Randomized splitting draws from a caller-seeded ChaCha stream so
//! results are reproducible.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn add(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

pub fn sub(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + p as u128 - b as u128) % p as u128) as u64
}

pub fn mul(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn pow(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, a, p);
        }
        a = mul(a, a, p);
        e >>= 1;
    }
    acc
}

pub fn inv(a: u64, p: u64) -> u64 {
    assert!(a % p != 0, "inverse of zero mod {p}");
    pow(a, p - 2, p)
}

pub fn bigint_mod(v: &BigInt, p: u64) -> u64 {
    v.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

/// Dense polynomial over F_p, little-endian coefficients, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyP {
    pub coeffs: Vec<u64>,
    pub p: u64,
}

impl PolyP {
    pub fn new(mut coeffs: Vec<u64>, p: u64) -> Self {
        for c in &mut coeffs {
            *c %= p;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        PolyP { coeffs, p }
    }

    pub fn zero(p: u64) -> Self {
        PolyP { coeffs: vec![], p }
    }

    pub fn one(p: u64) -> Self {
        PolyP { coeffs: vec![1], p }
    }

    pub fn x(p: u64) -> Self {
        PolyP { coeffs: vec![0, 1], p }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lead(&self) -> u64 {
        *self.coeffs.last().unwrap_or(&0)
    }

    pub fn add(&self, other: &PolyP) -> PolyP {
        let p = self.p;
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0u64; n];
        for (i, o) in out.iter_mut().enumerate() {
            let a = self.coeffs.get(i).copied().unwrap_or(0);
            let b = other.coeffs.get(i).copied().unwrap_or(0);
            *o = add(a, b, p);
        }
        PolyP::new(out, p)
    }

    pub fn sub(&self, other: &PolyP) -> PolyP {
        let p = self.p;
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0u64; n];
        for (i, o) in out.iter_mut().enumerate() {
            let a = self.coeffs.get(i).copied().unwrap_or(0);
            let b = other.coeffs.get(i).copied().unwrap_or(0);
            *o = sub(a, b, p);
        }
        PolyP::new(out, p)
    }

    pub fn mul(&self, other: &PolyP) -> PolyP {
        if self.is_zero() || other.is_zero() {
            return PolyP::zero(self.p);
        }
        let p = self.p;
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = add(out[i + j], mul(a, b, p), p);
            }
        }
        PolyP::new(out, p)
    }

    pub fn scale(&self, s: u64) -> PolyP {
        PolyP::new(self.coeffs.iter().map(|&c| mul(c, s, self.p)).collect(), self.p)
    }

    pub fn monic(&self) -> PolyP {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(inv(self.lead(), self.p))
    }

    /// (quotient, remainder)
    pub fn divrem(&self, den: &PolyP) -> (PolyP, PolyP) {
        assert!(!den.is_zero(), "division by zero polynomial");
        let p = self.p;
        if self.degree() < den.degree() || self.is_zero() {
            return (PolyP::zero(p), self.clone());
        }
        let dinv = inv(den.lead(), p);
        let mut rem = self.coeffs.clone();
        let dq = self.degree() - den.degree();
        let mut quo = vec![0u64; dq + 1];
        for k in (0..=dq).rev() {
            let idx = k + den.degree();
            if idx >= rem.len() {
                continue;
            }
            let c = mul(rem[idx], dinv, p);
            if c == 0 {
                continue;
            }
            quo[k] = c;
            for (j, &d) in den.coeffs.iter().enumerate() {
                rem[k + j] = sub(rem[k + j], mul(c, d, p), p);
            }
        }
        (PolyP::new(quo, p), PolyP::new(rem, p))
    }

    pub fn rem(&self, den: &PolyP) -> PolyP {
        self.divrem(den).1
    }

    pub fn gcd(&self, other: &PolyP) -> PolyP {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() { a } else { a.monic() }
    }

    pub fn derivative(&self) -> PolyP {
        if self.coeffs.len() <= 1 {
            return PolyP::zero(self.p);
        }
        let out = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| mul(c, (i as u64) % self.p, self.p))
            .collect();
        PolyP::new(out, self.p)
    }

    pub fn pow_mod(&self, mut e: u64, modulus: &PolyP) -> PolyP {
        let mut acc = PolyP::one(self.p);
        let mut base = self.rem(modulus);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(modulus);
            }
            base = base.mul(&base).rem(modulus);
            e >>= 1;
        }
        acc
    }

    pub fn eval(&self, x: u64) -> u64 {
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = add(mul(acc, x, self.p), c, self.p);
        }
        acc
    }
}

/// x^(p^k) mod f via repeated Frobenius.
#[cfg(test)]
fn frobenius_power(f: &PolyP, k: usize) -> PolyP {
    let mut xp = PolyP::x(f.p);
    for _ in 0..k {
        xp = xp.pow_mod(f.p, f);
    }
    xp
}

/// Full factorization of a nonconstant polynomial into monic irreducible
/// factors with multiplicities. Deterministic for the caller via `seed`.
pub fn factor(f: &PolyP, seed: u64) -> Vec<(PolyP, usize)> {
    let p = f.p;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e3779b97f4a7c15);
    let mut result: Vec<(PolyP, usize)> = Vec::new();
    let mut stack: Vec<(PolyP, usize)> = vec![(f.monic(), 1)];
    while let Some((g, mult)) = stack.pop() {
        if g.degree() == 0 {
            continue;
        }
        let d = g.derivative();
        if d.is_zero() {
            // g = h(x^p): replace by h with multiplicity * p
            let mut h = Vec::new();
            let step = p as usize;
            let mut i = 0;
            while i < g.coeffs.len() {
                h.push(g.coeffs[i]);
                i += step;
            }
            stack.push((PolyP::new(h, p), mult * step));
            continue;
        }
        let sq = g.gcd(&d);
        if sq.degree() > 0 {
            let (q, r) = g.divrem(&sq);
            debug_assert!(r.is_zero());
            stack.push((q, mult));
            stack.push((sq, mult));
            continue;
        }
        // g squarefree: distinct-degree then equal-degree split
        let mut rem_poly = g.clone();
        let mut xq = PolyP::x(p);
        let mut deg = 1usize;
        while rem_poly.degree() >= 2 * deg {
            xq = xq.pow_mod(p, &rem_poly);
            let diff = xq.sub(&PolyP::x(p));
            let h = rem_poly.gcd(&diff);
            if h.degree() > 0 {
                for irr in equal_degree_split(&h, deg, &mut rng) {
                    merge_factor(&mut result, irr, mult);
                }
                let (q, r) = rem_poly.divrem(&h);
                debug_assert!(r.is_zero());
                rem_poly = q;
                xq = xq.rem(&rem_poly);
            }
            deg += 1;
        }
        if rem_poly.degree() > 0 {
            merge_factor(&mut result, rem_poly.monic(), mult);
        }
    }
    result.sort_by(|a, b| (a.0.degree(), &a.0.coeffs).cmp(&(b.0.degree(), &b.0.coeffs)));
    result
}

fn merge_factor(result: &mut Vec<(PolyP, usize)>, f: PolyP, mult: usize) {
    for (g, m) in result.iter_mut() {
        if *g == f {
            *m += mult;
            return;
        }
    }
    result.push((f, mult));
}

/// Cantor-Zassenhaus equal-degree splitting: `f` is squarefree, a product of
/// irreducibles all of degree `d`.
fn equal_degree_split(f: &PolyP, d: usize, rng: &mut ChaCha8Rng) -> Vec<PolyP> {
    let p = f.p;
    if f.degree() == d {
        return vec![f.monic()];
    }
    loop {
        let deg = f.degree();
        let coeffs: Vec<u64> = (0..deg).map(|_| rng.gen_range(0..p)).collect();
        let a = PolyP::new(coeffs, p);
        if a.degree() == 0 {
            continue;
        }
        let g = f.gcd(&a);
        if g.degree() > 0 && g.degree() < f.degree() {
            let (q, _) = f.divrem(&g);
            let mut out = equal_degree_split(&g, d, rng);
            out.extend(equal_degree_split(&q, d, rng));
            return out;
        }
        let h = if p == 2 {
            // trace map sum a^(2^i)
            let mut t = a.clone();
            let mut acc = a.clone();
            for _ in 1..(d * f.degree() / f.degree().max(1)).max(d) {
                t = t.mul(&t).rem(f);
                acc = acc.add(&t);
            }
            acc
        } else {
            // a^((p^d - 1)/2) - 1
            let mut e = BigInt::from(1);
            for _ in 0..d {
                e *= BigInt::from(p);
            }
            e = (e - 1) / 2;
            let mut acc = PolyP::one(p);
            let mut base = a.rem(f);
            let mut bits = e.clone();
            while bits > BigInt::from(0) {
                if bits.is_odd() {
                    acc = acc.mul(&base).rem(f);
                }
                base = base.mul(&base).rem(f);
                bits >>= 1;
            }
            acc.sub(&PolyP::one(p))
        };
        let g = f.gcd(&h);
        if g.degree() > 0 && g.degree() < f.degree() {
            let (q, _) = f.divrem(&g);
            let mut out = equal_degree_split(&g, d, rng);
            out.extend(equal_degree_split(&q, d, rng));
            return out;
        }
    }
}

/// Roots of `f` in F_p.
pub fn roots(f: &PolyP, seed: u64) -> Vec<u64> {
    let mut out: Vec<u64> = factor(f, seed)
        .into_iter()
        .filter(|(g, _)| g.degree() == 1)
        .map(|(g, _)| sub(0, mul(g.coeffs[0], inv(g.coeffs[1], f.p), f.p), f.p))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Kernel basis of an r x c matrix over F_p (row-major).
pub fn kernel_mod_p(mat: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    if mat.is_empty() {
        return vec![];
    }
    let rows = mat.len();
    let cols = mat[0].len();
    let mut a: Vec<Vec<u64>> = mat.iter().map(|r| r.iter().map(|&x| x % p).collect()).collect();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut r = 0usize;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, pr);
        let pinv = inv(a[r][c], p);
        for j in 0..cols {
            a[r][j] = mul(a[r][j], pinv, p);
        }
        for i in 0..rows {
            if i == r || a[i][c] == 0 {
                continue;
            }
            let f = a[i][c];
            for j in 0..cols {
                a[i][j] = sub(a[i][j], mul(f, a[r][j], p), p);
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
        let mut v = vec![0u64; cols];
        v[c] = 1;
        for (cc, pr) in pivot_of_col.iter().enumerate() {
            if let Some(pr) = pr {
                v[cc] = sub(0, a[*pr][c], p);
            }
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_known_quartic() {
        // x^4 + 1 mod 7 = (x^2 + 3x + 1)(x^2 + 4x + 1)
        let f = PolyP::new(vec![1, 0, 0, 0, 1], 7);
        let fs = factor(&f, 1);
        assert_eq!(fs.len(), 2);
        let prod = fs.iter().fold(PolyP::one(7), |acc, (g, m)| {
            let mut a = acc;
            for _ in 0..*m {
                a = a.mul(g);
            }
            a
        });
        assert_eq!(prod, f.monic());
        assert!(fs.iter().all(|(g, _)| g.degree() == 2));
    }

    #[test]
    fn factor_with_multiplicity() {
        // (x + 1)^2 (x^2 + x + 1) mod 5
        let a = PolyP::new(vec![1, 1], 5);
        let b = PolyP::new(vec![1, 1, 1], 5);
        let f = a.mul(&a).mul(&b);
        let fs = factor(&f, 7);
        assert_eq!(fs.len(), 2);
        let m1 = fs.iter().find(|(g, _)| g.degree() == 1).unwrap();
        assert_eq!(m1.1, 2);
        assert_eq!(m1.0, a.monic());
    }

    #[test]
    fn roots_of_cyclotomic() {
        // x^4 - 1 mod 13 has roots 1, 5, 8, 12
        let f = PolyP::new(vec![13 - 1, 0, 0, 0, 1], 13);
        assert_eq!(roots(&f, 3), vec![1, 5, 8, 12]);
    }

    #[test]
    fn frobenius_fixed_points() {
        let f = PolyP::new(vec![2, 0, 1], 5); // x^2 + 2, irreducible mod 5
        let xp = frobenius_power(&f, 2);
        // Frobenius^2 = identity on F_{25}
        assert_eq!(xp, PolyP::x(5).rem(&f));
    }

    #[test]
    fn kernel_mod2() {
        let m = vec![vec![1, 1, 0], vec![0, 0, 0]];
        let k = kernel_mod_p(&m, 2);
        assert_eq!(k.len(), 2);
        for v in k {
            assert_eq!((v[0] + v[1]) % 2, 0);
        }
    }
}
