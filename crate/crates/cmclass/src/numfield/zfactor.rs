//! Integer factorization sized for this crate: sieve, trial division, a
//! Miller-Rabin primality test, and Pollard-Brent rho as a backstop.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Primes up to and including `bound` by a plain sieve.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return vec![];
    }
    let n = bound as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut p = 2usize;
    while p * p <= n {
        if sieve[p] {
            let mut q = p * p;
            while q <= n {
                sieve[q] = false;
                q += p;
            }
        }
        p += 1;
    }
    (2..=n).filter(|&i| sieve[i]).map(|i| i as u64).collect()
}

/// Miller-Rabin with the first twelve prime bases: deterministic below
/// 3.3 * 10^24, strong probable-prime test beyond.
pub fn is_probable_prime(n: &BigInt) -> bool {
    if n <= &BigInt::one() {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for b in BASES {
        let bb = BigInt::from(b);
        if *n == bb {
            return true;
        }
        if (n % &bb).is_zero() {
            return false;
        }
    }
    let n1 = n - BigInt::one();
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'bases: for b in BASES {
        let mut x = BigInt::from(b).modpow(&d, n);
        if x.is_one() || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&BigInt::from(2u8), n);
            if x == n1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// One Pollard-Brent rho round with polynomial x^2 + c; None on failure.
fn pollard_brent(n: &BigInt, c: u64) -> Option<BigInt> {
    let one = BigInt::one();
    let cc = BigInt::from(c);
    let mut y = BigInt::from(2u8);
    let mut g = BigInt::one();
    let mut q = BigInt::one();
    let mut x = BigInt::zero();
    let mut ys = BigInt::zero();
    let m = 128u64;
    let mut r = 1u64;
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = (&y * &y + &cc) % n;
        }
        let mut k = 0u64;
        while k < r && g.is_one() {
            ys = y.clone();
            for _ in 0..m.min(r - k) {
                y = (&y * &y + &cc) % n;
                let diff = (&x - &y).abs();
                q = (&q * &diff) % n;
            }
            g = q.gcd(n);
            k += m;
        }
        r <<= 1;
        if r > 1 << 22 {
            return None;
        }
    }
    if g == *n {
        // backtrack
        loop {
            ys = (&ys * &ys + &cc) % n;
            let g2 = (&x - &ys).abs().gcd(n);
            if g2 > one {
                if g2 == *n {
                    return None;
                }
                return Some(g2);
            }
        }
    }
    Some(g)
}

/// Full factorization of |n| for n != 0, smallest primes first.
pub fn factor_integer(n: &BigInt) -> Result<Vec<(BigInt, u32)>> {
    let mut m = n.abs();
    if m.is_zero() {
        return Err(Error::InvalidInput("cannot factor zero".into()));
    }
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    let push = |p: BigInt, e: u32, out: &mut Vec<(BigInt, u32)>| {
        for (q, f) in out.iter_mut() {
            if *q == p {
                *f += e;
                return;
            }
        }
        out.push((p, e));
    };
    for p in [2u64, 3, 5] {
        let pb = BigInt::from(p);
        let mut e = 0;
        while (&m % &pb).is_zero() {
            m /= &pb;
            e += 1;
        }
        if e > 0 {
            push(pb, e, &mut out);
        }
    }
    // wheel over 6k +- 1
    let mut d = 7u64;
    let mut step = 4u64;
    while d <= 1_000_000 {
        let db = BigInt::from(d);
        if &db * &db > m {
            break;
        }
        let mut e = 0;
        while (&m % &db).is_zero() {
            m /= &db;
            e += 1;
        }
        if e > 0 {
            push(db, e, &mut out);
        }
        d += step;
        step = 6 - step;
    }
    // remaining cofactor: prime, square, or split by rho
    let mut stack = vec![(m, 1u32)];
    while let Some((v, mult)) = stack.pop() {
        if v.is_one() {
            continue;
        }
        if is_probable_prime(&v) {
            push(v, mult, &mut out);
            continue;
        }
        let r = v.sqrt();
        if &r * &r == v {
            stack.push((r, mult * 2));
            continue;
        }
        let mut split = None;
        for c in 1..64u64 {
            if let Some(g) = pollard_brent(&v, c) {
                split = Some(g);
                break;
            }
        }
        let Some(g) = split else {
            return Err(Error::InvalidInput(format!("could not factor cofactor {v}")));
        };
        let w = &v / &g;
        stack.push((g, mult));
        stack.push((w, mult));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

pub fn is_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

/// Writes n > 0 as `d0 * s^2` with d0 squarefree; returns `(d0, s)`.
pub fn squarefree_decompose(n: &BigInt) -> Result<(BigInt, BigInt)> {
    if !n.is_positive() {
        return Err(Error::InvalidInput("squarefree decomposition needs n > 0".into()));
    }
    let mut d0 = BigInt::one();
    let mut s = BigInt::one();
    for (p, e) in factor_integer(n)? {
        if e % 2 == 1 {
            d0 *= &p;
        }
        s *= p.pow(e / 2);
    }
    Ok((d0, s))
}

/// Factors |n| over the odd primes <= bound and 2; None when not smooth.
pub fn smooth_factor(n: &BigInt, primes: &[u64]) -> Option<Vec<(u64, u32)>> {
    let mut m = n.abs();
    if m.is_zero() {
        return None;
    }
    let mut out = Vec::new();
    for &p in primes {
        let pb = BigInt::from(p);
        let mut e = 0;
        while (&m % &pb).is_zero() {
            m /= &pb;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        if m.is_one() {
            break;
        }
    }
    if m.is_one() { Some(out) } else { None }
}
