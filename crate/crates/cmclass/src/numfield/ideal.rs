//! Fractional ideals of the maximal order as integer lattices in Hermite
//! form on the order basis, with exact arithmetic: products, inverses, sums,
//! norms, membership, prime decomposition (Kummer-Dedekind away from the
//! index, F_p-algebra splitting at index primes), and valuations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{FieldElement, NumberField};
use crate::error::{Error, Result};
use crate::linalg::modp::{self, PolyP};
use crate::linalg::{hnf, kernel_mod, ZMat};
use crate::polyring::QPoly;

/// Fractional ideal `num / den`: `num` rows are a Z-basis (order coords) of
/// an integral ideal, `den > 0`, normalized so gcd(content(num), den) = 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FracIdeal {
    num: ZMat,
    den: BigInt,
}

/// Prime ideal over `p` with residue degree `f` and ramification index `e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeIdeal {
    pub ideal: FracIdeal,
    pub p: BigInt,
    pub f: usize,
    pub e: usize,
}

/// True iff `v` lies in the lattice spanned by the rows of the full-rank
/// upper-triangular Hermite form `h`.
fn lattice_contains(h: &ZMat, v: &[BigInt]) -> bool {
    let n = h.rows;
    let mut rem = v.to_vec();
    for i in 0..n {
        let p = h.at(i, i);
        if (rem[i].clone() % p).is_zero() {
            let c = rem[i].clone() / p;
            for j in i..n {
                rem[j] -= &c * h.at(i, j);
            }
        } else {
            return false;
        }
    }
    rem.iter().all(|x| x.is_zero())
}

impl FracIdeal {
    fn normalized(num: ZMat, den: BigInt) -> FracIdeal {
        assert!(den.is_positive());
        let mut content = den.clone();
        for x in &num.data {
            content = content.gcd(x);
        }
        if content.is_one() {
            return FracIdeal { num, den };
        }
        let data = num.data.iter().map(|x| x / &content).collect();
        FracIdeal {
            num: ZMat::new(num.rows, num.cols, data),
            den: den / content,
        }
    }

    /// The whole maximal order (1).
    pub fn whole(field: &NumberField) -> FracIdeal {
        FracIdeal { num: ZMat::identity(field.degree()), den: BigInt::one() }
    }

    /// Ideal generated by the given elements.
    pub fn from_generators(field: &NumberField, gens: &[FieldElement]) -> Result<FracIdeal> {
        let n = field.degree();
        let o = field.order();
        let mut rows_rat: Vec<Vec<BigRational>> = Vec::new();
        for g in gens {
            if g.is_zero() {
                continue;
            }
            for i in 0..n {
                let prod = field.mul(g, &o.basis_element(i));
                rows_rat.push(o.to_order_coords(&prod));
            }
        }
        if rows_rat.is_empty() {
            return Err(Error::IdealArithmetic("zero ideal".into()));
        }
        let mut den = BigInt::one();
        for r in &rows_rat {
            for c in r {
                den = den.lcm(c.denom());
            }
        }
        let rows: Vec<Vec<BigInt>> = rows_rat
            .iter()
            .map(|r| r.iter().map(|c| c.numer() * (&den / c.denom())).collect())
            .collect();
        let h = hnf(&ZMat::from_rows(rows));
        if h.rows != n {
            return Err(Error::IdealArithmetic("generators span a rank-deficient lattice".into()));
        }
        Ok(FracIdeal::normalized(h, den))
    }

    pub fn principal(field: &NumberField, x: &FieldElement) -> Result<FracIdeal> {
        FracIdeal::from_generators(field, std::slice::from_ref(x))
    }

    pub fn from_integer(field: &NumberField, k: &BigInt) -> Result<FracIdeal> {
        if k.is_zero() {
            return Err(Error::IdealArithmetic("zero ideal".into()));
        }
        let mut m = ZMat::identity(field.degree());
        for x in m.data.iter_mut() {
            *x *= k.abs();
        }
        Ok(FracIdeal { num: m, den: BigInt::one() })
    }

    pub fn num(&self) -> &ZMat {
        &self.num
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_whole(&self, field: &NumberField) -> bool {
        *self == FracIdeal::whole(field)
    }

    /// Basis as field elements (rows of num divided by den).
    pub fn basis_elements(&self, field: &NumberField) -> Vec<FieldElement> {
        let o = field.order();
        let dr = BigRational::from_integer(self.den.clone());
        (0..self.num.rows)
            .map(|i| {
                let coords: Vec<BigRational> = self
                    .num
                    .row(i)
                    .iter()
                    .map(|x| BigRational::from_integer(x.clone()) / &dr)
                    .collect();
                o.from_order_coords(&coords)
            })
            .collect()
    }

    /// Image of the ideal under complex conjugation.
    pub fn conjugate(&self, field: &NumberField) -> FracIdeal {
        let gens: Vec<FieldElement> =
            self.basis_elements(field).iter().map(|x| field.conjugate(x)).collect();
        FracIdeal::from_generators(field, &gens).expect("conjugate of an ideal has full rank")
    }

    pub fn mul(&self, field: &NumberField, other: &FracIdeal) -> FracIdeal {
        let o = field.order();
        let n = field.degree();
        let mut rows = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                rows.push(o.mult_int(self.num.row(i), other.num.row(j)));
            }
        }
        let h = hnf(&ZMat::from_rows(rows));
        assert_eq!(h.rows, n);
        FracIdeal::normalized(h, &self.den * &other.den)
    }

    /// Sum (gcd) of two ideals.
    pub fn sum(&self, field: &NumberField, other: &FracIdeal) -> FracIdeal {
        let n = field.degree();
        let den = self.den.lcm(&other.den);
        let s1 = &den / &self.den;
        let s2 = &den / &other.den;
        let mut rows = Vec::with_capacity(2 * n);
        for i in 0..n {
            rows.push(self.num.row(i).iter().map(|x| x * &s1).collect::<Vec<_>>());
        }
        for i in 0..n {
            rows.push(other.num.row(i).iter().map(|x| x * &s2).collect::<Vec<_>>());
        }
        let h = hnf(&ZMat::from_rows(rows));
        FracIdeal::normalized(h, den)
    }

    /// Norm as a positive rational.
    pub fn norm(&self, field: &NumberField) -> BigRational {
        let n = field.degree();
        let mut det = BigInt::one();
        for i in 0..n {
            det *= self.num.at(i, i);
        }
        BigRational::new(det, self.den.pow(n as u32))
    }

    pub fn inverse(&self, field: &NumberField) -> FracIdeal {
        let o = field.order();
        let n = field.degree();
        // L = num as an integral ideal; L^{-1} = {w/N : w gamma_j in N*O}
        let mut nrm = BigInt::one();
        for i in 0..n {
            nrm *= self.num.at(i, i);
        }
        let mut cond = ZMat::zero(n * n, n);
        for j in 0..n {
            for i in 0..n {
                let prod = o.mult_int(&unit_vec(n, i), self.num.row(j));
                for l in 0..n {
                    *cond.at_mut(j * n + l, i) = prod[l].clone();
                }
            }
        }
        let ker = kernel_mod(&cond, &nrm);
        assert_eq!(ker.rows, n, "inverse lattice has full rank");
        // I^{-1} = den * L^{-1}
        let scaled = ZMat::new(
            ker.rows,
            ker.cols,
            ker.data.iter().map(|x| x * &self.den).collect(),
        );
        let h = hnf(&scaled);
        FracIdeal::normalized(h, nrm)
    }

    pub fn pow(&self, field: &NumberField, e: i64) -> FracIdeal {
        let base = if e < 0 { self.inverse(field) } else { self.clone() };
        let mut acc = FracIdeal::whole(field);
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(field, &b);
            }
            b = b.mul(field, &b);
            k >>= 1;
        }
        acc
    }

    pub fn contains(&self, field: &NumberField, x: &FieldElement) -> bool {
        let o = field.order();
        let scaled = field.scale(x, &BigRational::from_integer(self.den.clone()));
        match o.integral_coords(&scaled) {
            Some(v) => lattice_contains(&self.num, &v),
            None => false,
        }
    }

    pub fn contains_ideal(&self, field: &NumberField, other: &FracIdeal) -> bool {
        other
            .basis_elements(field)
            .iter()
            .all(|x| self.contains(field, x))
    }

    pub fn is_coprime_to_integer(&self, field: &NumberField, k: &BigInt) -> bool {
        let kk = FracIdeal::from_integer(field, k).expect("nonzero integer");
        self.sum(field, &kk).is_whole(field)
    }

    /// Valuation at a prime ideal.
    pub fn valuation(&self, field: &NumberField, pr: &PrimeIdeal) -> i64 {
        let num_ideal = FracIdeal { num: self.num.clone(), den: BigInt::one() };
        let mut v = integral_valuation(field, &num_ideal, pr);
        // subtract e * v_p(den)
        let mut d = self.den.clone();
        while (&d % &pr.p).is_zero() {
            d /= &pr.p;
            v -= pr.e as i64;
        }
        v
    }
}

fn unit_vec(n: usize, i: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); n];
    v[i] = BigInt::one();
    v
}

/// Largest k with I contained in P^k, for integral nonzero I.
fn integral_valuation(field: &NumberField, ideal: &FracIdeal, pr: &PrimeIdeal) -> i64 {
    debug_assert!(ideal.is_integral());
    let mut v = 0i64;
    let mut pk = pr.ideal.clone();
    loop {
        if !pk.contains_ideal(field, ideal) {
            return v;
        }
        v += 1;
        pk = pk.mul(field, &pr.ideal);
    }
}

/// Valuation of a nonzero element at a prime.
pub fn element_valuation(field: &NumberField, x: &FieldElement, pr: &PrimeIdeal) -> i64 {
    let i = FracIdeal::principal(field, x).expect("nonzero element");
    i.valuation(field, pr)
}

/// Prime ideals over p with ramification indices, deterministically ordered
/// by (residue degree, lattice).
pub fn prime_decompose(field: &NumberField, p: &BigInt) -> Result<Vec<PrimeIdeal>> {
    if !p.is_positive() || !super::zfactor::is_probable_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not a positive prime")));
    }
    let o = field.order();
    let n = field.degree();
    let mut out: Vec<PrimeIdeal> = Vec::new();
    if !(o.index() % p).is_zero() {
        // Kummer-Dedekind on the defining polynomial mod p
        let p64 = p
            .to_u64()
            .ok_or_else(|| Error::InvalidInput("prime exceeds supported range".into()))?;
        let fp = field
            .poly()
            .reduce_mod_p(p64)
            .expect("monic integral polynomial");
        let factors = modp::factor(&fp, 1);
        for (g, e) in factors {
            let gl = lift_poly(&g);
            let gen = field.from_qpoly(&gl);
            let ideal = FracIdeal::from_generators(
                field,
                &[field.from_rational(BigRational::from_integer(p.clone())), gen],
            )?;
            out.push(PrimeIdeal { ideal, p: p.clone(), f: g.degree(), e });
        }
    } else {
        let p64 = p
            .to_u64()
            .ok_or_else(|| Error::InvalidInput("index prime exceeds supported range".into()))?;
        let algebra = o.algebra_mod_p(p64);
        for (mbasis, f) in algebra.maximal_ideal_data() {
            let mut rows: Vec<Vec<BigInt>> = mbasis
                .into_iter()
                .map(|v| v.into_iter().map(BigInt::from).collect())
                .collect();
            for i in 0..n {
                let mut r = vec![BigInt::zero(); n];
                r[i] = p.clone();
                rows.push(r);
            }
            let h = hnf(&ZMat::from_rows(rows));
            assert_eq!(h.rows, n);
            let ideal = FracIdeal::normalized(h, BigInt::one());
            out.push(PrimeIdeal { ideal, p: p.clone(), f, e: 0 });
        }
        // ramification indices by valuation of pO
        let p_ideal = FracIdeal::from_integer(field, p)?;
        for pr in out.iter_mut() {
            pr.e = integral_valuation(field, &p_ideal, pr) as usize;
            assert!(pr.e >= 1);
        }
    }
    out.sort_by(|a, b| (a.f, &a.ideal.num.data).cmp(&(b.f, &b.ideal.num.data)));
    let efsum: usize = out.iter().map(|pr| pr.e * pr.f).sum();
    assert_eq!(efsum, n, "sum of e*f equals the degree");
    Ok(out)
}

fn lift_poly(g: &PolyP) -> QPoly {
    QPoly::from_bigint_coeffs(
        &g.coeffs.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>(),
    )
}
