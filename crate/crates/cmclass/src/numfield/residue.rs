//! The unit group of `O/NO` for a maximal order `O` and small modulus `N`:
//! full enumeration of units, a Smith normal form presentation with explicit
//! generators, and discrete logarithms for every unit. Also the multiplicative
//! congruence `x = 1 mod* N`, read off prime by prime.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ideal::{element_valuation, prime_decompose};
use super::{zfactor, FieldElement, NumberField};
use crate::error::{Error, Result};
use crate::linalg::{hnf, snf_with_transforms, QMat, ZMat};

const MAX_RESIDUE_RING: u64 = 2_000_000;

/// `(O/NO)^x` as an abstract abelian group with explicit unit generators.
///
/// Invariant factors are ascending (`d_i | d_{i+1}`), and every unit has
/// unique coordinates in the product of the `Z/d_i`; coordinates of a unit
/// `u` satisfy `u = prod g_i^{c_i}` in `O/NO` for the stored generators.
#[derive(Clone, Debug)]
pub struct ResidueUnitGroup {
    modulus: u64,
    n: usize,
    invariant_factors: Vec<BigInt>,
    /// order coordinates in `[0, N)` of each Smith generator
    generators: Vec<Vec<u64>>,
    /// order coordinates of the ring unit, reduced mod `N`
    one_coords: Vec<u64>,
    /// discrete logarithm of every unit, keyed by canonical coordinates
    dlog: HashMap<Vec<u64>, Vec<BigInt>>,
}

impl ResidueUnitGroup {
    /// Enumerates the units of `O/NO`, picks a greedy generating set, and
    /// converts the relation lattice of its Cayley graph to Smith form.
    pub fn compute(field: &NumberField, modulus: &BigInt) -> Result<ResidueUnitGroup> {
        let nmod = modulus
            .to_u64()
            .filter(|&m| m >= 2)
            .ok_or_else(|| Error::InvalidInput(format!("residue modulus {modulus} out of range")))?;
        let n = field.degree();
        let ring_size = (nmod as f64).powi(n as i32);
        if ring_size > MAX_RESIDUE_RING as f64 {
            return Err(Error::InvalidInput(format!(
                "residue ring with {ring_size} elements is too large to enumerate"
            )));
        }
        let ring = ResidueRing::new(field, nmod);

        // all units, in lexicographic coordinate order
        let mut units: Vec<Vec<u64>> = Vec::new();
        let mut counter = vec![0u64; n];
        loop {
            if ring.is_unit(field, &counter) {
                units.push(counter.clone());
            }
            if !next_counter(&mut counter, nmod) {
                break;
            }
        }
        let order = units.len();

        // greedy generators: add any unit not generated so far
        let mut gens: Vec<Vec<u64>> = Vec::new();
        let mut span: HashMap<Vec<u64>, Vec<BigInt>> = HashMap::new();
        span.insert(ring.one(), vec![]);
        for u in &units {
            if span.contains_key(u) {
                continue;
            }
            gens.push(u.clone());
            for e in span.values_mut() {
                e.push(BigInt::zero());
            }
            // closure under the enlarged generating set
            let mut frontier: Vec<Vec<u64>> = span.keys().cloned().collect();
            while let Some(x) = frontier.pop() {
                let ex = span[&x].clone();
                for (i, gi) in gens.iter().enumerate() {
                    let y = ring.mul(field, &x, gi);
                    if span.contains_key(&y) {
                        continue;
                    }
                    let mut ey = ex.clone();
                    ey[i] += 1;
                    span.insert(y.clone(), ey);
                    frontier.push(y);
                }
            }
            if span.len() == order {
                break;
            }
        }
        assert_eq!(span.len(), order, "unit closure must reach every unit");
        let k = gens.len();

        // Cayley relations e_x + e_i - e_{x g_i} generate the full relation
        // lattice of the expression map Z^k -> units
        let mut lattice = ZMat::zero(0, k);
        let mut batch: Vec<Vec<BigInt>> = Vec::new();
        for (x, ex) in &span {
            for (i, gi) in gens.iter().enumerate() {
                let y = ring.mul(field, x, gi);
                let ey = &span[&y];
                let mut rel: Vec<BigInt> = ex.iter().zip(ey).map(|(a, b)| a - b).collect();
                rel[i] += 1;
                if rel.iter().all(|c| c.is_zero()) {
                    continue;
                }
                batch.push(rel);
                if batch.len() >= 64 {
                    lattice = fold_rows(lattice, &mut batch);
                }
            }
        }
        lattice = fold_rows(lattice, &mut batch);
        if lattice.rows < k {
            return Err(Error::ClassGroupInconclusive(
                "residue unit relations do not have full rank".into(),
            ));
        }
        let (d, _, v) = snf_with_transforms(&lattice);
        assert_eq!(d.len(), k);
        assert!(d.iter().all(|x| !x.is_zero()));

        // coordinates of expression e are (e . V) mod d; generators of the
        // cyclic factors are the images of the rows of V^{-1}
        let keep: Vec<usize> = (0..k).filter(|&j| !d[j].is_one()).collect();
        let invariant_factors: Vec<BigInt> = keep.iter().map(|&j| d[j].abs()).collect();
        let vinv = unimodular_inverse(&v);
        let mut generators = Vec::with_capacity(keep.len());
        for &j in &keep {
            let mut g = ring.one();
            for (i, gi) in gens.iter().enumerate() {
                let factor = ring.pow_signed(field, gi, vinv.at(j, i), order as u64);
                g = ring.mul(field, &g, &factor);
            }
            generators.push(g);
        }

        // discrete log of every unit via its expression vector
        let mut dlog: HashMap<Vec<u64>, Vec<BigInt>> = HashMap::with_capacity(order);
        for (x, ex) in &span {
            let mut c = Vec::with_capacity(keep.len());
            for (t, &j) in keep.iter().enumerate() {
                let mut s = BigInt::zero();
                for (i, e) in ex.iter().enumerate() {
                    s += e * v.at(i, j);
                }
                c.push(s.mod_floor(&invariant_factors[t]));
            }
            let prev = dlog.insert(x.clone(), c);
            assert!(prev.is_none());
        }
        // the coordinate map must be a bijection onto the product of Z/d_i
        let prod: BigInt = invariant_factors.iter().product();
        assert_eq!(prod, BigInt::from(order as u64));

        let g = ResidueUnitGroup {
            modulus: nmod,
            n,
            invariant_factors,
            generators,
            one_coords: ring.one(),
            dlog,
        };
        // spot-check: each generator's own coordinates are a unit vector
        for (t, gen) in g.generators.iter().enumerate() {
            let c = &g.dlog[gen];
            for (s, cs) in c.iter().enumerate() {
                let expect = if s == t { BigInt::one() } else { BigInt::zero() };
                assert_eq!(cs, &expect, "generator {t} must have unit coordinates");
            }
        }
        Ok(g)
    }

    pub fn order(&self) -> BigInt {
        BigInt::from(self.dlog.len() as u64)
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Smith generators as integral field elements with coordinates in `[0, N)`.
    pub fn generators(&self, field: &NumberField) -> Vec<FieldElement> {
        self.generators
            .iter()
            .map(|g| {
                let coords: Vec<BigInt> = g.iter().map(|&c| BigInt::from(c)).collect();
                field.order().from_order_coords_int(&coords)
            })
            .collect()
    }

    /// Discrete logarithm of `x` in the product of the `Z/d_i`. `x` may have
    /// a denominator coprime to the modulus.
    pub fn coords_of(&self, field: &NumberField, x: &FieldElement) -> Result<Vec<BigInt>> {
        let den = field.order().denominator_of(x);
        let nb = BigInt::from(self.modulus);
        if !den.gcd(&nb).is_one() {
            return Err(Error::NotInvertible { modulus: nb });
        }
        let y = field.scale(x, &BigRational::from_integer(den.clone()));
        let yc = self.canonical(field, &y)?;
        let dc = self.canonical_int(&den);
        let cy = self
            .dlog
            .get(&yc)
            .ok_or_else(|| Error::NotInvertible { modulus: nb.clone() })?;
        let cd = self
            .dlog
            .get(&dc)
            .ok_or_else(|| Error::NotInvertible { modulus: nb })?;
        Ok(cy
            .iter()
            .zip(cd)
            .zip(&self.invariant_factors)
            .map(|((a, b), d)| (a - b).mod_floor(d))
            .collect())
    }

    /// Canonical `[0, N)` order coordinates of an integral element.
    fn canonical(&self, field: &NumberField, x: &FieldElement) -> Result<Vec<u64>> {
        let coords = field.order().integral_coords(x).ok_or_else(|| {
            Error::InvalidInput("element is not integral at the residue modulus".into())
        })?;
        let nb = BigInt::from(self.modulus);
        Ok(coords
            .iter()
            .map(|c| c.mod_floor(&nb).to_u64().expect("reduced coordinate"))
            .collect())
    }

    /// Canonical coordinates of a rational integer (`t` times the unit).
    fn canonical_int(&self, t: &BigInt) -> Vec<u64> {
        let nb = BigInt::from(self.modulus);
        let r = t.mod_floor(&nb).to_u64().expect("reduced scalar");
        let mut v = vec![0u64; self.n];
        for (vi, oi) in v.iter_mut().zip(self.one_coords.iter()) {
            *vi = (r * oi) % self.modulus;
        }
        v
    }
}

/// Multiplication in `O/NO` in order coordinates.
struct ResidueRing {
    modulus: u64,
    one: Vec<u64>,
}

impl ResidueRing {
    fn new(field: &NumberField, modulus: u64) -> ResidueRing {
        let nb = BigInt::from(modulus);
        let one = field
            .order()
            .one_coords()
            .iter()
            .map(|c| c.mod_floor(&nb).to_u64().unwrap())
            .collect();
        ResidueRing { modulus, one }
    }

    fn one(&self) -> Vec<u64> {
        self.one.clone()
    }

    fn mul(&self, field: &NumberField, a: &[u64], b: &[u64]) -> Vec<u64> {
        let ab: Vec<BigInt> = a.iter().map(|&x| BigInt::from(x)).collect();
        let bb: Vec<BigInt> = b.iter().map(|&x| BigInt::from(x)).collect();
        let prod = field.order().mult_int(&ab, &bb);
        let nb = BigInt::from(self.modulus);
        prod.iter()
            .map(|c| c.mod_floor(&nb).to_u64().unwrap())
            .collect()
    }

    /// A residue class is a unit iff the norm of its lift is coprime to `N`
    /// (the norm is the determinant of multiplication in order coordinates).
    fn is_unit(&self, field: &NumberField, a: &[u64]) -> bool {
        let coords: Vec<BigInt> = a.iter().map(|&x| BigInt::from(x)).collect();
        let x = field.order().from_order_coords_int(&coords);
        let nrm = field.norm(&x);
        debug_assert!(nrm.denom().is_one());
        nrm.numer().gcd(&BigInt::from(self.modulus)).is_one()
    }

    fn pow(&self, field: &NumberField, a: &[u64], mut e: u64) -> Vec<u64> {
        let mut base = a.to_vec();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(field, &acc, &base);
            }
            base = self.mul(field, &base, &base);
            e >>= 1;
        }
        acc
    }

    /// `a^e` with a possibly negative exponent, using `a^{-1} = a^{ord-1}`.
    fn pow_signed(&self, field: &NumberField, a: &[u64], e: &BigInt, group_order: u64) -> Vec<u64> {
        let m = BigInt::from(group_order);
        let r = e.mod_floor(&m).to_u64().expect("reduced exponent");
        self.pow(field, a, r)
    }
}

/// Advances a mixed-radix counter; false when it wraps to zero.
fn next_counter(c: &mut [u64], radix: u64) -> bool {
    for digit in c.iter_mut() {
        *digit += 1;
        if *digit < radix {
            return true;
        }
        *digit = 0;
    }
    false
}

/// Folds a batch of relation rows into a row-HNF lattice basis.
fn fold_rows(lattice: ZMat, batch: &mut Vec<Vec<BigInt>>) -> ZMat {
    if batch.is_empty() {
        return lattice;
    }
    let mut rows = lattice.rows_vec();
    rows.append(batch);
    hnf(&ZMat::from_rows(rows))
}

/// Inverse of a unimodular integer matrix.
fn unimodular_inverse(v: &ZMat) -> ZMat {
    let q = QMat::from_int_rows(&v.rows_vec());
    let inv = q.inverse().expect("unimodular matrix");
    let mut out = ZMat::zero(v.rows, v.cols);
    for i in 0..v.rows {
        for j in 0..v.cols {
            let e = inv.at(i, j);
            assert!(e.denom().is_one(), "inverse of a unimodular matrix is integral");
            *out.at_mut(i, j) = e.numer().clone();
        }
    }
    out
}

/// Multiplicative congruence `x = 1 mod* N`: at every prime over a rational
/// prime dividing `N`, the valuation of `x - 1` is at least that of `N`.
pub fn congruent_one_mod_star(
    field: &NumberField,
    x: &FieldElement,
    modulus: &BigInt,
) -> Result<bool> {
    if modulus < &BigInt::from(2) {
        return Err(Error::InvalidInput(format!("modulus {modulus} out of range")));
    }
    let xm1 = field.sub(x, &field.one());
    if xm1.is_zero() {
        return Ok(true);
    }
    for (p, a) in zfactor::factor_integer(modulus)? {
        for pr in prime_decompose(field, &p)? {
            let need = (a as i64) * (pr.e as i64);
            if element_valuation(field, &xm1, &pr) < need {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn gaussian_units_mod_8_have_order_32() {
        let k = NumberField::new(&[1, 0, 1]).unwrap();
        let g = ResidueUnitGroup::compute(&k, &BigInt::from(8)).unwrap();
        assert_eq!(g.order(), BigInt::from(32));
        let prod: BigInt = g.invariant_factors().iter().product();
        assert_eq!(prod, BigInt::from(32));
        for w in g.invariant_factors().windows(2) {
            assert!((&w[1] % &w[0]).is_zero(), "ascending divisibility");
        }
        // i is a unit mod 8 of order 4
        let i = k.element_from_int(&[0, 1]);
        let c = g.coords_of(&k, &i).unwrap();
        let ord = coords_order(&c, g.invariant_factors());
        assert_eq!(ord, BigInt::from(4));
    }

    #[test]
    fn split_prime_gives_two_cyclic_factors() {
        // 5 splits in Q(i): (O/5)^x = F5^x x F5^x
        let k = NumberField::new(&[1, 0, 1]).unwrap();
        let g = ResidueUnitGroup::compute(&k, &BigInt::from(5)).unwrap();
        assert_eq!(g.order(), BigInt::from(16));
        assert_eq!(g.invariant_factors(), &[BigInt::from(4), BigInt::from(4)]);
    }

    #[test]
    fn real_quadratic_split_prime() {
        // 3 splits in Q(sqrt 13): (O/3)^x = C2 x C2
        let k = NumberField::new(&[-13, 0, 1]).unwrap();
        let g = ResidueUnitGroup::compute(&k, &BigInt::from(3)).unwrap();
        assert_eq!(g.order(), BigInt::from(4));
        assert_eq!(g.invariant_factors(), &[BigInt::from(2), BigInt::from(2)]);
    }

    #[test]
    fn generator_coordinates_are_unit_vectors_and_dlog_is_homomorphic() {
        let k = NumberField::new(&[1, 0, 1]).unwrap();
        let g = ResidueUnitGroup::compute(&k, &BigInt::from(8)).unwrap();
        let gens = g.generators(&k);
        assert_eq!(gens.len(), g.invariant_factors().len());
        // homomorphism check on a few pairs
        let a = k.element_from_int(&[3, 2]);
        let b = k.element_from_int(&[1, 4]);
        let ca = g.coords_of(&k, &a).unwrap();
        let cb = g.coords_of(&k, &b).unwrap();
        let cab = g.coords_of(&k, &k.mul(&a, &b)).unwrap();
        for ((x, y), (z, d)) in ca
            .iter()
            .zip(&cb)
            .zip(cab.iter().zip(g.invariant_factors()))
        {
            assert_eq!((x + y).mod_floor(d), z.clone());
        }
    }

    #[test]
    fn coords_handle_coprime_denominators() {
        let k = NumberField::new(&[1, 0, 1]).unwrap();
        let g = ResidueUnitGroup::compute(&k, &BigInt::from(8)).unwrap();
        // 1/3 = 3^{-1} mod 8: coords of 3 plus coords of 1/3 must vanish
        let third = k.from_rational(BigRational::new(BigInt::one(), BigInt::from(3)));
        let three = k.element_from_int(&[3, 0]);
        let c1 = g.coords_of(&k, &third).unwrap();
        let c3 = g.coords_of(&k, &three).unwrap();
        for ((x, y), d) in c1.iter().zip(&c3).zip(g.invariant_factors()) {
            assert!((x + y).mod_floor(d).is_zero());
        }
        // non-coprime denominator is rejected
        let half = k.from_rational(BigRational::new(BigInt::one(), BigInt::from(2)));
        assert!(g.coords_of(&k, &half).is_err());
    }

    #[test]
    fn mod_star_congruence_in_gaussian_field() {
        let k = NumberField::new(&[1, 0, 1]).unwrap();
        let n = BigInt::from(8);
        let nine = k.element_from_int(&[9, 0]);
        assert!(congruent_one_mod_star(&k, &nine, &n).unwrap());
        let one_plus_8i = k.element_from_int(&[1, 8]);
        assert!(congruent_one_mod_star(&k, &one_plus_8i, &n).unwrap());
        // 1 + (2+2i) has valuation 3 < 6 at the ramified prime
        let x = k.element_from_int(&[3, 2]);
        assert!(!congruent_one_mod_star(&k, &x, &n).unwrap());
        // 9/25: the difference -16/25 has valuation 8 >= 6 over 2
        let frac = k.from_rational(BigRational::new(BigInt::from(9), BigInt::from(25)));
        assert!(congruent_one_mod_star(&k, &frac, &n).unwrap());
        assert!(congruent_one_mod_star(&k, &k.one(), &n).unwrap());
    }

    fn coords_order(c: &[BigInt], d: &[BigInt]) -> BigInt {
        // order of an element of prod Z/d_i given by coordinates
        let mut ord = BigInt::one();
        for (x, di) in c.iter().zip(d) {
            if x.is_zero() {
                continue;
            }
            let oi = di / x.gcd(di);
            ord = &ord * &oi / ord.gcd(&oi);
        }
        ord
    }
}
