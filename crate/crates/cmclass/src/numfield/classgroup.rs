//! Class groups by factor-base relations: free relations from rational
//! primes, element relations from smooth norms, Smith normal form for the
//! group structure, and coordinates of arbitrary ideals by randomized
//! smoothing. Principality certificates come from exact sphere enumeration
//! in the T2 form `x -> Tr(x conj(x))`, which is an exact rational Gram
//! matrix on any ideal basis.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::ideal::{prime_decompose, FracIdeal, PrimeIdeal};
use super::{zfactor, FieldElement, NumberField};
use crate::error::{Error, Result};
use crate::linalg::{eval_quadratic_form, hnf, short_vectors, snf_with_transforms, QMat, ZMat};

/// Finite abelian group structure of the ideal class group together with
/// coordinates for every factor-base prime.
#[derive(Clone, Debug)]
pub struct ClassGroup {
    /// invariant factors > 1, each dividing the next
    invariant_factors: Vec<BigInt>,
    fb: Vec<PrimeIdeal>,
    /// coordinates of each factor-base prime in the product of Z/d_i
    fb_coords: Vec<Vec<BigInt>>,
    /// rational primes that were decomposed into the factor base
    rational_primes: Vec<u64>,
    seed: u64,
}

impl ClassGroup {
    /// Class number.
    pub fn order(&self) -> BigInt {
        let mut h = BigInt::one();
        for d in &self.invariant_factors {
            h *= d;
        }
        h
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    pub fn factor_base(&self) -> &[PrimeIdeal] {
        &self.fb
    }

    /// Computes the class group with a factor base covering the Minkowski
    /// bound. Relations come from the short elements of each factor-base
    /// prime (deterministic) plus rounds of random smooth elements until the
    /// quotient stabilizes.
    pub fn compute(field: &NumberField, seed: u64) -> Result<ClassGroup> {
        let bound = minkowski_bound(field).max(6);
        let rational_primes = zfactor::primes_up_to(bound);
        let mut fb: Vec<PrimeIdeal> = Vec::new();
        let mut free_relations: Vec<Vec<BigInt>> = Vec::new();
        let mut spans: Vec<(usize, usize)> = Vec::new(); // fb index range per rational prime
        for &p in &rational_primes {
            let dec = prime_decompose(field, &BigInt::from(p))?;
            let start = fb.len();
            fb.extend(dec);
            spans.push((start, fb.len()));
        }
        let m = fb.len();
        for &(a, b) in &spans {
            let mut v = vec![BigInt::zero(); m];
            for k in a..b {
                v[k] = BigInt::from(fb[k].e);
            }
            free_relations.push(v);
        }
        let mut lattice = fold_relations(ZMat::zero(0, m), free_relations);
        let mut batch: Vec<Vec<BigInt>> = Vec::new();
        let n = field.degree();

        // deterministic pass: the shortest elements of each factor-base
        // prime. By Hermite's bound the first minimum of the T2 form on an
        // ideal of norm N is at most gamma_n (N sqrt|disc|)^(2/n), so a
        // slightly padded sphere is tiny yet guaranteed nonempty, and the
        // norms of its points are within a bounded cofactor of N, hence
        // usually smooth. This in particular covers every factor-base prime
        // that random elements essentially never hit.
        for pr in &fb {
            let basis = pr.ideal.basis_elements(field);
            let g = t2_gram(field, &basis);
            let np = pr.ideal.norm(field).to_f64().unwrap_or(f64::MAX);
            let radius = hermite_t2_radius(field, np, 1.5);
            let b = BigRational::from_integer(BigInt::from(radius.ceil() as i64));
            let vecs = match short_vectors(&g, &b, 100_000) {
                Ok(v) => v,
                Err(Error::BudgetExhausted(_)) => continue,
                Err(e) => return Err(e),
            };
            let mut scored: Vec<(BigRational, Vec<BigInt>)> = vecs
                .into_iter()
                .map(|v| (eval_quadratic_form(&g, &v), v))
                .collect();
            scored.sort();
            for (_, v) in scored.into_iter().take(12) {
                let mut x = field.zero();
                for (c, bs) in v.iter().zip(&basis) {
                    x = field.add(&x, &field.scale(bs, &BigRational::from_integer(c.clone())));
                }
                if let Some(rel) = relation_of_element(field, &x, &fb, &rational_primes) {
                    batch.push(rel);
                }
            }
        }
        lattice = fold_relations(lattice, batch.split_off(0));

        // randomized rounds to confirm stability of the quotient
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x636c61737367726f);
        let mut last: Option<Vec<BigInt>> = None;
        let mut stable = 0usize;
        for round in 0..60usize {
            let want = (m / 2).max(8);
            let mut got = 0usize;
            let coeff_bound = 2 + (round as i64) / 6;
            let mut tries = 0usize;
            while got < want && tries < 8_000 {
                tries += 1;
                let coords: Vec<BigInt> = (0..n)
                    .map(|_| BigInt::from(rng.gen_range(-coeff_bound..=coeff_bound)))
                    .collect();
                if coords.iter().all(|c| c.is_zero()) {
                    continue;
                }
                let x = field.order().from_order_coords_int(&coords);
                if let Some(rel) = relation_of_element(field, &x, &fb, &rational_primes) {
                    batch.push(rel);
                    got += 1;
                }
            }
            lattice = fold_relations(lattice, batch.split_off(0));
            match group_from_lattice(&lattice, m) {
                Some((inv, coords)) => {
                    if last.as_ref() == Some(&inv) {
                        stable += 1;
                    } else {
                        stable = 0;
                        last = Some(inv.clone());
                    }
                    if stable >= 3 {
                        return Ok(ClassGroup {
                            invariant_factors: inv,
                            fb,
                            fb_coords: coords,
                            rational_primes,
                            seed,
                        });
                    }
                }
                None => {
                    stable = 0;
                    last = None;
                }
            }
        }
        Err(Error::ClassGroupInconclusive(
            "relation matrix did not stabilize within the round budget".into(),
        ))
    }

    /// Coordinates of an ideal class in the product of Z/d_i, by randomized
    /// smoothing against the factor base.
    pub fn coords_of(&self, field: &NumberField, ideal: &FracIdeal) -> Result<Vec<BigInt>> {
        // reduce to the integral numerator: den*O is principal
        let num_ideal = FracIdeal::from_generators(
            field,
            &ideal
                .basis_elements(field)
                .iter()
                .map(|b| field.scale(b, &BigRational::from_integer(ideal.den().clone())))
                .collect::<Vec<_>>(),
        )?;
        if let Some(v) = self.try_direct_coords(field, &num_ideal) {
            return Ok(self.reduce_coords(&v));
        }
        // smoothing: a short vector x of the ideal lattice has
        // |N(x)| / N(ideal) bounded by a fixed multiple of sqrt|disc|, so it
        // is usually factor-base smooth; if none of the short vectors works,
        // shift the class by random factor-base primes and retry
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x736d6f6f7468);
        for round in 0..200usize {
            let (cur, shift) = if round == 0 {
                (num_ideal.clone(), vec![BigInt::zero(); self.width()])
            } else {
                let mut cur = num_ideal.clone();
                let mut shift = vec![BigInt::zero(); self.width()];
                for _ in 0..=(round / 20).min(2) {
                    let k = rng.gen_range(0..self.fb.len());
                    cur = cur.mul(field, &self.fb[k].ideal);
                    for (s, c) in shift.iter_mut().zip(&self.fb_coords[k]) {
                        *s += c;
                    }
                }
                (cur, shift)
            };
            let Some(x) = smooth_element_of_ideal(field, &cur, &self.rational_primes) else {
                continue;
            };
            // (x) = cur * c with c integral and smooth
            let c = FracIdeal::principal(field, &x)?.mul(field, &cur.inverse(field));
            debug_assert!(c.is_integral());
            if let Some(v) = self.try_direct_coords(field, &c) {
                // [num_ideal] = -[c] - [shift]
                let out: Vec<BigInt> =
                    v.iter().zip(&shift).map(|(a, s)| -a - s).collect();
                return Ok(self.reduce_coords(&out));
            }
        }
        Err(Error::ClassGroupInconclusive(
            "failed to smooth the ideal against the factor base".into(),
        ))
    }

    /// Factors an integral ideal directly over the factor base when its norm
    /// is smooth; returns raw factor-base exponent coordinates mapped to the
    /// quotient.
    fn try_direct_coords(&self, field: &NumberField, ideal: &FracIdeal) -> Option<Vec<BigInt>> {
        let nrm = ideal.norm(field);
        debug_assert!(nrm.denom().is_one());
        let fac = zfactor::smooth_factor(nrm.numer(), &self.rational_primes)?;
        let mut acc = vec![BigInt::zero(); self.width()];
        for (p, _) in fac {
            let pb = BigInt::from(p);
            for (k, pr) in self.fb.iter().enumerate() {
                if pr.p != pb {
                    continue;
                }
                let v = ideal.valuation(field, pr);
                if v != 0 {
                    for (a, c) in acc.iter_mut().zip(&self.fb_coords[k]) {
                        *a += BigInt::from(v) * c;
                    }
                }
            }
        }
        Some(acc)
    }

    fn width(&self) -> usize {
        self.invariant_factors.len()
    }

    fn reduce_coords(&self, v: &[BigInt]) -> Vec<BigInt> {
        v.iter()
            .zip(&self.invariant_factors)
            .map(|(a, d)| a.mod_floor(d))
            .collect()
    }

    pub fn is_principal_class(&self, coords: &[BigInt]) -> bool {
        coords.iter().all(|c| c.is_zero())
    }

    /// Adds two coordinate vectors.
    pub fn add_coords(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let sum: Vec<BigInt> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        self.reduce_coords(&sum)
    }

    /// One integral representative per ideal class, all coprime to `m`,
    /// found by breadth-first products of factor-base primes away from `m`.
    pub fn representatives_coprime_to(
        &self,
        field: &NumberField,
        m: &BigInt,
    ) -> Result<Vec<(Vec<BigInt>, FracIdeal)>> {
        let h = self.order();
        let h_usize = h.to_usize().ok_or_else(|| {
            Error::ClassGroupInconclusive("class number exceeds usize".into())
        })?;
        let allowed: Vec<usize> = (0..self.fb.len())
            .filter(|&k| !(m % &self.fb[k].p).is_zero())
            .collect();
        let mut found: Vec<(Vec<BigInt>, FracIdeal)> =
            vec![(vec![BigInt::zero(); self.width()], FracIdeal::whole(field))];
        let mut seen: Vec<Vec<BigInt>> = vec![found[0].0.clone()];
        let mut frontier = found.clone();
        while found.len() < h_usize {
            if frontier.is_empty() {
                return Err(Error::ClassGroupInconclusive(
                    "factor-base primes away from the modulus do not generate the class group"
                        .into(),
                ));
            }
            let mut next = Vec::new();
            for (coords, rep) in &frontier {
                for &k in &allowed {
                    let c2 = self.add_coords(coords, &self.fb_coords[k]);
                    if seen.contains(&c2) {
                        continue;
                    }
                    let rep2 = rep.mul(field, &self.fb[k].ideal);
                    seen.push(c2.clone());
                    found.push((c2.clone(), rep2.clone()));
                    next.push((c2, rep2));
                    if found.len() == h_usize {
                        break;
                    }
                }
            }
            frontier = next;
        }
        found.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(found)
    }
}

/// Hermite-bound radius for the T2 form on an ideal of norm `np`: the first
/// minimum is at most gamma_n (np sqrt|disc|)^(2/n), and `mult` pads the
/// sphere beyond it.
fn hermite_t2_radius(field: &NumberField, np: f64, mult: f64) -> f64 {
    let n = field.degree();
    let gamma = match n {
        1 => 1.0,
        2 => 2.0 / 3f64.sqrt(),
        3 => 1.26,
        _ => std::f64::consts::SQRT_2,
    };
    let disc_sqrt = field.disc().abs().to_f64().unwrap_or(f64::MAX).sqrt();
    mult * gamma * (np * disc_sqrt).powf(2.0 / n as f64)
}

/// Shortest element of the ideal (in T2 length) whose norm ratio over the
/// ideal norm is smooth over `primes`. By the arithmetic-geometric mean
/// inequality such a ratio is bounded by a fixed multiple of sqrt|disc|, so
/// short vectors are good smoothness candidates.
fn smooth_element_of_ideal(
    field: &NumberField,
    ideal: &FracIdeal,
    primes: &[u64],
) -> Option<FieldElement> {
    let basis = ideal.basis_elements(field);
    let g = t2_gram(field, &basis);
    let nrm = ideal.norm(field);
    let np = nrm.to_f64().unwrap_or(f64::MAX);
    for mult in [1.2, 2.0, 3.5] {
        let radius = hermite_t2_radius(field, np, mult);
        let b = BigRational::from_integer(BigInt::from(radius.ceil() as i64));
        let Ok(vecs) = short_vectors(&g, &b, 400_000) else { continue };
        let mut scored: Vec<(BigRational, Vec<BigInt>)> = vecs
            .into_iter()
            .map(|v| (eval_quadratic_form(&g, &v), v))
            .collect();
        scored.sort();
        for (_, v) in scored.into_iter().take(64) {
            let mut x = field.zero();
            for (c, bs) in v.iter().zip(&basis) {
                x = field.add(&x, &field.scale(bs, &BigRational::from_integer(c.clone())));
            }
            let ratio = (field.norm(&x) / &nrm).abs();
            debug_assert!(ratio.denom().is_one());
            if zfactor::smooth_factor(ratio.numer(), primes).is_some() {
                return Some(x);
            }
        }
    }
    None
}

/// Relation vector of an element whose norm is factor-base smooth.
fn relation_of_element(
    field: &NumberField,
    x: &FieldElement,
    fb: &[PrimeIdeal],
    rational_primes: &[u64],
) -> Option<Vec<BigInt>> {
    let nrm = field.norm(x);
    if nrm.is_zero() {
        return None;
    }
    debug_assert!(nrm.denom().is_one());
    let fac = zfactor::smooth_factor(nrm.numer(), rational_primes)?;
    let px = FracIdeal::principal(field, x).ok()?;
    let mut v = vec![BigInt::zero(); fb.len()];
    let mut check = BigInt::one();
    for (p, _) in &fac {
        let pb = BigInt::from(*p);
        for (k, pr) in fb.iter().enumerate() {
            if pr.p != pb {
                continue;
            }
            let val = px.valuation(field, pr);
            if val > 0 {
                v[k] = BigInt::from(val);
                check *= pb.pow(pr.f as u32).pow(val as u32);
            }
        }
    }
    // all of the norm must be accounted for by factor-base primes
    if check != nrm.numer().abs() {
        return None;
    }
    Some(v)
}

/// Folds new relation rows into a row-HNF basis of the relation lattice.
fn fold_relations(lattice: ZMat, batch: Vec<Vec<BigInt>>) -> ZMat {
    if batch.is_empty() {
        return lattice;
    }
    let mut rows = lattice.rows_vec();
    rows.extend(batch);
    hnf(&ZMat::from_rows(rows))
}

/// Smith normal form of the relation lattice: invariant factors (all > 1)
/// and the coordinates of each basis prime, or None when the quotient is
/// still infinite.
fn group_from_lattice(lattice: &ZMat, m: usize) -> Option<(Vec<BigInt>, Vec<Vec<BigInt>>)> {
    if lattice.rows < m {
        return None;
    }
    let (d, _, v) = snf_with_transforms(lattice);
    if d.len() < m || d.iter().any(|x| x.is_zero()) {
        return None;
    }
    let keep: Vec<usize> = (0..m).filter(|&j| !d[j].is_one()).collect();
    let inv: Vec<BigInt> = keep.iter().map(|&j| d[j].abs()).collect();
    let coords: Vec<Vec<BigInt>> = (0..m)
        .map(|i| {
            keep.iter()
                .map(|&j| v.at(i, j).mod_floor(&d[j].abs()))
                .collect()
        })
        .collect();
    Some((inv, coords))
}

/// Minkowski bound rounded up, as a sieve limit.
fn minkowski_bound(field: &NumberField) -> u64 {
    let n = field.degree() as f64;
    let r2 = match field.shape() {
        super::FieldShape::Quadratic { .. } => {
            if field.is_totally_real() {
                0.0
            } else {
                1.0
            }
        }
        super::FieldShape::CmQuartic { .. } => 2.0,
    };
    let fact: f64 = (1..=field.degree()).product::<usize>() as f64;
    let nn = n.powf(n);
    let d = field.disc().abs().to_f64().unwrap_or(f64::MAX);
    let mb = (fact / nn) * (4.0 / std::f64::consts::PI).powf(r2) * d.sqrt();
    mb.ceil() as u64 + 1
}

/// Exact T2 Gram matrix `Tr(b_i conj(b_j))` on the given elements.
pub fn t2_gram(field: &NumberField, basis: &[FieldElement]) -> QMat {
    let n = basis.len();
    let mut g = QMat::zero(n, n);
    for i in 0..n {
        let bi = field.conjugate(&basis[i]);
        for j in 0..=i {
            let t = field.trace(&field.mul(&basis[j], &bi));
            *g.at_mut(i, j) = t.clone();
            *g.at_mut(j, i) = t;
        }
    }
    g
}

/// All elements of the ideal with T2 exactly `t2`, up to sign.
pub fn elements_with_exact_t2(
    field: &NumberField,
    ideal: &FracIdeal,
    t2: &BigRational,
) -> Result<Vec<FieldElement>> {
    let basis = ideal.basis_elements(field);
    let g = t2_gram(field, &basis);
    let hits = short_vectors(&g, t2, 4_000_000)?;
    let mut out = Vec::new();
    for v in hits {
        if &eval_quadratic_form(&g, &v) != t2 {
            continue;
        }
        let mut x = field.zero();
        for (c, b) in v.iter().zip(&basis) {
            x = field.add(&x, &field.scale(b, &BigRational::from_integer(c.clone())));
        }
        out.push(x);
    }
    Ok(out)
}

/// Torsion units: all roots of unity in the maximal order. These are exactly
/// the integral elements with T2 = n (both signs included).
pub fn torsion_units(field: &NumberField) -> Result<Vec<FieldElement>> {
    let n = BigRational::from_integer(BigInt::from(field.degree() as i64));
    let ups = elements_with_exact_t2(field, &FracIdeal::whole(field), &n)?;
    let mut out = Vec::new();
    for u in ups {
        out.push(field.neg(&u));
        out.push(u);
    }
    Ok(out)
}

/// Searches for a generator: enumerates T2 spheres of growing radius and
/// returns an element of the ideal with |norm| equal to the ideal norm.
/// `Ok(None)` means no generator was found within the budget (no proof of
/// non-principality; use class coordinates for that).
pub fn is_principal_with_generator(
    field: &NumberField,
    ideal: &FracIdeal,
) -> Result<Option<FieldElement>> {
    let n = field.degree() as u32;
    let basis = ideal.basis_elements(field);
    let g = t2_gram(field, &basis);
    let nrm = ideal.norm(field);
    // AM-GM floor: T2(x) >= n |N(x)|^(2/n) for any x
    let target = nrm.abs();
    let floor_f64 = (field.degree() as f64)
        * target
            .to_f64()
            .unwrap_or(f64::MAX)
            .powf(2.0 / f64::from(n));
    let mut bound = BigRational::from_integer(BigInt::from(floor_f64.ceil().max(2.0) as i64));
    for _ in 0..12 {
        let hits = match short_vectors(&g, &bound, 4_000_000) {
            Ok(h) => h,
            Err(Error::BudgetExhausted(_)) => break,
            Err(e) => return Err(e),
        };
        for v in hits {
            let mut x = field.zero();
            for (c, b) in v.iter().zip(&basis) {
                x = field.add(&x, &field.scale(b, &BigRational::from_integer(c.clone())));
            }
            if field.norm(&x).abs() == target {
                return Ok(Some(x));
            }
        }
        bound = bound * BigRational::from_integer(BigInt::from(2));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn imaginary_quadratic_class_numbers() {
        // classical values: h(-15) = 2, h(-20) = 2, h(-23) = 3, h(-4) = 1
        for (coeffs, h) in [
            (vec![4i64, -1, 1], 2i64),  // disc -15
            (vec![5, 0, 1], 2),         // disc -20
            (vec![6, -1, 1], 3),        // disc -23
            (vec![1, 0, 1], 1),         // disc -4
            (vec![1, -1, 1], 1),        // disc -3
        ] {
            let k = NumberField::new(&coeffs).unwrap();
            let cg = ClassGroup::compute(&k, 7).unwrap();
            assert_eq!(cg.order(), BigInt::from(h), "disc {}", k.disc());
        }
    }

    #[test]
    fn real_quadratic_13_is_principal() {
        let k = NumberField::new(&[-13, 0, 1]).unwrap();
        let cg = ClassGroup::compute(&k, 3).unwrap();
        assert_eq!(cg.order(), BigInt::one());
    }

    #[test]
    fn coords_and_representatives_in_h3_field() {
        let k = NumberField::new(&[6, -1, 1]).unwrap(); // disc -23, h = 3
        let cg = ClassGroup::compute(&k, 11).unwrap();
        assert_eq!(cg.invariant_factors(), &[BigInt::from(3)]);
        // principal ideals land at zero
        let x = k.element_from_int(&[5, 3]);
        let px = FracIdeal::principal(&k, &x).unwrap();
        assert!(cg.is_principal_class(&cg.coords_of(&k, &px).unwrap()));
        // a prime over 2 is not principal (norm 2 has no element of that norm)
        let p2 = &prime_decompose(&k, &BigInt::from(2)).unwrap()[0];
        assert_eq!(p2.f, 1);
        let c = cg.coords_of(&k, &p2.ideal).unwrap();
        assert!(!cg.is_principal_class(&c));
        // representatives coprime to 8 cover all three classes
        let reps = cg.representatives_coprime_to(&k, &BigInt::from(8)).unwrap();
        assert_eq!(reps.len(), 3);
        for (coords, rep) in &reps {
            assert!(rep.is_coprime_to_integer(&k, &BigInt::from(8)));
            assert_eq!(&cg.coords_of(&k, rep).unwrap(), coords);
        }
    }

    #[test]
    fn torsion_units_of_gaussian_and_generic_cm() {
        let gauss = NumberField::new(&[1, 0, 1]).unwrap();
        let mut tu = torsion_units(&gauss).unwrap();
        tu.sort_by(|a, b| format!("{:?}", a).cmp(&format!("{:?}", b)));
        tu.dedup();
        assert_eq!(tu.len(), 4); // 1, -1, i, -i
        let k = NumberField::new(&[52, 0, 27, 0, 1]).unwrap();
        let mut tk = torsion_units(&k).unwrap();
        tk.sort_by(|a, b| format!("{:?}", a).cmp(&format!("{:?}", b)));
        tk.dedup();
        assert_eq!(tk.len(), 2); // only +-1
    }

    #[test]
    fn principal_generator_recovered() {
        let k = NumberField::new(&[52, 0, 27, 0, 1]).unwrap();
        let x = k.element_from_int(&[1, 1, 0, 0]);
        let i = FracIdeal::principal(&k, &x).unwrap();
        let g = is_principal_with_generator(&k, &i).unwrap().unwrap();
        // generator agrees up to a unit; for this field units are +-1 times
        // powers of the fundamental unit of the real subfield, but a found
        // generator must at least generate the same ideal
        assert_eq!(FracIdeal::principal(&k, &g).unwrap(), i);
    }

    #[test]
    fn exact_t2_sphere_finds_mu_style_elements2() {
        // in Z[i], elements with T2 = 2*5 and norm 5: the Gaussian primes
        let k = NumberField::new(&[1, 0, 1]).unwrap();
        let sphere = elements_with_exact_t2(
            &k,
            &FracIdeal::whole(&k),
            &BigRational::from_integer(BigInt::from(10)),
        )
        .unwrap();
        let with_norm5: Vec<_> = sphere
            .iter()
            .filter(|x| k.norm(x) == BigRational::from_integer(BigInt::from(5)))
            .collect();
        // up to sign: 2+i, 2-i, 1+2i, 1-2i
        assert_eq!(with_norm5.len(), 4);
    }
}
