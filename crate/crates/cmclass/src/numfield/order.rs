//! Maximal orders by the Pohst-Zassenhaus round-2 method: at every prime
//! whose square divides the polynomial discriminant, enlarge the order by
//! the ring of multipliers of its p-radical until stable. The result carries
//! an integer multiplication table, so all later ideal arithmetic is exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::algebra::AlgebraModP;
use super::zfactor;
use super::FieldElement;
use crate::error::{Error, Result};
use crate::linalg::modp::{self, kernel_mod_p};
use crate::linalg::{hnf, QMat, ZMat};
use crate::polyring::QPoly;

/// Maximal order with a Z-basis in power-basis coordinates (rows of `basis`)
/// and the multiplication table on that basis.
#[derive(Clone, Debug)]
pub struct MaximalOrder {
    n: usize,
    basis: QMat,
    /// inverse transpose of `basis`: order coords of x are `bti * coords(x)`
    bti: QMat,
    /// mult[i][j] = order coordinates of basis_i * basis_j
    mult: Vec<Vec<Vec<BigInt>>>,
    one: Vec<BigInt>,
    index: BigInt,
    disc: BigInt,
}

impl MaximalOrder {
    pub fn degree(&self) -> usize {
        self.n
    }

    /// Rows are the basis elements in power-basis coordinates.
    pub fn basis(&self) -> &QMat {
        &self.basis
    }

    pub fn basis_element(&self, i: usize) -> FieldElement {
        FieldElement { coords: self.basis.row(i).to_vec() }
    }

    /// Order coordinates of the ring identity.
    pub fn one_coords(&self) -> &[BigInt] {
        &self.one
    }

    /// Index [O : Z[t]].
    pub fn index(&self) -> &BigInt {
        &self.index
    }

    /// Field discriminant.
    pub fn disc(&self) -> &BigInt {
        &self.disc
    }

    pub fn mult_table(&self) -> &Vec<Vec<Vec<BigInt>>> {
        &self.mult
    }

    pub fn to_order_coords(&self, x: &FieldElement) -> Vec<BigRational> {
        self.bti.mul_vec(x.coords())
    }

    pub fn integral_coords(&self, x: &FieldElement) -> Option<Vec<BigInt>> {
        let c = self.to_order_coords(x);
        if c.iter().all(|v| v.denom().is_one()) {
            Some(c.into_iter().map(|v| v.numer().clone()).collect())
        } else {
            None
        }
    }

    pub fn is_integral(&self, x: &FieldElement) -> bool {
        self.integral_coords(x).is_some()
    }

    /// Smallest d > 0 with d*x in the order.
    pub fn denominator_of(&self, x: &FieldElement) -> BigInt {
        let c = self.to_order_coords(x);
        let mut l = BigInt::one();
        for v in &c {
            l = num_integer::lcm(l, v.denom().clone());
        }
        l
    }

    pub fn from_order_coords(&self, c: &[BigRational]) -> FieldElement {
        assert_eq!(c.len(), self.n);
        FieldElement { coords: self.basis.transpose().mul_vec(c) }
    }

    pub fn from_order_coords_int(&self, c: &[BigInt]) -> FieldElement {
        let cr: Vec<BigRational> =
            c.iter().map(|v| BigRational::from_integer(v.clone())).collect();
        self.from_order_coords(&cr)
    }

    /// Product in order coordinates via the multiplication table.
    pub fn mult_int(&self, u: &[BigInt], v: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.n];
        for (i, ui) in u.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            for (j, vj) in v.iter().enumerate() {
                if vj.is_zero() {
                    continue;
                }
                let c = ui * vj;
                for (o, m) in out.iter_mut().zip(&self.mult[i][j]) {
                    *o += &c * m;
                }
            }
        }
        out
    }

    /// O/pO as an F_p-algebra on the order basis.
    pub(crate) fn algebra_mod_p(&self, p: u64) -> AlgebraModP {
        let reduce = |v: &[BigInt]| -> Vec<u64> {
            v.iter().map(|x| modp::bigint_mod(x, p)).collect()
        };
        let mult = self
            .mult
            .iter()
            .map(|row| row.iter().map(|v| reduce(v)).collect())
            .collect();
        AlgebraModP { n: self.n, p, mult, one: reduce(&self.one) }
    }
}

/// Multiplication table of an order given by basis rows (power coords);
/// errors if the lattice is not closed under multiplication.
fn mult_table(poly: &QPoly, basis: &QMat, bti: &QMat) -> Result<Vec<Vec<Vec<BigInt>>>> {
    let n = poly.degree();
    let mut table = vec![vec![vec![]; n]; n];
    for i in 0..n {
        let bi = QPoly::new(basis.row(i).to_vec());
        for j in 0..=i {
            let bj = QPoly::new(basis.row(j).to_vec());
            let prod = bi.mul(&bj).rem(poly);
            let mut power = vec![BigRational::zero(); n];
            for k in 0..prod.coeffs().len() {
                power[k] = prod.coeff(k);
            }
            let coords = bti.mul_vec(&power);
            let mut int_coords = Vec::with_capacity(n);
            for c in &coords {
                if !c.denom().is_one() {
                    return Err(Error::IdealArithmetic(
                        "lattice is not closed under multiplication".into(),
                    ));
                }
                int_coords.push(c.numer().clone());
            }
            table[i][j] = int_coords.clone();
            table[j][i] = int_coords;
        }
    }
    Ok(table)
}

/// One round-2 enlargement at p. Returns the new basis (rows, power coords)
/// and whether it strictly grew.
fn round2_step(poly: &QPoly, basis: &QMat, p: u64) -> Result<(QMat, bool)> {
    let n = poly.degree();
    let bti = basis
        .transpose()
        .inverse()
        .expect("order basis is invertible");
    let table = mult_table(poly, basis, &bti)?;
    let one_coords: Vec<BigInt> = {
        let mut e0 = vec![BigRational::zero(); n];
        e0[0] = BigRational::one();
        bti.mul_vec(&e0)
            .into_iter()
            .map(|c| {
                debug_assert!(c.denom().is_one());
                c.numer().clone()
            })
            .collect()
    };
    let reduce = |v: &[BigInt]| -> Vec<u64> { v.iter().map(|x| modp::bigint_mod(x, p)).collect() };
    let algebra = AlgebraModP {
        n,
        p,
        mult: table
            .iter()
            .map(|row| row.iter().map(|v| reduce(v)).collect())
            .collect(),
        one: reduce(&one_coords),
    };
    // radical lattice in order coordinates
    let mut rad_rows: Vec<Vec<BigInt>> = algebra
        .radical_basis()
        .into_iter()
        .map(|v| v.into_iter().map(BigInt::from).collect())
        .collect();
    for i in 0..n {
        let mut r = vec![BigInt::zero(); n];
        r[i] = BigInt::from(p);
        rad_rows.push(r);
    }
    let u = hnf(&ZMat::from_rows(rad_rows));
    assert_eq!(u.rows, n, "radical lattice contains pO, hence full rank");
    let uq = QMat::from_int_rows(&u.rows_vec());
    let uti = uq.transpose().inverse().expect("full-rank radical lattice");
    // multiplier ring: u in O/pO with u * gamma_j in p * radical for all j
    let mut cond: Vec<Vec<u64>> = Vec::with_capacity(n * n);
    let mut cond_rows: Vec<Vec<Vec<u64>>> = vec![vec![]; n];
    for (i, row) in cond_rows.iter_mut().enumerate() {
        // gamma-coordinates of e_i * gamma_j for each j
        let mut per_j = Vec::with_capacity(n);
        for j in 0..n {
            let mut w = vec![BigInt::zero(); n];
            for k in 0..n {
                let c = u.at(j, k);
                if c.is_zero() {
                    continue;
                }
                for (wl, t) in w.iter_mut().zip(&table[i][k]) {
                    *wl += c * t;
                }
            }
            let wr: Vec<BigRational> =
                w.iter().map(|x| BigRational::from_integer(x.clone())).collect();
            let gcoords = uti.mul_vec(&wr);
            let gint: Vec<u64> = gcoords
                .iter()
                .map(|c| {
                    assert!(c.denom().is_one(), "radical is an ideal of the order");
                    modp::bigint_mod(c.numer(), p)
                })
                .collect();
            per_j.push(gint);
        }
        *row = per_j;
    }
    for j in 0..n {
        for l in 0..n {
            let mut crow = Vec::with_capacity(n);
            for irow in cond_rows.iter() {
                crow.push(irow[j][l]);
            }
            cond.push(crow);
        }
    }
    let ker = kernel_mod_p(&cond, p);
    let mut new_rows: Vec<Vec<BigInt>> = ker
        .into_iter()
        .map(|v| v.into_iter().map(BigInt::from).collect())
        .collect();
    for i in 0..n {
        let mut r = vec![BigInt::zero(); n];
        r[i] = BigInt::from(p);
        new_rows.push(r);
    }
    let h = hnf(&ZMat::from_rows(new_rows));
    assert_eq!(h.rows, n);
    let mut det = BigInt::one();
    for i in 0..n {
        det *= h.at(i, i);
    }
    let grew = det != BigInt::from(p).pow(n as u32);
    if !grew {
        return Ok((basis.clone(), false));
    }
    // new basis rows: (h / p) in old order coordinates, mapped to power coords
    let hq = QMat::from_int_rows(&h.rows_vec())
        .scale(&BigRational::new(BigInt::one(), BigInt::from(p)));
    Ok((hq.mul(basis), true))
}

/// Maximal order of the field defined by a monic integral irreducible poly.
pub(crate) fn maximal_order(poly: &QPoly) -> Result<MaximalOrder> {
    let n = poly.degree();
    let disc = poly.discriminant();
    assert!(disc.denom().is_one(), "monic integral polynomial has integer discriminant");
    let disc_z = disc.numer().clone();
    if disc_z.is_zero() {
        return Err(Error::InvalidInput("defining polynomial is not squarefree".into()));
    }
    let mut basis = QMat::identity(n);
    for (p, e) in zfactor::factor_integer(&disc_z)? {
        if e < 2 {
            continue;
        }
        let p64 = p.to_u64().ok_or_else(|| {
            Error::InvalidInput(format!("index prime {p} exceeds the supported range"))
        })?;
        loop {
            let (next, grew) = round2_step(poly, &basis, p64)?;
            basis = next;
            if !grew {
                break;
            }
        }
    }
    let det = basis.det();
    let index_rat = det.recip().abs();
    assert!(index_rat.denom().is_one(), "order index is an integer");
    let index = index_rat.numer().clone();
    let disc_field = &disc_z / (&index * &index);
    assert_eq!(&disc_field * &index * &index, disc_z, "index^2 divides disc");
    let bti = basis.transpose().inverse().expect("order basis invertible");
    let mult = mult_table(poly, &basis, &bti)?;
    let one = {
        let mut e0 = vec![BigRational::zero(); n];
        e0[0] = BigRational::one();
        bti.mul_vec(&e0)
            .into_iter()
            .map(|c| {
                assert!(c.denom().is_one(), "1 lies in every order");
                c.numer().clone()
            })
            .collect()
    };
    Ok(MaximalOrder { n, basis, bti, mult, one, index, disc: disc_field })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order_of(coeffs: &[i64]) -> MaximalOrder {
        let poly = QPoly::from_int_coeffs(coeffs);
        maximal_order(&poly).unwrap()
    }

    #[test]
    fn quadratic_orders_match_classical_discriminants() {
        // Q(sqrt(13)): disc 13, basis includes (1+sqrt(13))/2
        let o = order_of(&[-13, 0, 1]);
        assert_eq!(*o.disc(), BigInt::from(13));
        assert_eq!(*o.index(), BigInt::from(2));
        // Q(sqrt(-1)): Z[i] already maximal, disc -4
        let g = order_of(&[1, 0, 1]);
        assert_eq!(*g.disc(), BigInt::from(-4));
        assert_eq!(*g.index(), BigInt::from(1));
        // Q(sqrt(-15)) via X^2 - X + 4: disc -15
        let h = order_of(&[4, -1, 1]);
        assert_eq!(*h.disc(), BigInt::from(-15));
        // Q(sqrt(-15)) via X^2 + 15: index 2, same field disc
        let h2 = order_of(&[15, 0, 1]);
        assert_eq!(*h2.disc(), BigInt::from(-15));
        assert_eq!(*h2.index(), BigInt::from(2));
    }

    #[test]
    fn reflex_fixture_field_has_index_two_power() {
        // X^4 + 54X^2 + 521: poly disc 2^16 * 13^2 * 521
        let o = order_of(&[521, 0, 54, 0, 1]);
        let poly_disc = BigInt::from(2).pow(16) * BigInt::from(13 * 13) * BigInt::from(521);
        let ii = o.index() * o.index();
        assert_eq!(o.disc() * &ii, poly_disc);
        // (1 + t)/2 has minimal polynomial X^4 - 2X^3 + 15X^2 - 14X + 36,
        // hence is integral: 2 divides the index
        assert!((o.index() % BigInt::from(2)).is_zero());
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let x = FieldElement {
            coords: vec![half.clone(), half, BigRational::zero(), BigRational::zero()],
        };
        assert!(o.is_integral(&x));
    }

    #[test]
    fn mult_table_consistency() {
        let poly = QPoly::from_int_coeffs(&[521, 0, 54, 0, 1]);
        let o = maximal_order(&poly).unwrap();
        // table agrees with polynomial multiplication for random pairs
        for i in 0..4 {
            for j in 0..4 {
                let mut u = vec![BigInt::zero(); 4];
                u[i] = BigInt::from(3);
                let mut v = vec![BigInt::zero(); 4];
                v[j] = BigInt::from(-2);
                let prod = o.mult_int(&u, &v);
                let el = o.from_order_coords_int(&prod);
                let bi = QPoly::new(o.basis().row(i).to_vec());
                let bj = QPoly::new(o.basis().row(j).to_vec());
                let direct = bi
                    .mul(&bj)
                    .rem(&poly)
                    .scale(&BigRational::from_integer(BigInt::from(-6)));
                let mut dc = vec![BigRational::zero(); 4];
                for k in 0..direct.coeffs().len() {
                    dc[k] = direct.coeff(k);
                }
                assert_eq!(el.coords(), &dc[..]);
            }
        }
    }

    #[test]
    fn fixture_cm_field_order() {
        // X^4 + 27X^2 + 52: disc 2^6 * 13 * 521^2
        let o = order_of(&[52, 0, 27, 0, 1]);
        let poly_disc = BigInt::from(2).pow(6) * BigInt::from(13) * BigInt::from(521 * 521);
        assert_eq!(o.disc() * o.index() * o.index(), poly_disc);
    }
}
