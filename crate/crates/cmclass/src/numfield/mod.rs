//! Number fields of the two shapes the CM machinery needs: quadratic fields
//! `X^2 + aX + b` and totally imaginary quartic fields `X^4 + AX^2 + B`
//! (A, B > 0, A^2 - 4B > 0 and not a square) over a real quadratic subfield.
//!
//! Elements are rational coordinate vectors on the power basis of the
//! defining root. The maximal order (Pohst-Zassenhaus round 2), fractional
//! ideals in Hermite form, prime decomposition, class groups, and residue
//! unit groups live in the submodules.

mod algebra;
pub mod classgroup;
pub mod ideal;
pub mod order;
pub mod residue;
pub mod zfactor;

pub use classgroup::ClassGroup;
pub use ideal::{FracIdeal, PrimeIdeal};
pub use order::MaximalOrder;
pub use residue::ResidueUnitGroup;

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{Complex, Real};
use crate::error::{Error, Result};
use crate::linalg::QMat;
use crate::polyring::QPoly;

/// Supported defining-polynomial shapes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldShape {
    /// `X^2 + a X + b`, real or imaginary according to the sign of a^2 - 4b.
    Quadratic { a: BigInt, b: BigInt },
    /// `X^4 + A X^2 + B` with A, B > 0 and A^2 - 4B > 0: totally imaginary
    /// quartic over the real quadratic field Q(sqrt(A^2 - 4B)).
    CmQuartic { a: BigInt, b: BigInt },
}

/// Galois group of the quartic shape over Q.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuarticGaloisType {
    Cyclic,
    Biquadratic,
    Dihedral,
}

/// Element as rational coordinates on the power basis `1, t, ..., t^(n-1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    coords: Vec<BigRational>,
}

impl FieldElement {
    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> BigRational {
        self.coords.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.coords.iter().skip(1).all(|c| c.is_zero())
    }
}

/// A number field with its maximal order.
#[derive(Clone, Debug)]
pub struct NumberField {
    poly: QPoly,
    shape: FieldShape,
    order: MaximalOrder,
}

impl NumberField {
    /// Builds the field from little-endian integer coefficients of a monic
    /// defining polynomial, checking irreducibility and the supported shape,
    /// and computes the maximal order.
    pub fn new(coeffs: &[i64]) -> Result<NumberField> {
        let big: Vec<BigInt> = coeffs.iter().map(|&c| BigInt::from(c)).collect();
        Self::from_integer_coeffs(&big)
    }

    pub fn from_integer_coeffs(coeffs: &[BigInt]) -> Result<NumberField> {
        let poly = QPoly::from_bigint_coeffs(coeffs);
        if poly.is_zero() || !poly.is_monic() {
            return Err(Error::InvalidInput("defining polynomial must be monic".into()));
        }
        let n = poly.degree();
        let shape = match n {
            2 => FieldShape::Quadratic {
                a: poly.coeff(1).numer().clone(),
                b: poly.coeff(0).numer().clone(),
            },
            4 => {
                if !poly.coeff(1).is_zero() || !poly.coeff(3).is_zero() {
                    return Err(Error::NotCmField(
                        "quartic defining polynomial must have the form X^4 + A X^2 + B".into(),
                    ));
                }
                let a = poly.coeff(2).numer().clone();
                let b = poly.coeff(0).numer().clone();
                let d = &a * &a - BigInt::from(4) * &b;
                if !a.is_positive() || !b.is_positive() || !d.is_positive() {
                    return Err(Error::NotCmField(
                        "need A > 0, B > 0 and A^2 - 4B > 0 for a totally imaginary quartic"
                            .into(),
                    ));
                }
                FieldShape::CmQuartic { a, b }
            }
            d => return Err(Error::UnsupportedDegree(d)),
        };
        if !poly.is_irreducible()? {
            return Err(Error::ReduciblePolynomial { factor: format!("{poly}") });
        }
        let order = order::maximal_order(&poly)?;
        Ok(NumberField { poly, shape, order })
    }

    pub fn poly(&self) -> &QPoly {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    pub fn shape(&self) -> &FieldShape {
        &self.shape
    }

    pub fn order(&self) -> &MaximalOrder {
        &self.order
    }

    /// Field discriminant.
    pub fn disc(&self) -> &BigInt {
        self.order.disc()
    }

    /// True for imaginary quadratic and the quartic shape (always CM).
    pub fn is_cm(&self) -> bool {
        match &self.shape {
            FieldShape::Quadratic { a, b } => {
                (a * a - BigInt::from(4) * b).is_negative()
            }
            FieldShape::CmQuartic { .. } => true,
        }
    }

    pub fn is_totally_real(&self) -> bool {
        match &self.shape {
            FieldShape::Quadratic { a, b } => (a * a - BigInt::from(4) * b).is_positive(),
            FieldShape::CmQuartic { .. } => false,
        }
    }

    /// Galois type of the quartic shape: biquadratic iff B is a square,
    /// cyclic iff B(A^2 - 4B) is a square, dihedral otherwise.
    pub fn quartic_galois_type(&self) -> Option<QuarticGaloisType> {
        let FieldShape::CmQuartic { a, b } = &self.shape else { return None };
        let d = a * a - BigInt::from(4) * b;
        if zfactor::is_square(b) {
            Some(QuarticGaloisType::Biquadratic)
        } else if zfactor::is_square(&(b * &d)) {
            Some(QuarticGaloisType::Cyclic)
        } else {
            Some(QuarticGaloisType::Dihedral)
        }
    }

    // ---- elements ----

    pub fn element(&self, coords: Vec<BigRational>) -> FieldElement {
        assert_eq!(coords.len(), self.degree(), "coordinate length mismatch");
        FieldElement { coords }
    }

    pub fn element_from_int(&self, coords: &[i64]) -> FieldElement {
        assert_eq!(coords.len(), self.degree());
        FieldElement {
            coords: coords
                .iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { coords: vec![BigRational::zero(); self.degree()] }
    }

    pub fn one(&self) -> FieldElement {
        self.from_rational(BigRational::one())
    }

    pub fn from_rational(&self, q: BigRational) -> FieldElement {
        let mut coords = vec![BigRational::zero(); self.degree()];
        coords[0] = q;
        FieldElement { coords }
    }

    /// The defining root as an element.
    pub fn gen(&self) -> FieldElement {
        let mut coords = vec![BigRational::zero(); self.degree()];
        coords[1] = BigRational::one();
        FieldElement { coords }
    }

    pub fn as_qpoly(&self, x: &FieldElement) -> QPoly {
        QPoly::new(x.coords.clone())
    }

    pub fn from_qpoly(&self, p: &QPoly) -> FieldElement {
        let r = p.rem(&self.poly);
        let mut coords = vec![BigRational::zero(); self.degree()];
        for i in 0..r.coeffs().len() {
            coords[i] = r.coeff(i);
        }
        FieldElement { coords }
    }

    pub fn add(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        FieldElement {
            coords: x.coords.iter().zip(&y.coords).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        FieldElement {
            coords: x.coords.iter().zip(&y.coords).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn neg(&self, x: &FieldElement) -> FieldElement {
        FieldElement { coords: x.coords.iter().map(|a| -a.clone()).collect() }
    }

    pub fn mul(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        self.from_qpoly(&self.as_qpoly(x).mul(&self.as_qpoly(y)))
    }

    pub fn scale(&self, x: &FieldElement, s: &BigRational) -> FieldElement {
        FieldElement { coords: x.coords.iter().map(|a| a * s).collect() }
    }

    pub fn pow(&self, x: &FieldElement, e: i64) -> FieldElement {
        let (base, e) = if e < 0 {
            (self.inv(x).expect("inverse of zero in pow"), (-e) as u64)
        } else {
            (x.clone(), e as u64)
        };
        let mut acc = self.one();
        let mut b = base;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }

    /// Matrix of multiplication by x on the power basis (column convention:
    /// coords(x*y) = M * coords(y)).
    pub fn mul_matrix(&self, x: &FieldElement) -> QMat {
        let n = self.degree();
        let mut m = QMat::zero(n, n);
        let mut cur = x.clone();
        for j in 0..n {
            for i in 0..n {
                *m.at_mut(i, j) = cur.coord(i);
            }
            if j + 1 < n {
                cur = self.mul(&cur, &self.gen());
            }
        }
        m
    }

    pub fn inv(&self, x: &FieldElement) -> Result<FieldElement> {
        if x.is_zero() {
            return Err(Error::InvalidInput("division by zero field element".into()));
        }
        let m = self.mul_matrix(x);
        let mut e0 = vec![BigRational::zero(); self.degree()];
        e0[0] = BigRational::one();
        let v = m.solve(&e0).expect("nonzero element is invertible");
        Ok(FieldElement { coords: v })
    }

    pub fn div(&self, x: &FieldElement, y: &FieldElement) -> Result<FieldElement> {
        Ok(self.mul(x, &self.inv(y)?))
    }

    pub fn trace(&self, x: &FieldElement) -> BigRational {
        let m = self.mul_matrix(x);
        (0..self.degree()).map(|i| m.at(i, i).clone()).sum()
    }

    pub fn norm(&self, x: &FieldElement) -> BigRational {
        self.mul_matrix(x).det()
    }

    /// Complex conjugation as a field automorphism. Identity on real
    /// quadratic fields; `t -> -a - t` on imaginary quadratic; `t -> -t` on
    /// the totally imaginary quartic shape.
    pub fn conjugate(&self, x: &FieldElement) -> FieldElement {
        match &self.shape {
            FieldShape::Quadratic { a, b } => {
                if (a * a - BigInt::from(4) * b).is_positive() {
                    x.clone()
                } else {
                    let c0 = x.coord(0) - BigRational::from_integer(a.clone()) * x.coord(1);
                    FieldElement { coords: vec![c0, -x.coord(1)] }
                }
            }
            FieldShape::CmQuartic { .. } => FieldElement {
                coords: x
                    .coords
                    .iter()
                    .enumerate()
                    .map(|(i, c)| if i % 2 == 1 { -c.clone() } else { c.clone() })
                    .collect(),
            },
        }
    }

    /// Monic minimal polynomial over Q.
    pub fn minimal_polynomial(&self, x: &FieldElement) -> QPoly {
        let n = self.degree();
        // rows = coords of x^0 .. x^k; stop at the first dependence
        let mut pows: Vec<Vec<BigRational>> = Vec::new();
        let mut cur = self.one();
        for k in 0..=n {
            pows.push(cur.coords.clone());
            // solve for a dependence among pows
            let m = QMat::new(
                k + 1,
                n,
                pows.iter().flat_map(|r| r.iter().cloned()).collect(),
            );
            let ker = m.transpose().kernel();
            if let Some(rel) = ker.first() {
                // rel gives sum rel_i x^i = 0 with rel_k != 0 by minimality
                let lead = rel[k].clone();
                assert!(!lead.is_zero(), "dependence must involve the top power");
                let coeffs: Vec<BigRational> = rel.iter().map(|c| c / &lead).collect();
                return QPoly::new(coeffs);
            }
            cur = self.mul(&cur, x);
        }
        unreachable!("an element of a degree-n field satisfies a degree <= n relation")
    }

    // ---- embeddings ----

    /// Complex embeddings in a fixed deterministic order.
    ///
    /// Quadratic real: `t -> (-a + sqrt(d))/2`, then the `-sqrt(d)` twin.
    /// Quadratic imaginary: positive imaginary part first, then conjugate.
    /// CM quartic with r1 = sqrt((A - s)/2) < r2 = sqrt((A + s)/2),
    /// s = sqrt(A^2 - 4B): `t -> i r1, i r2, -i r1, -i r2`.
    pub fn embeddings(&self, prec: u32) -> Vec<Complex> {
        match &self.shape {
            FieldShape::Quadratic { a, b } => {
                let d = a * a - BigInt::from(4) * b;
                let half = BigRational::new(BigInt::one(), BigInt::from(2));
                let ma = Real::from_rational(
                    &(BigRational::from_integer(-a.clone()) * &half),
                    prec,
                );
                let sd = Real::from_bigint(&d.abs(), prec).sqrt();
                let sd2 = sd.mul(&Real::from_rational(&half, prec));
                if d.is_positive() {
                    vec![
                        Complex::new(ma.add(&sd2), Real::zero(prec)),
                        Complex::new(ma.sub(&sd2), Real::zero(prec)),
                    ]
                } else {
                    vec![
                        Complex::new(ma.clone(), sd2.clone()),
                        Complex::new(ma, sd2.neg()),
                    ]
                }
            }
            FieldShape::CmQuartic { a, b } => {
                let d = a * a - BigInt::from(4) * b;
                let s = Real::from_bigint(&d, prec).sqrt();
                let a_real = Real::from_bigint(a, prec);
                let half = Real::from_ratio_parts(&BigInt::one(), &BigInt::from(2), prec);
                let r1 = a_real.sub(&s).mul(&half).sqrt();
                let r2 = a_real.add(&s).mul(&half).sqrt();
                let z = Real::zero(prec);
                vec![
                    Complex::new(z.clone(), r1.clone()),
                    Complex::new(z.clone(), r2.clone()),
                    Complex::new(z.clone(), r1.neg()),
                    Complex::new(z, r2.neg()),
                ]
            }
        }
    }

    /// Index of the embedding conjugate to `idx`.
    pub fn conj_embedding(&self, idx: usize) -> usize {
        match &self.shape {
            FieldShape::Quadratic { a, b } => {
                if (a * a - BigInt::from(4) * b).is_positive() {
                    idx
                } else {
                    1 - idx
                }
            }
            FieldShape::CmQuartic { .. } => (idx + 2) % 4,
        }
    }

    /// Value of x under embedding `idx` at precision `prec`.
    pub fn embed(&self, x: &FieldElement, idx: usize, prec: u32) -> Complex {
        let root = self.embeddings(prec).swap_remove(idx);
        self.embed_at(x, &root)
    }

    /// Horner evaluation of x at a root value.
    pub fn embed_at(&self, x: &FieldElement, root: &Complex) -> Complex {
        let prec = root.prec();
        let mut acc = Complex::zero(prec);
        for c in x.coords.iter().rev() {
            acc = acc.mul(root).add(&Complex::from_rationals(c, &BigRational::zero(), prec));
        }
        acc
    }

    /// For the quartic shape: the squarefree integer D0 and the element
    /// `w = (2 t^2 + A)/s` with `w^2 = D0`, `s^2 D0 = A^2 - 4B`, so that the
    /// real quadratic subfield is Q(w).
    pub fn real_subfield_data(&self) -> Result<(BigInt, FieldElement)> {
        let FieldShape::CmQuartic { a, b } = &self.shape else {
            return Err(Error::InvalidInput("real subfield data needs the quartic shape".into()));
        };
        let d = a * a - BigInt::from(4) * b;
        let (d0, s) = zfactor::squarefree_decompose(&d)?;
        let sr = BigRational::from_integer(s);
        let coords = vec![
            BigRational::from_integer(a.clone()) / &sr,
            BigRational::zero(),
            BigRational::from_integer(BigInt::from(2)) / &sr,
            BigRational::zero(),
        ];
        Ok((d0, FieldElement { coords }))
    }

    /// Renders x as a polynomial in `var`.
    pub fn format_element(&self, x: &FieldElement, var: &str) -> String {
        let mut out = String::new();
        let mut first = true;
        for (i, c) in x.coords.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if first {
                if c.is_negative() {
                    out.push('-');
                }
                first = false;
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            }
            let a = c.abs();
            if i == 0 || !a.is_one() {
                let _ = write!(out, "{}", a);
                if i > 0 {
                    out.push('*');
                }
            }
            if i == 1 {
                out.push_str(var);
            } else if i > 1 {
                let _ = write!(out, "{}^{}", var, i);
            }
        }
        if first {
            out.push('0');
        }
        out
    }
}
