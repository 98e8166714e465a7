//! CM types, reflex fields, and polarized CM points.
//!
//! A CM type `Phi` of a CM field `K` of degree `2g` picks one embedding out
//! of each complex-conjugate pair. The type norm `N_Phi(x) = prod phi(x)`
//! over `phi in Phi` generates the reflex field `K^r`, and the reflex type
//! norm `N_{Phi^r}` maps `K^r` back into `K`. For quartic `K = Q(alpha)`,
//! `alpha^4 + A alpha^2 + B = 0`, both norms are evaluated exactly inside the
//! splitting algebra `L = K[Y]/(Y^2 + alpha^2 + A)`: `L` contains a copy of
//! `K` and one of `K^r`, every embedding twist of `L` acts as a signed
//! permutation of `{alpha, Y}`, and membership of a product in the `K^r` copy
//! is certified by an exact linear solve, so no floating-point recognition
//! step is needed anywhere.
//!
//! A [`CMPoint`] packages a type with a lattice `b`, a totally imaginary
//! polarization `xi` whose pairing `E_xi(x, y) = Tr(conj(x) y xi)` is
//! integral on `b x b`, and a basis of `b` whose Gram matrix under `E_xi` is
//! exactly `Omega = [[0, I], [-I, 0]]`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::Complex;
use crate::error::{Error, Result};
use crate::linalg::{QMat, ZMat};
use crate::numfield::{FieldElement, FieldShape, FracIdeal, NumberField, QuarticGaloisType};

/// Bits used for the sign checks `Im phi(xi) > 0`.
const SIGN_PREC: u32 = 128;

/// A CM type: `g` embeddings of a CM field of degree `2g`, no two of which
/// are complex conjugates of each other.
#[derive(Clone, Debug)]
pub struct CMType {
    field: NumberField,
    indices: Vec<usize>,
}

impl CMType {
    /// Validates that `indices` picks exactly one embedding from each
    /// conjugate pair of the field's embedding list.
    pub fn new(field: NumberField, indices: &[usize]) -> Result<CMType> {
        if !field.is_cm() {
            return Err(Error::NotCmField("a CM type needs a totally imaginary field".into()));
        }
        let n = field.degree();
        let g = n / 2;
        let mut sorted: Vec<usize> = indices.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != g || indices.len() != g {
            return Err(Error::InvalidInput(format!(
                "a CM type of a degree-{n} field needs {g} distinct embeddings"
            )));
        }
        for &i in &sorted {
            if i >= n {
                return Err(Error::InvalidInput(format!("embedding index {i} out of range")));
            }
            if sorted.contains(&field.conj_embedding(i)) {
                return Err(Error::InvalidInput(format!(
                    "embeddings {i} and {} are complex conjugates",
                    field.conj_embedding(i)
                )));
            }
        }
        Ok(CMType { field, indices: sorted })
    }

    /// The type made of the embeddings with positive imaginary part, which
    /// come first in the field's embedding list.
    pub fn positive_imaginary(field: NumberField) -> Result<CMType> {
        let indices: Vec<usize> = (0..field.degree() / 2).collect();
        CMType::new(field, &indices)
    }

    /// All `2^g` CM types of the field.
    pub fn all_types(field: &NumberField) -> Result<Vec<CMType>> {
        let sets: &[&[usize]] = match field.degree() {
            2 => &[&[0], &[1]],
            _ => &[&[0, 1], &[0, 3], &[1, 2], &[2, 3]],
        };
        sets.iter().map(|s| CMType::new(field.clone(), s)).collect()
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    /// Half the degree of the field; the number of embeddings in the type.
    pub fn g(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// The complex-conjugate type.
    pub fn conjugate(&self) -> CMType {
        let idx: Vec<usize> =
            self.indices.iter().map(|&i| self.field.conj_embedding(i)).collect();
        CMType::new(self.field.clone(), &idx).expect("conjugate of a valid type")
    }

    /// True unless the type is induced from a proper CM subfield. Of the
    /// supported shapes only the biquadratic quartics contain an imaginary
    /// quadratic subfield, and each of their four types is induced from one,
    /// so primitivity depends only on the Galois type.
    pub fn is_primitive(&self) -> bool {
        !matches!(self.field.quartic_galois_type(), Some(QuarticGaloisType::Biquadratic))
    }

    /// `Phi(x)` as a vector in `C^g`.
    pub fn apply(&self, x: &FieldElement, prec: u32) -> Vec<Complex> {
        self.indices.iter().map(|&i| self.field.embed(x, i, prec)).collect()
    }

    /// The complex type norm `prod phi(x)` over `phi in Phi`.
    pub fn numeric_type_norm(&self, x: &FieldElement, prec: u32) -> Complex {
        let mut acc = Complex::one(prec);
        for &i in &self.indices {
            acc = acc.mul(&self.field.embed(x, i, prec));
        }
        acc
    }

    /// The reflex data of a primitive type.
    pub fn reflex(&self) -> Result<ReflexData> {
        ReflexData::new(self.clone())
    }
}

/// `p*alpha + q*Y` as an integer pair: the embedding images of `alpha` and of
/// the reflex generator are all of this shape, and every algebra twist of `L`
/// acts on such pairs as a signed permutation.
type Pair = (i64, i64);

/// Images of `alpha` under the four embeddings of `K`; with the splitting
/// map `alpha -> i r1, Y -> i r2` these realize the embedding values
/// `(i r1, i r2, -i r1, -i r2)` in the field's embedding order.
const K_SYMBOLS: [Pair; 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];

/// Images of the reflex generator under the four embeddings of `K^r`, whose
/// values in the same order are `(i(r2 - r1), i(r1 + r2), -i(r2 - r1),
/// -i(r1 + r2))`.
const REFLEX_SYMBOLS: [Pair; 4] = [(-1, 1), (1, 1), (1, -1), (-1, -1)];

/// One of the eight algebra endomorphisms of `L`: `alpha` and `Y` are both
/// roots of the defining quartic and satisfy the same relation
/// `Y^2 = -(alpha^2 + A)`, so `alpha -> s1 * (alpha or Y)`,
/// `Y -> s2 * (Y or alpha)` always extends to `L`.
fn twist(swap: bool, s1: i64, s2: i64, x: Pair) -> Pair {
    if swap {
        (s2 * x.1, s1 * x.0)
    } else {
        (s1 * x.0, s2 * x.1)
    }
}

/// Reflex combinatorics of a quartic type: the normalized reflex generator
/// `u` as a pair, the embedding of `K^r` realized by `u` under the splitting
/// map, and the reflex type indices.
fn quartic_reflex_symbols(indices: &[usize]) -> (Pair, usize, Vec<usize>) {
    // the type trace of alpha generates K^r; normalize the sign so the
    // Y coefficient is +1 (ties are impossible: the trace always hits Y)
    let mut u = (0i64, 0i64);
    for &i in indices {
        u.0 += K_SYMBOLS[i].0;
        u.1 += K_SYMBOLS[i].1;
    }
    if u.1 < 0 {
        u = (-u.0, -u.1);
    }
    let canonical =
        REFLEX_SYMBOLS.iter().position(|&s| s == u).expect("type trace is a reflex conjugate");

    // an embedding of K^r belongs to the reflex type when some twist of L
    // carries its image of the generator back to u while restricting on K to
    // a member of Phi
    let mut reflex = Vec::new();
    for (j, &c) in REFLEX_SYMBOLS.iter().enumerate() {
        let mut member = false;
        for swap in [false, true] {
            for s1 in [1i64, -1] {
                for s2 in [1i64, -1] {
                    if twist(swap, s1, s2, c) != u {
                        continue;
                    }
                    let img = twist(swap, s1, s2, (1, 0));
                    let k_idx = K_SYMBOLS.iter().position(|&s| s == img).expect("unit pair");
                    member |= indices.contains(&k_idx);
                }
            }
        }
        if member {
            reflex.push(j);
        }
    }
    (u, canonical, reflex)
}

/// An element `a + b*Y` of the splitting algebra `L = K[Y]/(Y^2 - w)` with
/// `w = -(alpha^2 + A)`.
#[derive(Clone, Debug, PartialEq)]
struct Ext {
    a: FieldElement,
    b: FieldElement,
}

fn ext_zero(k: &NumberField) -> Ext {
    Ext { a: k.zero(), b: k.zero() }
}

fn ext_one(k: &NumberField) -> Ext {
    Ext { a: k.one(), b: k.zero() }
}

fn ext_from_pair(k: &NumberField, p: Pair) -> Ext {
    Ext {
        a: k.scale(&k.gen(), &BigRational::from_integer(p.0.into())),
        b: k.from_rational(BigRational::from_integer(p.1.into())),
    }
}

fn ext_add(k: &NumberField, x: &Ext, y: &Ext) -> Ext {
    Ext { a: k.add(&x.a, &y.a), b: k.add(&x.b, &y.b) }
}

fn ext_scale(k: &NumberField, x: &Ext, s: &BigRational) -> Ext {
    Ext { a: k.scale(&x.a, s), b: k.scale(&x.b, s) }
}

fn ext_mul(k: &NumberField, w: &FieldElement, x: &Ext, y: &Ext) -> Ext {
    Ext {
        a: k.add(&k.mul(&x.a, &y.a), &k.mul(&k.mul(&x.b, &y.b), w)),
        b: k.add(&k.mul(&x.a, &y.b), &k.mul(&x.b, &y.a)),
    }
}

/// Evaluates `x`, given by its power-basis coordinates, at the image of the
/// generator under an embedding into `L`.
fn ext_eval(k: &NumberField, w: &FieldElement, x: &FieldElement, at: &Ext) -> Ext {
    let mut acc = ext_zero(k);
    for c in x.coords().iter().rev() {
        acc = ext_mul(k, w, &acc, at);
        acc.a = k.add(&acc.a, &k.from_rational(c.clone()));
    }
    acc
}

/// `L`-element as eight rational coordinates (power bases of both parts).
fn ext_coords(x: &Ext) -> Vec<BigRational> {
    (0..4).map(|i| x.a.coord(i)).chain((0..4).map(|i| x.b.coord(i))).collect()
}

/// Exact embedding dictionary for a quartic type: `K` and `K^r` realized
/// side by side inside `L = K[Y]/(Y^2 - w)`.
#[derive(Clone, Debug)]
struct Dict {
    /// `Y^2 = -(alpha^2 + A)` as an element of `K`
    w: FieldElement,
    /// powers `u^0..u^3` of the reflex generator inside `L`
    upow: Vec<Ext>,
    /// full `8 x 4` coordinate matrix of those powers
    coord: QMat,
    /// four independent rows of `coord` and the inverse of that block
    rows: [usize; 4],
    solver: QMat,
    /// images of `alpha` under the four embeddings `K -> L`
    k_images: Vec<Ext>,
    /// images of the reflex generator under the four embeddings `K^r -> L`
    r_images: Vec<Ext>,
}

/// Picks four linearly independent rows of an `8 x 4` matrix by exact
/// Gaussian elimination.
fn independent_rows(m: &QMat) -> Option<[usize; 4]> {
    let mut reduced: Vec<Vec<BigRational>> = Vec::new();
    let mut picked: Vec<usize> = Vec::new();
    for r in 0..8 {
        let mut v = m.row(r).to_vec();
        for b in &reduced {
            let p = b.iter().position(|x| !x.is_zero()).expect("nonzero reduced row");
            if !v[p].is_zero() {
                let f = &v[p] / &b[p];
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi = vi.clone() - &f * bi;
                }
            }
        }
        if v.iter().any(|x| !x.is_zero()) {
            reduced.push(v);
            picked.push(r);
            if picked.len() == 4 {
                return Some([picked[0], picked[1], picked[2], picked[3]]);
            }
        }
    }
    None
}

impl Dict {
    fn new(k: &NumberField, u_pair: Pair) -> Result<Dict> {
        let FieldShape::CmQuartic { a, .. } = k.shape() else {
            return Err(Error::NotCmField("splitting dictionary needs a quartic field".into()));
        };
        let alpha = k.gen();
        let w = k.neg(&k.add(
            &k.mul(&alpha, &alpha),
            &k.from_rational(BigRational::from_integer(a.clone())),
        ));
        let u = ext_from_pair(k, u_pair);
        let mut upow = vec![ext_one(k)];
        for i in 1..4 {
            upow.push(ext_mul(k, &w, &upow[i - 1], &u));
        }
        let mut data = vec![BigRational::zero(); 32];
        for (i, p) in upow.iter().enumerate() {
            for (r, v) in ext_coords(p).into_iter().enumerate() {
                data[r * 4 + i] = v;
            }
        }
        let coord = QMat::new(8, 4, data);
        let rows = independent_rows(&coord).ok_or_else(|| {
            Error::RecognitionFailed("reflex generator does not span a quartic subalgebra".into())
        })?;
        let block = QMat::new(
            4,
            4,
            rows.iter().flat_map(|&r| coord.row(r).to_vec()).collect(),
        );
        let solver = block.inverse().expect("independent rows invert");
        let k_images = K_SYMBOLS.iter().map(|&p| ext_from_pair(k, p)).collect();
        let r_images = REFLEX_SYMBOLS.iter().map(|&p| ext_from_pair(k, p)).collect();
        Ok(Dict { w, upow, coord, rows, solver, k_images, r_images })
    }

    /// Coordinates of `z` in the power basis of the reflex generator,
    /// verified against the full eight-row system so that membership in the
    /// `K^r` copy is certified exactly.
    fn reflex_coords(&self, z: &Ext) -> Result<Vec<BigRational>> {
        let zv = ext_coords(z);
        let rhs: Vec<BigRational> = self.rows.iter().map(|&r| zv[r].clone()).collect();
        let y = self.solver.mul_vec(&rhs);
        for (r, zr) in zv.iter().enumerate() {
            let mut acc = BigRational::zero();
            for (i, yi) in y.iter().enumerate() {
                acc += self.coord.at(r, i) * yi;
            }
            if acc != *zr {
                return Err(Error::RecognitionFailed(
                    "type norm value does not lie in the reflex field".into(),
                ));
            }
        }
        Ok(y)
    }
}

/// The reflex of a primitive CM type: the reflex field `K^r`, the reflex
/// type `Phi^r` on it, the real quadratic subfield `K^r_0` (absent for
/// `g = 1`, where it is `Q`), and the exact embedding dictionary both type
/// norms route through.
#[derive(Clone, Debug)]
pub struct ReflexData {
    phi: CMType,
    reflex_type: CMType,
    real_subfield: Option<NumberField>,
    canonical_embedding: usize,
    dict: Option<Dict>,
}

impl ReflexData {
    pub fn new(phi: CMType) -> Result<ReflexData> {
        if !phi.is_primitive() {
            return Err(Error::ImprimitiveType(
                "the reflex construction needs a primitive CM type".into(),
            ));
        }
        if phi.g() == 1 {
            // K^r = K and Phi^r = Phi; the type norm is the identity or
            // conjugation, and either is its own inverse norm. The abstract
            // generator realizes the reflex field at embedding 0 both times.
            let reflex_type = phi.clone();
            return Ok(ReflexData {
                phi,
                reflex_type,
                real_subfield: None,
                canonical_embedding: 0,
                dict: None,
            });
        }

        let (u_pair, canonical_embedding, reflex_idx) = quartic_reflex_symbols(phi.indices());
        assert_eq!(reflex_idx.len(), 2, "a primitive quartic type has two reflex embeddings");
        let FieldShape::CmQuartic { a, b } = phi.field().shape() else { unreachable!() };

        // K^r = Q[X]/(X^4 + 2A X^2 + (A^2 - 4B)): the minimal polynomial of
        // the type trace alpha + Y, whose values are +-i(r2 -+ r1)
        let coeffs = [
            a * a - BigInt::from(4) * b,
            BigInt::zero(),
            BigInt::from(2) * a,
            BigInt::zero(),
            BigInt::one(),
        ];
        let reflex_field = NumberField::from_integer_coeffs(&coeffs)?;
        let dict = Dict::new(phi.field(), u_pair)?;

        // the generator must satisfy the reflex polynomial inside L
        let k = phi.field();
        let u4 = ext_mul(k, &dict.w, &dict.upow[3], &dict.upow[1]);
        let mut rel = ext_add(k, &u4, &ext_scale(k, &dict.upow[2], &BigRational::from_integer(BigInt::from(2) * a)));
        rel = ext_add(k, &rel, &ext_scale(k, &dict.upow[0], &BigRational::from_integer(a * a - BigInt::from(4) * b)));
        assert_eq!(rel, ext_zero(k), "reflex generator satisfies the reflex polynomial");

        // real quadratic subfield from the squarefree part d0 of A^2 - 4B
        // of the reflex shape; d0 = 1 mod 4 gets the (1 + sqrt(d0))/2 order
        let (d0, _) = reflex_field.real_subfield_data()?;
        let four = BigInt::from(4);
        let real_poly = if d0.mod_floor(&four) == BigInt::one() {
            [-(&d0 - BigInt::one()) / &four, -BigInt::one(), BigInt::one()]
        } else {
            [-&d0, BigInt::zero(), BigInt::one()]
        };
        let real_subfield = NumberField::from_integer_coeffs(&real_poly)?;

        let reflex_type = CMType::new(reflex_field, &reflex_idx)?;
        Ok(ReflexData {
            phi,
            reflex_type,
            real_subfield: Some(real_subfield),
            canonical_embedding,
            dict: Some(dict),
        })
    }

    pub fn phi(&self) -> &CMType {
        &self.phi
    }

    pub fn reflex_field(&self) -> &NumberField {
        self.reflex_type.field()
    }

    pub fn reflex_type(&self) -> &CMType {
        &self.reflex_type
    }

    /// The real quadratic subfield of the reflex field; `None` for `g = 1`.
    pub fn real_subfield(&self) -> Option<&NumberField> {
        self.real_subfield.as_ref()
    }

    /// Embedding index of `K^r` at which the abstract generator takes the
    /// value of the type trace realization, so that
    /// `embed(type_norm(x), canonical) = prod phi(x)` numerically.
    pub fn canonical_embedding(&self) -> usize {
        self.canonical_embedding
    }

    /// Exact type norm `N_Phi : K -> K^r`.
    pub fn type_norm(&self, x: &FieldElement) -> Result<FieldElement> {
        let k = self.phi.field();
        match &self.dict {
            None => {
                if self.phi.indices()[0] == 0 {
                    Ok(x.clone())
                } else {
                    Ok(k.conjugate(x))
                }
            }
            Some(d) => {
                let mut acc = ext_one(k);
                for &j in self.phi.indices() {
                    acc = ext_mul(k, &d.w, &acc, &ext_eval(k, &d.w, x, &d.k_images[j]));
                }
                let y = d.reflex_coords(&acc)?;
                Ok(self.reflex_field().element(y))
            }
        }
    }

    /// Exact reflex type norm `N_{Phi^r} : K^r -> K`.
    pub fn reflex_type_norm(&self, y: &FieldElement) -> Result<FieldElement> {
        let k = self.phi.field();
        match &self.dict {
            None => {
                if self.reflex_type.indices()[0] == 0 {
                    Ok(y.clone())
                } else {
                    Ok(k.conjugate(y))
                }
            }
            Some(d) => {
                let mut acc = ext_one(k);
                for &j in self.reflex_type.indices() {
                    acc = ext_mul(k, &d.w, &acc, &ext_eval(k, &d.w, y, &d.r_images[j]));
                }
                if !acc.b.is_zero() {
                    return Err(Error::RecognitionFailed(
                        "reflex type norm value does not lie in the base field".into(),
                    ));
                }
                Ok(acc.a)
            }
        }
    }

    /// Type norm on fractional ideals, `N_Phi(a) O_L = prod phi(a) O_L`.
    ///
    /// The ideal generated by element norms `N_Phi(z)`, `z in a`, is always
    /// contained in the true norm ideal; equality is certified by the
    /// absolute-norm identity `N(N_Phi(a)) = N(a)^g`, adding generators
    /// until the norms agree.
    pub fn type_norm_ideal(&self, a: &FracIdeal) -> Result<FracIdeal> {
        self.norm_ideal(self.phi.field(), &self.reflex_field().clone(), a, |x| self.type_norm(x))
    }

    /// Reflex type norm on fractional ideals of `K^r`, certified the same
    /// way as [`type_norm_ideal`](Self::type_norm_ideal).
    pub fn reflex_type_norm_ideal(&self, a: &FracIdeal) -> Result<FracIdeal> {
        self.norm_ideal(&self.reflex_field().clone(), self.phi.field(), a, |y| {
            self.reflex_type_norm(y)
        })
    }

    fn norm_ideal(
        &self,
        src: &NumberField,
        tgt: &NumberField,
        a: &FracIdeal,
        f: impl Fn(&FieldElement) -> Result<FieldElement>,
    ) -> Result<FracIdeal> {
        let g = self.phi.g() as u32;
        let d = a.den().clone();
        let a_int = if d.is_one() {
            a.clone()
        } else {
            a.mul(src, &FracIdeal::from_integer(src, &d)?)
        };
        let target = a_int.norm(src).to_integer().pow(g);

        let basis = a_int.basis_elements(src);
        let mut acc: Option<FracIdeal> = None;
        let mut rng = ChaCha8Rng::seed_from_u64(0x7479_7065_6e6f_726d);
        for round in 0..200 {
            let z = if round < basis.len() {
                basis[round].clone()
            } else {
                let mut z = src.zero();
                for w in &basis {
                    let c: i64 = rng.gen_range(-3..=3);
                    if c != 0 {
                        z = src.add(&z, &src.scale(w, &BigRational::from_integer(c.into())));
                    }
                }
                z
            };
            if z.is_zero() {
                continue;
            }
            let img = FracIdeal::principal(tgt, &f(&z)?)?;
            let cur = match &acc {
                None => img,
                Some(r) => r.sum(tgt, &img),
            };
            let nrm = cur.norm(tgt);
            if nrm.is_integer() && nrm.to_integer() == target {
                let mut out = cur;
                if !d.is_one() {
                    let dg = FracIdeal::from_integer(tgt, &d.pow(g))?;
                    out = out.mul(tgt, &dg.inverse(tgt));
                }
                return Ok(out);
            }
            acc = Some(cur);
        }
        Err(Error::BudgetExhausted(
            "type norm ideal did not certify within 200 generators".into(),
        ))
    }
}

/// The polarization pairing `E_xi(x, y) = Tr(conj(x) y xi)`.
pub fn pairing_value(
    field: &NumberField,
    xi: &FieldElement,
    x: &FieldElement,
    y: &FieldElement,
) -> BigRational {
    field.trace(&field.mul(&field.mul(&field.conjugate(x), y), xi))
}

/// Gram matrix of the pairing on a basis, as exact integers; fails with the
/// offending entry when a value is not an integer, i.e. when `E_xi` is not
/// integral on the span of the basis.
pub fn pairing_matrix(
    field: &NumberField,
    xi: &FieldElement,
    basis: &[FieldElement],
) -> Result<ZMat> {
    let n = basis.len();
    let mut data = Vec::with_capacity(n * n);
    for (i, x) in basis.iter().enumerate() {
        for (j, y) in basis.iter().enumerate() {
            let v = pairing_value(field, xi, x, y);
            if !v.is_integer() {
                return Err(Error::PolarizationDefect(format!(
                    "pairing entry ({i}, {j}) = {v} is not an integer"
                )));
            }
            data.push(v.to_integer());
        }
    }
    Ok(ZMat::new(n, n, data))
}

/// The standard symplectic Gram matrix `[[0, I], [-I, 0]]` of size `2g`.
pub fn omega_matrix(g: usize) -> ZMat {
    let mut m = ZMat::zero(2 * g, 2 * g);
    for i in 0..g {
        *m.at_mut(i, g + i) = BigInt::one();
        *m.at_mut(g + i, i) = -BigInt::one();
    }
    m
}

/// A principally polarized CM point `(Phi, b, xi, B)`.
#[derive(Clone, Debug)]
pub struct CMPoint {
    phi: CMType,
    lattice: FracIdeal,
    xi: FieldElement,
    basis: Vec<FieldElement>,
}

impl CMPoint {
    /// Validates the whole package: `conj(xi) = -xi` exactly, `Im phi(xi) > 0`
    /// for every embedding in the type, `B` a Z-basis of the lattice, and the
    /// Gram matrix of `B` under `E_xi` exactly `Omega`.
    pub fn new(
        phi: CMType,
        lattice: FracIdeal,
        xi: FieldElement,
        basis: Vec<FieldElement>,
    ) -> Result<CMPoint> {
        let field = phi.field();
        let n = field.degree();
        if !field.add(&field.conjugate(&xi), &xi).is_zero() {
            return Err(Error::PolarizationDefect("xi is not totally imaginary".into()));
        }
        for &j in phi.indices() {
            let v = field.embed(&xi, j, SIGN_PREC);
            if v.im.is_zero() || v.im.is_negative() {
                return Err(Error::PolarizationDefect(format!(
                    "phi(xi) is not on the positive imaginary axis at embedding {j}"
                )));
            }
        }
        if basis.len() != n {
            return Err(Error::InvalidInput(format!(
                "need {n} basis vectors, got {}",
                basis.len()
            )));
        }
        for (i, b) in basis.iter().enumerate() {
            if !lattice.contains(field, b) {
                return Err(Error::InvalidInput(format!(
                    "basis vector {i} does not lie in the lattice"
                )));
            }
        }
        // coordinates of B on the lattice's own basis must be unimodular
        let w = lattice.basis_elements(field);
        let mut wdata = Vec::with_capacity(n * n);
        for ww in &w {
            for i in 0..n {
                wdata.push(ww.coord(i));
            }
        }
        let wt = QMat::new(n, n, wdata).transpose();
        let mut cdata: Vec<BigRational> = Vec::with_capacity(n * n);
        for b in &basis {
            let rhs: Vec<BigRational> = (0..n).map(|i| b.coord(i)).collect();
            let c = wt
                .solve(&rhs)
                .ok_or_else(|| Error::InvalidInput("lattice basis is degenerate".into()))?;
            cdata.extend(c);
        }
        let det = QMat::new(n, n, cdata).det();
        if det.abs() != BigRational::one() {
            return Err(Error::InvalidInput(
                "the given vectors do not generate the lattice".into(),
            ));
        }
        let gram = pairing_matrix(field, &xi, &basis)?;
        if gram != omega_matrix(n / 2) {
            return Err(Error::NotSymplectic(
                "Gram matrix of the basis under the pairing is not Omega".into(),
            ));
        }
        Ok(CMPoint { phi, lattice, xi, basis })
    }

    pub fn phi(&self) -> &CMType {
        &self.phi
    }

    pub fn field(&self) -> &NumberField {
        self.phi.field()
    }

    pub fn g(&self) -> usize {
        self.phi.g()
    }

    pub fn lattice(&self) -> &FracIdeal {
        &self.lattice
    }

    pub fn xi(&self) -> &FieldElement {
        &self.xi
    }

    pub fn basis(&self) -> &[FieldElement] {
        &self.basis
    }
}

/// Bounded search for principal polarizations of `b`: enumerates `xi` over
/// the trace dual of `b * conj(b)` with coordinates of absolute value at most
/// `bound`, in lexicographic coordinate order, and keeps every `xi` that is
/// totally imaginary, positive on the type, and of Gram determinant 1 on the
/// lattice. Bounded search only: an empty result proves nothing.
pub fn search_polarizations(
    phi: &CMType,
    b: &FracIdeal,
    bound: i64,
) -> Result<Vec<FieldElement>> {
    let field = phi.field();
    let n = field.degree();
    if bound <= 0 {
        return Ok(Vec::new());
    }
    // E_xi is integral on b x b exactly when xi lies in the trace dual of
    // the product ideal b * conj(b)
    let m = b.mul(field, &b.conjugate(field));
    let w = m.basis_elements(field);
    let mut tdata = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            tdata.push(field.trace(&field.mul(&w[i], &w[j])));
        }
    }
    let tinv = QMat::new(n, n, tdata)
        .inverse()
        .ok_or_else(|| Error::IdealArithmetic("trace form is degenerate".into()))?;
    let dual: Vec<FieldElement> = (0..n)
        .map(|j| {
            let mut acc = field.zero();
            for k in 0..n {
                acc = field.add(&acc, &field.scale(&w[k], tinv.at(j, k)));
            }
            acc
        })
        .collect();

    // Gram entries are linear in the dual coordinates of xi
    let lb = b.basis_elements(field);
    let mut tensor = vec![BigRational::zero(); n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                tensor[(i * n + j) * n + k] = pairing_value(field, &dual[k], &lb[i], &lb[j]);
            }
        }
    }

    let mut found = Vec::new();
    let mut c = vec![-bound; n];
    loop {
        if c.iter().any(|&x| x != 0) {
            let mut xi = field.zero();
            for (k, &ck) in c.iter().enumerate() {
                if ck != 0 {
                    xi = field.add(&xi, &field.scale(&dual[k], &BigRational::from_integer(ck.into())));
                }
            }
            if field.add(&field.conjugate(&xi), &xi).is_zero() {
                let positive = phi.indices().iter().all(|&j| {
                    let v = field.embed(&xi, j, SIGN_PREC);
                    !v.im.is_zero() && !v.im.is_negative()
                });
                if positive {
                    let mut gdata = Vec::with_capacity(n * n);
                    for i in 0..n {
                        for j in 0..n {
                            let mut e = BigRational::zero();
                            for (k, &ck) in c.iter().enumerate() {
                                if ck != 0 {
                                    e += &tensor[(i * n + j) * n + k]
                                        * BigRational::from_integer(ck.into());
                                }
                            }
                            gdata.push(e);
                        }
                    }
                    if QMat::new(n, n, gdata).det() == BigRational::one() {
                        found.push(xi);
                    }
                }
            }
        }
        // odometer, last coordinate fastest
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(found);
            }
            pos -= 1;
            if c[pos] < bound {
                c[pos] += 1;
                break;
            }
            c[pos] = -bound;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture_field() -> NumberField {
        NumberField::new(&[52, 0, 27, 0, 1]).unwrap()
    }

    fn gaussian_field() -> NumberField {
        NumberField::new(&[1, 0, 1]).unwrap()
    }

    fn rational(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn random_element(field: &NumberField, rng: &mut ChaCha8Rng) -> FieldElement {
        let coords: Vec<i64> = (0..field.degree()).map(|_| rng.gen_range(-9..=9)).collect();
        field.element_from_int(&coords)
    }

    #[test]
    fn type_validation_and_enumeration() {
        let k = fixture_field();
        let all = CMType::all_types(&k).unwrap();
        assert_eq!(all.len(), 4);
        for t in &all {
            assert!(t.is_primitive());
            assert_eq!(t.g(), 2);
        }
        assert_eq!(CMType::positive_imaginary(k.clone()).unwrap().indices(), &[0, 1]);
        assert_eq!(
            CMType::new(k.clone(), &[0, 1]).unwrap().conjugate().indices(),
            &[2, 3]
        );
        // embedding 2 is the conjugate of embedding 0
        assert!(CMType::new(k.clone(), &[0, 2]).is_err());
        assert!(CMType::new(k.clone(), &[0, 0]).is_err());
        assert!(CMType::new(k, &[0, 5]).is_err());
        // totally real fields have no CM types
        assert!(CMType::all_types(&NumberField::new(&[-3, -1, 1]).unwrap()).is_err());

        let qi = gaussian_field();
        assert_eq!(CMType::all_types(&qi).unwrap().len(), 2);
        assert!(CMType::positive_imaginary(qi).unwrap().is_primitive());
    }

    #[test]
    fn biquadratic_types_are_imprimitive() {
        let k = NumberField::new(&[1, 0, 4, 0, 1]).unwrap();
        assert_eq!(k.quartic_galois_type(), Some(QuarticGaloisType::Biquadratic));
        for t in CMType::all_types(&k).unwrap() {
            assert!(!t.is_primitive());
            assert!(matches!(t.reflex(), Err(Error::ImprimitiveType(_))));
        }
    }

    #[test]
    fn reflex_field_of_fixture() {
        let k = fixture_field();
        let rd = CMType::positive_imaginary(k.clone()).unwrap().reflex().unwrap();
        let pol = rd.reflex_field().poly();
        assert_eq!(
            (0..5).map(|i| pol.coeff(i).to_integer()).collect::<Vec<_>>(),
            vec![
                BigInt::from(521),
                BigInt::zero(),
                BigInt::from(54),
                BigInt::zero(),
                BigInt::one()
            ]
        );
        assert_eq!(rd.real_subfield().unwrap().disc(), &BigInt::from(13));
        assert_eq!(rd.canonical_embedding(), 1);
        assert_eq!(rd.reflex_type().indices(), &[1, 2]);

        // full table over the four types: generator realizations and reflex
        // indices come in conjugate-symmetric pairs
        let expect = [
            (vec![0usize, 1], 1usize, vec![1usize, 2]),
            (vec![0, 3], 0, vec![0, 3]),
            (vec![1, 2], 0, vec![1, 2]),
            (vec![2, 3], 1, vec![0, 3]),
        ];
        for (idx, canonical, reflex) in expect {
            let rd = CMType::new(k.clone(), &idx).unwrap().reflex().unwrap();
            assert_eq!(rd.canonical_embedding(), canonical, "type {idx:?}");
            assert_eq!(rd.reflex_type().indices(), reflex.as_slice(), "type {idx:?}");
        }
    }

    #[test]
    fn type_norm_exact_values() {
        let k = fixture_field();
        let rd = CMType::positive_imaginary(k.clone()).unwrap().reflex().unwrap();
        let kr = rd.reflex_field();

        assert_eq!(rd.type_norm(&k.one()).unwrap(), kr.one());
        // rationals go to their g-th power
        assert_eq!(
            rd.type_norm(&k.from_rational(rational(5, 3))).unwrap(),
            kr.from_rational(rational(25, 9))
        );
        // N_Phi(alpha) = alpha * Y = (u^2 + A)/2 in the reflex power basis
        let tn_alpha = rd.type_norm(&k.gen()).unwrap();
        assert_eq!(
            tn_alpha,
            kr.element(vec![rational(27, 2), rational(0, 1), rational(1, 2), rational(0, 1)])
        );
        // and its square is the norm of alpha^2
        let alpha2 = k.mul(&k.gen(), &k.gen());
        assert_eq!(kr.mul(&tn_alpha, &tn_alpha), rd.type_norm(&alpha2).unwrap());
    }

    #[test]
    fn type_norm_is_multiplicative() {
        let k = fixture_field();
        let rd = CMType::positive_imaginary(k.clone()).unwrap().reflex().unwrap();
        let kr = rd.reflex_field();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..500 {
            let x = random_element(&k, &mut rng);
            let y = random_element(&k, &mut rng);
            let txy = rd.type_norm(&k.mul(&x, &y)).unwrap();
            assert_eq!(txy, kr.mul(&rd.type_norm(&x).unwrap(), &rd.type_norm(&y).unwrap()));
        }
    }

    #[test]
    fn type_norm_times_conjugate_is_field_norm() {
        let k = fixture_field();
        let rd = CMType::positive_imaginary(k.clone()).unwrap().reflex().unwrap();
        let kr = rd.reflex_field();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            let x = random_element(&k, &mut rng);
            let t = rd.type_norm(&x).unwrap();
            assert_eq!(kr.mul(&t, &kr.conjugate(&t)), kr.from_rational(k.norm(&x)));
        }
    }

    #[test]
    fn type_norm_matches_embeddings_numerically() {
        let k = fixture_field();
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for phi in CMType::all_types(&k).unwrap() {
            let rd = phi.reflex().unwrap();
            for _ in 0..10 {
                let x = random_element(&k, &mut rng);
                let exact = rd.type_norm(&x).unwrap();
                let lhs = rd.reflex_field().embed(&exact, rd.canonical_embedding(), 200);
                let rhs = phi.numeric_type_norm(&x, 200);
                assert!(lhs.close_to(&rhs, 150), "type {:?}", phi.indices());
            }
        }
    }

    #[test]
    fn reflex_type_norm_fixture_values() {
        let k = fixture_field();
        let rd = CMType::positive_imaginary(k.clone()).unwrap().reflex().unwrap();
        let kr = rd.reflex_field();
        let t = kr.gen();

        // N_{Phi^r}(t) = (alpha + Y)(alpha - Y) = 2 alpha^2 + A
        let rt = rd.reflex_type_norm(&t).unwrap();
        assert_eq!(rt, k.element_from_int(&[27, 0, 2, 0]));
        // composing back: N_Phi(N_{Phi^r}(t)) = N(t) * t / conj(t) = 4B - A^2
        let back = rd.type_norm(&rt).unwrap();
        assert_eq!(back, kr.from_rational(rational(-521, 1)));
        // numeric agreement of the reflex norm with its defining product
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for _ in 0..10 {
            let y = random_element(kr, &mut rng);
            let exact = rd.reflex_type_norm(&y).unwrap();
            let mut prod = Complex::one(200);
            for &j in rd.reflex_type().indices() {
                prod = prod.mul(&kr.embed(&y, j, 200));
            }
            assert!(k.embed(&exact, 0, 200).close_to(&prod, 150));
        }
    }

    #[test]
    fn reflex_norms_lemma_on_ideals() {
        let k = fixture_field();
        let rd = CMType::positive_imaginary(k.clone()).unwrap().reflex().unwrap();
        let kr = rd.reflex_field();
        let mut rng = ChaCha8Rng::seed_from_u64(45);

        // N_{Phi^r}(N_Phi(b)) = N(b) * b / conj(b) for ideals of K
        for trial in 0..5 {
            let x = random_element(&k, &mut rng);
            if x.is_zero() {
                continue;
            }
            let m = k.from_rational(rational(rng.gen_range(2..30), 1));
            let mut b = FracIdeal::from_generators(&k, &[x, m]).unwrap();
            if trial == 4 {
                // exercise the fractional path too
                b = b.mul(&k, &FracIdeal::from_integer(&k, &BigInt::from(6)).unwrap().inverse(&k));
            }
            let lhs = rd.reflex_type_norm_ideal(&rd.type_norm_ideal(&b).unwrap()).unwrap();
            let nb = FracIdeal::principal(&k, &k.from_rational(b.norm(&k))).unwrap();
            let rhs = nb.mul(&k, &b).mul(&k, &b.conjugate(&k).inverse(&k));
            assert_eq!(lhs, rhs, "trial {trial}");
        }

        // and with the roles of the two fields swapped
        for _ in 0..3 {
            let y = random_element(kr, &mut rng);
            if y.is_zero() {
                continue;
            }
            let m = kr.from_rational(rational(rng.gen_range(2..30), 1));
            let a = FracIdeal::from_generators(kr, &[y, m]).unwrap();
            let lhs = rd.type_norm_ideal(&rd.reflex_type_norm_ideal(&a).unwrap()).unwrap();
            let na = FracIdeal::principal(kr, &kr.from_rational(a.norm(kr))).unwrap();
            let rhs = na.mul(kr, &a).mul(kr, &a.conjugate(kr).inverse(kr));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn ideal_norms_are_homomorphisms() {
        let k = fixture_field();
        let rd = CMType::positive_imaginary(k.clone()).unwrap().reflex().unwrap();
        let kr = rd.reflex_field();

        assert!(rd.type_norm_ideal(&FracIdeal::whole(&k)).unwrap().is_whole(kr));
        assert!(rd.reflex_type_norm_ideal(&FracIdeal::whole(kr)).unwrap().is_whole(&k));

        // principal ideals map to the principal ideal of the element norm
        let y = kr.element_from_int(&[1, 1, 0, 0]);
        let py = FracIdeal::principal(kr, &y).unwrap();
        assert_eq!(
            rd.reflex_type_norm_ideal(&py).unwrap(),
            FracIdeal::principal(&k, &rd.reflex_type_norm(&y).unwrap()).unwrap()
        );

        let mut rng = ChaCha8Rng::seed_from_u64(46);
        let mut ideals = Vec::new();
        for _ in 0..2 {
            let x = random_element(&k, &mut rng);
            let m = k.from_rational(rational(rng.gen_range(2..20), 1));
            ideals.push(FracIdeal::from_generators(&k, &[x, m]).unwrap());
        }
        let prod = rd.type_norm_ideal(&ideals[0].mul(&k, &ideals[1])).unwrap();
        let sep = rd
            .type_norm_ideal(&ideals[0])
            .unwrap()
            .mul(kr, &rd.type_norm_ideal(&ideals[1]).unwrap());
        assert_eq!(prod, sep);
    }

    #[test]
    fn cyclic_quartic_reflex() {
        // B(A^2 - 4B) = 25 is a square: cyclic Galois group, and the
        // splitting algebra degenerates to K x K without harming exactness
        let k = NumberField::new(&[5, 0, 5, 0, 1]).unwrap();
        assert_eq!(k.quartic_galois_type(), Some(QuarticGaloisType::Cyclic));
        let rd = CMType::positive_imaginary(k.clone()).unwrap().reflex().unwrap();
        let kr = rd.reflex_field();
        assert_eq!(
            (0..5).map(|i| kr.poly().coeff(i).to_integer()).collect::<Vec<_>>(),
            vec![BigInt::from(5), BigInt::zero(), BigInt::from(10), BigInt::zero(), BigInt::one()]
        );
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..20 {
            let x = random_element(&k, &mut rng);
            let y = random_element(&k, &mut rng);
            let txy = rd.type_norm(&k.mul(&x, &y)).unwrap();
            assert_eq!(txy, kr.mul(&rd.type_norm(&x).unwrap(), &rd.type_norm(&y).unwrap()));
        }
        let b = FracIdeal::from_generators(&k, &[k.element_from_int(&[1, 1, 0, 0])]).unwrap();
        let lhs = rd.reflex_type_norm_ideal(&rd.type_norm_ideal(&b).unwrap()).unwrap();
        let nb = FracIdeal::principal(&k, &k.from_rational(b.norm(&k))).unwrap();
        let rhs = nb.mul(&k, &b).mul(&k, &b.conjugate(&k).inverse(&k));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn imaginary_quadratic_reflex_is_trivial() {
        let k = gaussian_field();
        for (idx, conj) in [(0usize, false), (1usize, true)] {
            let phi = CMType::new(k.clone(), &[idx]).unwrap();
            let rd = phi.reflex().unwrap();
            assert_eq!(rd.reflex_field().poly(), k.poly());
            assert_eq!(rd.reflex_type().indices(), &[idx]);
            assert!(rd.real_subfield().is_none());

            let x = k.element_from_int(&[2, 1]);
            let tn = rd.type_norm(&x).unwrap();
            assert_eq!(tn, if conj { k.conjugate(&x) } else { x.clone() });
            // the reflex norm inverts the type norm
            assert_eq!(rd.reflex_type_norm(&tn).unwrap(), x);

            let p = FracIdeal::principal(&k, &x).unwrap();
            let tp = rd.type_norm_ideal(&p).unwrap();
            assert_eq!(tp, FracIdeal::principal(&k, &tn).unwrap());
            assert_eq!(rd.reflex_type_norm_ideal(&tp).unwrap(), p);
        }
    }

    #[test]
    fn pairing_is_alternating_and_bilinear() {
        let k = fixture_field();
        let mut rng = ChaCha8Rng::seed_from_u64(48);
        // any totally imaginary xi: odd coordinates only
        let xi = k.element(vec![rational(0, 1), rational(1, 3), rational(0, 1), rational(2, 7)]);
        for _ in 0..20 {
            let x = random_element(&k, &mut rng);
            let y = random_element(&k, &mut rng);
            assert!(pairing_value(&k, &xi, &x, &x).is_zero());
            assert_eq!(
                pairing_value(&k, &xi, &x, &y),
                -pairing_value(&k, &xi, &y, &x)
            );
            // scaling xi scales the pairing
            let c = rational(5, 2);
            assert_eq!(
                pairing_value(&k, &k.scale(&xi, &c), &x, &y),
                pairing_value(&k, &xi, &x, &y) * &c
            );
        }
    }

    #[test]
    fn pairing_matrix_reports_non_integral_entries() {
        let k = gaussian_field();
        let xi = k.element(vec![rational(0, 1), rational(1, 3)]);
        let basis = vec![k.one(), k.gen()];
        match pairing_matrix(&k, &xi, &basis) {
            Err(Error::PolarizationDefect(msg)) => assert!(msg.contains("(0, 1)"), "{msg}"),
            other => panic!("expected a polarization defect, got {other:?}"),
        }
    }

    #[test]
    fn gaussian_polarization_search() {
        let k = gaussian_field();
        let whole = FracIdeal::whole(&k);
        let phi = CMType::new(k.clone(), &[0]).unwrap();
        assert!(search_polarizations(&phi, &whole, 0).unwrap().is_empty());

        let found = search_polarizations(&phi, &whole, 2).unwrap();
        let half_i = k.element(vec![rational(0, 1), rational(1, 2)]);
        assert!(found.contains(&half_i), "xi = i/2 realizes the principal polarization");
        for xi in &found {
            assert!(k.add(&k.conjugate(xi), xi).is_zero());
            let gram = pairing_matrix(&k, xi, &[k.one(), k.gen()]).unwrap();
            let d = gram.at(0, 1) * gram.at(1, 0);
            assert_eq!(d, -BigInt::one());
        }

        // the conjugate type wants the conjugate polarization 1/(2i)
        let phi_bar = CMType::new(k.clone(), &[1]).unwrap();
        let found_bar = search_polarizations(&phi_bar, &whole, 2).unwrap();
        assert!(found_bar.contains(&k.neg(&half_i)));
    }

    #[test]
    fn gaussian_cm_point_validation() {
        let k = gaussian_field();
        let whole = FracIdeal::whole(&k);
        let phi = CMType::new(k.clone(), &[0]).unwrap();
        let half_i = k.element(vec![rational(0, 1), rational(1, 2)]);

        // basis (i, 1) has Gram exactly Omega
        let point = CMPoint::new(
            phi.clone(),
            whole.clone(),
            half_i.clone(),
            vec![k.gen(), k.one()],
        )
        .unwrap();
        assert_eq!(point.g(), 1);

        // swapped basis gives -Omega
        assert!(matches!(
            CMPoint::new(phi.clone(), whole.clone(), half_i.clone(), vec![k.one(), k.gen()]),
            Err(Error::NotSymplectic(_))
        ));
        // wrong sign of xi is not positive on the type
        assert!(matches!(
            CMPoint::new(phi.clone(), whole.clone(), k.neg(&half_i), vec![k.gen(), k.one()]),
            Err(Error::PolarizationDefect(_))
        ));
        // index-2 sublattice basis is rejected
        assert!(matches!(
            CMPoint::new(
                phi.clone(),
                whole.clone(),
                half_i.clone(),
                vec![k.scale(&k.gen(), &rational(2, 1)), k.one()]
            ),
            Err(Error::InvalidInput(_))
        ));
        // vector outside the lattice is rejected
        assert!(matches!(
            CMPoint::new(phi, whole, half_i.clone(), vec![k.scale(&k.gen(), &rational(1, 2)), k.one()]),
            Err(Error::InvalidInput(_))
        ));
    }
}
