//! Symplectic matrix groups, period matrices, and Siegel reduction.
//!
//! `GSp_2g` elements carry their multiplier `nu` (defined by
//! `A^t Omega A = nu Omega`) and come in two flavours: exact rational
//! matrices (integral ones are the `Z` case) and matrices over `Z/NZ` that
//! remember their modulus. The module also computes symplectic bases of
//! integral alternating forms (Frobenius normal form), period matrices
//! `tau = (Phi(b_{g+1})|..|Phi(b_2g))^-1 (Phi(b_1)|..|Phi(b_g))` of CM
//! points, the fractional-linear action `(a tau + b)(c tau + d)^-1` on the
//! Siegel upper half space, and reduction to the classical fundamental
//! domain (Minkowski + translation + Gottschling inversions for g = 2).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{CMatrix, Complex, Real};
use crate::cmtypes::CMType;
use crate::error::{Error, Result};
use crate::linalg::{QMat, ZMat};
use crate::numfield::{FieldElement, NumberField};

/// Iteration cap for the fundamental-domain reduction.
const REDUCE_CAP: usize = 10_000;

/// `Omega = [[0, I], [-I, 0]]` over the rationals.
fn omega_q(g: usize) -> QMat {
    let mut m = QMat::zero(2 * g, 2 * g);
    for i in 0..g {
        *m.at_mut(i, g + i) = BigRational::one();
        *m.at_mut(g + i, i) = -BigRational::one();
    }
    m
}

/// An element of `GSp_2g(Q)`: `A^t Omega A = nu Omega` with `nu != 0`.
/// Integer matrices represent the `GSp_2g(Z)` case.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SympMatrix {
    mat: QMat,
    nu: BigRational,
}

impl SympMatrix {
    /// Verifies the defining relation and reads off the multiplier.
    pub fn new(mat: QMat) -> Result<SympMatrix> {
        let n = mat.rows;
        if n != mat.cols || n == 0 || n % 2 != 0 {
            return Err(Error::InvalidInput("symplectic matrices have even size".into()));
        }
        let g = n / 2;
        let om = omega_q(g);
        let s = mat.transpose().mul(&om).mul(&mat);
        let nu = s.at(0, g).clone();
        if nu.is_zero() || s != om.scale(&nu) {
            return Err(Error::NotSymplectic(format!(
                "matrix does not satisfy A^t Omega A = nu Omega (nu = {nu})"
            )));
        }
        Ok(SympMatrix { mat, nu })
    }

    pub fn from_int_rows(rows: &[Vec<BigInt>]) -> Result<SympMatrix> {
        SympMatrix::new(QMat::from_int_rows(rows))
    }

    pub fn from_zmat(m: &ZMat) -> Result<SympMatrix> {
        SympMatrix::from_int_rows(&m.rows_vec())
    }

    pub fn identity(g: usize) -> SympMatrix {
        SympMatrix { mat: QMat::identity(2 * g), nu: BigRational::one() }
    }

    /// The form matrix `Omega` itself, as the standard involution.
    pub fn omega(g: usize) -> SympMatrix {
        SympMatrix { mat: omega_q(g), nu: BigRational::one() }
    }

    /// The section `i(t) = [[I, 0], [0, t I]]` of the multiplier map, with
    /// `nu(i(t)) = t`.
    pub fn section_i(g: usize, t: &BigRational) -> Result<SympMatrix> {
        if t.is_zero() {
            return Err(Error::InvalidInput("section of the multiplier needs a unit".into()));
        }
        let mut m = QMat::identity(2 * g);
        for i in g..2 * g {
            *m.at_mut(i, i) = t.clone();
        }
        Ok(SympMatrix { mat: m, nu: t.clone() })
    }

    pub fn g(&self) -> usize {
        self.mat.rows / 2
    }

    pub fn mat(&self) -> &QMat {
        &self.mat
    }

    pub fn nu(&self) -> &BigRational {
        &self.nu
    }

    pub fn is_integral(&self) -> bool {
        self.mat.denominator_lcm().is_one()
    }

    fn block(&self, r0: usize, c0: usize) -> QMat {
        let g = self.g();
        let mut m = QMat::zero(g, g);
        for i in 0..g {
            for j in 0..g {
                *m.at_mut(i, j) = self.mat.at(r0 + i, c0 + j).clone();
            }
        }
        m
    }

    pub fn a(&self) -> QMat {
        self.block(0, 0)
    }

    pub fn b(&self) -> QMat {
        self.block(0, self.g())
    }

    pub fn c(&self) -> QMat {
        self.block(self.g(), 0)
    }

    pub fn d(&self) -> QMat {
        self.block(self.g(), self.g())
    }

    pub fn mul(&self, other: &SympMatrix) -> SympMatrix {
        SympMatrix { mat: self.mat.mul(&other.mat), nu: &self.nu * &other.nu }
    }

    /// Exact inverse `A^-1 = nu^-1 (-Omega) A^t Omega`.
    pub fn inverse(&self) -> SympMatrix {
        let g = self.g();
        let om = omega_q(g);
        let inv = om
            .scale(&-BigRational::one())
            .mul(&self.mat.transpose())
            .mul(&om)
            .scale(&self.nu.recip());
        SympMatrix { mat: inv, nu: self.nu.recip() }
    }

    /// The transpose, which is again nu-symplectic.
    pub fn transpose(&self) -> SympMatrix {
        SympMatrix { mat: self.mat.transpose(), nu: self.nu.clone() }
    }

    /// Entry-wise reduction to `Z/NZ`; the matrix must be integral and the
    /// multiplier a unit mod `N`.
    pub fn reduce_mod(&self, modulus: &BigInt) -> Result<SympMatrixModN> {
        if !self.is_integral() {
            return Err(Error::InvalidInput("cannot reduce a non-integral matrix".into()));
        }
        let rows: Vec<Vec<BigInt>> = (0..self.mat.rows)
            .map(|i| self.mat.row(i).iter().map(|q| q.to_integer()).collect())
            .collect();
        SympMatrixModN::new(modulus.clone(), ZMat::from_rows(rows))
    }
}

/// An element of `GSp_2g(Z/NZ)`, carrying its modulus; operations between
/// different moduli are rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SympMatrixModN {
    modulus: BigInt,
    mat: ZMat,
    nu: BigInt,
}

pub(crate) fn mod_inverse(x: &BigInt, n: &BigInt) -> Option<BigInt> {
    let e = x.extended_gcd(n);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(n))
    } else {
        None
    }
}

impl SympMatrixModN {
    pub fn new(modulus: BigInt, mat: ZMat) -> Result<SympMatrixModN> {
        if modulus < BigInt::from(2) {
            return Err(Error::InvalidInput("modulus must be at least 2".into()));
        }
        let n = mat.rows;
        if n != mat.cols || n == 0 || n % 2 != 0 {
            return Err(Error::InvalidInput("symplectic matrices have even size".into()));
        }
        let g = n / 2;
        let mut red = ZMat::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                *red.at_mut(i, j) = mat.at(i, j).mod_floor(&modulus);
            }
        }
        let mut om = ZMat::zero(n, n);
        for i in 0..g {
            *om.at_mut(i, g + i) = BigInt::one();
            *om.at_mut(g + i, i) = -BigInt::one();
        }
        let s = red.transpose().mul(&om).mul(&red);
        let nu = s.at(0, g).mod_floor(&modulus);
        for i in 0..n {
            for j in 0..n {
                let want = (&nu * om.at(i, j)).mod_floor(&modulus);
                if s.at(i, j).mod_floor(&modulus) != want {
                    return Err(Error::NotSymplectic(
                        "matrix is not nu-symplectic mod N".into(),
                    ));
                }
            }
        }
        if mod_inverse(&nu, &modulus).is_none() {
            return Err(Error::NotInvertible { modulus });
        }
        Ok(SympMatrixModN { modulus, mat: red, nu })
    }

    pub fn identity(g: usize, modulus: BigInt) -> Result<SympMatrixModN> {
        SympMatrixModN::new(modulus, ZMat::identity(2 * g))
    }

    /// `i(t) = [[I, 0], [0, t I]]` with `t` a unit mod `N`.
    pub fn section_i(g: usize, modulus: BigInt, t: &BigInt) -> Result<SympMatrixModN> {
        if mod_inverse(t, &modulus).is_none() {
            return Err(Error::NotInvertible { modulus });
        }
        let mut m = ZMat::identity(2 * g);
        for i in g..2 * g {
            *m.at_mut(i, i) = t.clone();
        }
        SympMatrixModN::new(modulus, m)
    }

    pub fn g(&self) -> usize {
        self.mat.rows / 2
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    pub fn mat(&self) -> &ZMat {
        &self.mat
    }

    pub fn nu(&self) -> &BigInt {
        &self.nu
    }

    fn block(&self, r0: usize, c0: usize) -> ZMat {
        let g = self.g();
        let mut m = ZMat::zero(g, g);
        for i in 0..g {
            for j in 0..g {
                *m.at_mut(i, j) = self.mat.at(r0 + i, c0 + j).clone();
            }
        }
        m
    }

    pub fn a(&self) -> ZMat {
        self.block(0, 0)
    }

    pub fn b(&self) -> ZMat {
        self.block(0, self.g())
    }

    pub fn c(&self) -> ZMat {
        self.block(self.g(), 0)
    }

    pub fn d(&self) -> ZMat {
        self.block(self.g(), self.g())
    }

    pub fn mul(&self, other: &SympMatrixModN) -> Result<SympMatrixModN> {
        if self.modulus != other.modulus {
            return Err(Error::InvalidInput(format!(
                "mixed moduli {} and {}",
                self.modulus, other.modulus
            )));
        }
        SympMatrixModN::new(self.modulus.clone(), self.mat.mul(&other.mat))
    }

    /// `A^-1 = nu^-1 (-Omega) A^t Omega mod N`.
    pub fn inverse(&self) -> SympMatrixModN {
        let n = self.mat.rows;
        let g = n / 2;
        let ninv = mod_inverse(&self.nu, &self.modulus).expect("multiplier is a unit");
        let mut om = ZMat::zero(n, n);
        for i in 0..g {
            *om.at_mut(i, g + i) = BigInt::one();
            *om.at_mut(g + i, i) = -BigInt::one();
        }
        let mut mom = ZMat::zero(n, n);
        for i in 0..g {
            *mom.at_mut(i, g + i) = -BigInt::one();
            *mom.at_mut(g + i, i) = BigInt::one();
        }
        let raw = mom.mul(&self.mat.transpose()).mul(&om);
        let mut inv = ZMat::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                *inv.at_mut(i, j) = (raw.at(i, j) * &ninv).mod_floor(&self.modulus);
            }
        }
        SympMatrixModN::new(self.modulus.clone(), inv).expect("inverse stays symplectic")
    }
}

/// A point of the Siegel upper half space: symmetric `g x g` complex matrix
/// with positive definite imaginary part, at a stated working precision.
#[derive(Clone, Debug)]
pub struct PeriodMatrix {
    tau: CMatrix,
    prec: u32,
}

/// Cholesky test for positive definiteness of the imaginary part.
fn im_positive_definite(tau: &CMatrix) -> bool {
    let n = tau.rows;
    let mut y: Vec<Vec<Real>> = (0..n)
        .map(|i| (0..n).map(|j| tau.at(i, j).im.clone()).collect())
        .collect();
    for k in 0..n {
        let mut d = y[k][k].clone();
        for j in 0..k {
            d = d.sub(&y[k][j].sqr());
        }
        if d.is_zero() || d.is_negative() {
            return false;
        }
        y[k][k] = d.sqrt();
        for i in k + 1..n {
            let mut v = y[i][k].clone();
            for j in 0..k {
                v = v.sub(&y[i][j].mul(&y[k][j]));
            }
            y[i][k] = v.div(&y[k][k]);
        }
    }
    true
}

impl PeriodMatrix {
    /// Validates symmetry to `2^(-3 prec/4)` and positive definiteness of
    /// the imaginary part.
    pub fn new(tau: CMatrix) -> Result<PeriodMatrix> {
        if tau.rows != tau.cols || tau.rows == 0 {
            return Err(Error::InvalidInput("period matrices are square".into()));
        }
        let prec = tau.prec();
        let tol = 3 * i64::from(prec) / 4;
        for i in 0..tau.rows {
            for j in (i + 1)..tau.cols {
                if !tau.at(i, j).sub(tau.at(j, i)).re.abs_below_pow2(-tol)
                    || !tau.at(i, j).sub(tau.at(j, i)).im.abs_below_pow2(-tol)
                {
                    return Err(Error::Numerical(format!(
                        "period matrix is not symmetric at entry ({i}, {j})"
                    )));
                }
            }
        }
        if !im_positive_definite(&tau) {
            return Err(Error::Numerical(
                "imaginary part of the period matrix is not positive definite".into(),
            ));
        }
        Ok(PeriodMatrix { tau, prec })
    }

    pub fn tau(&self) -> &CMatrix {
        &self.tau
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn g(&self) -> usize {
        self.tau.rows
    }

    pub fn at(&self, i: usize, j: usize) -> &Complex {
        self.tau.at(i, j)
    }

    pub fn with_prec(&self, prec: u32) -> PeriodMatrix {
        PeriodMatrix { tau: self.tau.with_prec(prec), prec }
    }
}

/// Unimodular `C` with `C E C^t = Omega` for an integral alternating
/// nondegenerate `E` of determinant 1, by pivoted hyperbolic-pair reduction
/// (Frobenius alternating normal form).
pub fn symplectic_transform(e: &ZMat) -> Result<ZMat> {
    let n = e.rows;
    if n != e.cols || n == 0 || n % 2 != 0 {
        return Err(Error::InvalidInput("alternating form must have even size".into()));
    }
    for i in 0..n {
        for j in 0..n {
            if e.at(i, j) != &(-e.at(j, i)) {
                return Err(Error::InvalidInput("form is not alternating".into()));
            }
        }
    }
    let g = n / 2;
    let mut m = e.clone();
    let mut c = ZMat::identity(n);

    // congruence row+column operation helpers keep m = c e c^t
    let row_addmul = |m: &mut ZMat, c: &mut ZMat, dst: usize, src: usize, k: &BigInt| {
        m.addmul_row(dst, src, k);
        let col: Vec<BigInt> = (0..m.rows).map(|i| m.at(i, src).clone()).collect();
        for (i, v) in col.iter().enumerate() {
            let cur = m.at(i, dst).clone();
            *m.at_mut(i, dst) = cur + k * v;
        }
        c.addmul_row(dst, src, k);
    };
    let row_swap = |m: &mut ZMat, c: &mut ZMat, a: usize, b: usize| {
        m.swap_rows(a, b);
        for i in 0..m.rows {
            let tmp = m.at(i, a).clone();
            *m.at_mut(i, a) = m.at(i, b).clone();
            *m.at_mut(i, b) = tmp;
        }
        c.swap_rows(a, b);
    };

    for k in 0..g {
        let base = 2 * k;
        loop {
            // smallest nonzero pivot in the remaining block
            let mut pivot: Option<(usize, usize)> = None;
            for i in base..n {
                for j in (i + 1)..n {
                    if !m.at(i, j).is_zero()
                        && pivot
                            .map(|(pi, pj)| m.at(i, j).abs() < m.at(pi, pj).abs())
                            .unwrap_or(true)
                    {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                return Err(Error::NotSymplectic("alternating form is degenerate".into()));
            };
            if pi != base {
                row_swap(&mut m, &mut c, base, pi);
            }
            if pj != base + 1 {
                row_swap(&mut m, &mut c, base + 1, pj);
            }
            if m.at(base, base + 1).is_negative() {
                // orient the pair
                row_swap(&mut m, &mut c, base, base + 1);
            }
            let d = m.at(base, base + 1).clone();

            // clear the two pivot columns below the pair; remainders smaller
            // than the pivot force another sweep with a smaller pivot
            let mut clean = true;
            for r in (base + 2)..n {
                let q1 = div_round(m.at(r, base + 1), &d);
                if !q1.is_zero() {
                    row_addmul(&mut m, &mut c, r, base, &-q1);
                }
                let q2 = div_round(m.at(r, base), &-&d);
                if !q2.is_zero() {
                    row_addmul(&mut m, &mut c, r, base + 1, &-q2);
                }
                if !m.at(r, base).is_zero() || !m.at(r, base + 1).is_zero() {
                    clean = false;
                }
            }
            if clean {
                if !d.is_one() {
                    return Err(Error::NotSymplectic(format!(
                        "form is not principal: elementary divisor {d}"
                    )));
                }
                break;
            }
        }
    }

    // permute hyperbolic pairs (e1, f1, e2, f2, ...) to (e1, .., eg, f1, .., fg)
    let mut p = ZMat::zero(n, n);
    for k in 0..g {
        *p.at_mut(k, 2 * k) = BigInt::one();
        *p.at_mut(g + k, 2 * k + 1) = BigInt::one();
    }
    let c = p.mul(&c);

    // the contract, verified exactly
    let mut om = ZMat::zero(n, n);
    for i in 0..g {
        *om.at_mut(i, g + i) = BigInt::one();
        *om.at_mut(g + i, i) = -BigInt::one();
    }
    assert_eq!(c.mul(e).mul(&c.transpose()), om, "Gram of the new basis is Omega");
    Ok(c)
}

/// Nearest-integer division; the floor remainder shares the divisor's sign,
/// so rounding always adjusts upward.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    if BigInt::from(2) * r.abs() > b.abs() {
        q + BigInt::one()
    } else {
        q
    }
}

/// Rewrites lattice vectors into a symplectic basis for the alternating form
/// `E`, returning the new basis and the unimodular change matrix.
pub fn symplectic_basis(
    field: &NumberField,
    basis: &[FieldElement],
    e: &ZMat,
) -> Result<(Vec<FieldElement>, ZMat)> {
    let c = symplectic_transform(e)?;
    let n = basis.len();
    if n != e.rows {
        return Err(Error::InvalidInput("basis length must match the form size".into()));
    }
    let new_basis: Vec<FieldElement> = (0..n)
        .map(|i| {
            let mut acc = field.zero();
            for (j, b) in basis.iter().enumerate() {
                if !c.at(i, j).is_zero() {
                    acc = field.add(
                        &acc,
                        &field.scale(b, &BigRational::from_integer(c.at(i, j).clone())),
                    );
                }
            }
            acc
        })
        .collect();
    Ok((new_basis, c))
}

/// Period matrix of a symplectic basis:
/// `tau = (Phi(b_{g+1})|..|Phi(b_2g))^-1 (Phi(b_1)|..|Phi(b_g))`.
pub fn period_matrix(phi: &CMType, basis: &[FieldElement], prec: u32) -> Result<PeriodMatrix> {
    let g = phi.g();
    if basis.len() != 2 * g {
        return Err(Error::InvalidInput(format!("need {} basis vectors", 2 * g)));
    }
    let col = |b: &FieldElement| phi.apply(b, prec);
    let mut left = CMatrix::zero(g, g, prec);
    let mut right = CMatrix::zero(g, g, prec);
    for j in 0..g {
        for (i, v) in col(&basis[j]).into_iter().enumerate() {
            *left.at_mut(i, j) = v;
        }
        for (i, v) in col(&basis[g + j]).into_iter().enumerate() {
            *right.at_mut(i, j) = v;
        }
    }
    let rinv = right.inverse().ok_or_else(|| {
        Error::Numerical("right period block is singular: invalid basis ordering".into())
    })?;
    PeriodMatrix::new(rinv.mul(&left))
}

/// Fractional-linear action `A tau = (a tau + b)(c tau + d)^-1` of an
/// element of `GSp_2g(Q)` with positive multiplier.
pub fn act_on_h(a: &SympMatrix, tau: &PeriodMatrix) -> Result<PeriodMatrix> {
    if a.g() != tau.g() {
        return Err(Error::InvalidInput("dimension mismatch".into()));
    }
    if !a.nu().is_positive() {
        return Err(Error::InvalidInput(
            "action on the upper half space needs a positive multiplier".into(),
        ));
    }
    let prec = tau.prec();
    let to_c = |m: &QMat| {
        let mut out = CMatrix::zero(m.rows, m.cols, prec);
        for i in 0..m.rows {
            for j in 0..m.cols {
                *out.at_mut(i, j) =
                    Complex::from_rationals(m.at(i, j), &BigRational::zero(), prec);
            }
        }
        out
    };
    let num = to_c(&a.a()).mul(tau.tau()).add(&to_c(&a.b()));
    let den = to_c(&a.c()).mul(tau.tau()).add(&to_c(&a.d()));
    let dinv = den
        .inverse()
        .ok_or_else(|| Error::Numerical("c tau + d is singular".into()))?;
    PeriodMatrix::new(num.mul(&dinv))
}

/// Result of a fundamental-domain reduction.
#[derive(Clone, Debug)]
pub struct SiegelReduction {
    pub tau: PeriodMatrix,
    pub gamma: SympMatrix,
    /// false when the iteration cap was reached before the domain tests passed
    pub complete: bool,
    /// true when some Gottschling inequality held only within tolerance of
    /// the boundary wall
    pub on_boundary: bool,
}

/// The Gottschling-type inversion family for g = 2: full inversions composed
/// with the symmetric integer translations of entries 0, +-1, plus partial
/// inversions of either diagonal variable. The classical nineteen boundary
/// matrices of the genus-2 fundamental domain are among these.
fn gottschling_pool() -> Vec<ZMat> {
    let mut v = Vec::new();
    let z = BigInt::zero;
    for d11 in -1i64..=1 {
        for d22 in -1i64..=1 {
            for e in -1i64..=1 {
                v.push(ZMat::from_rows(vec![
                    vec![z(), z(), -BigInt::one(), z()],
                    vec![z(), z(), z(), -BigInt::one()],
                    vec![BigInt::one(), z(), BigInt::from(d11), BigInt::from(e)],
                    vec![z(), BigInt::one(), BigInt::from(e), BigInt::from(d22)],
                ]));
            }
        }
    }
    for t in -1i64..=1 {
        v.push(ZMat::from_rows(vec![
            vec![z(), z(), -BigInt::one(), z()],
            vec![z(), BigInt::one(), z(), z()],
            vec![BigInt::one(), z(), BigInt::from(t), z()],
            vec![z(), z(), z(), BigInt::one()],
        ]));
        v.push(ZMat::from_rows(vec![
            vec![BigInt::one(), z(), z(), z()],
            vec![z(), z(), z(), -BigInt::one()],
            vec![z(), z(), BigInt::one(), z()],
            vec![z(), BigInt::one(), z(), BigInt::from(t)],
        ]));
    }
    v
}

fn zmat_to_cmatrix(m: &ZMat, prec: u32) -> CMatrix {
    let mut out = CMatrix::zero(m.rows, m.cols, prec);
    for i in 0..m.rows {
        for j in 0..m.cols {
            *out.at_mut(i, j) = Complex::from_rationals(
                &BigRational::from_integer(m.at(i, j).clone()),
                &BigRational::zero(),
                prec,
            );
        }
    }
    out
}

/// Applies an integral symplectic matrix to `tau` numerically.
fn apply_zmat(m: &ZMat, tau: &CMatrix) -> Option<CMatrix> {
    let g = tau.rows;
    let prec = tau.prec();
    let block = |r0: usize, c0: usize| {
        let mut out = ZMat::zero(g, g);
        for i in 0..g {
            for j in 0..g {
                *out.at_mut(i, j) = m.at(r0 + i, c0 + j).clone();
            }
        }
        out
    };
    let num = zmat_to_cmatrix(&block(0, 0), prec)
        .mul(tau)
        .add(&zmat_to_cmatrix(&block(0, g), prec));
    let den = zmat_to_cmatrix(&block(g, 0), prec)
        .mul(tau)
        .add(&zmat_to_cmatrix(&block(g, g), prec));
    Some(num.mul(&den.inverse()?))
}

/// Minkowski (Lagrange) reduction of a 2x2 positive definite real matrix:
/// returns `U in GL_2(Z)` with `U^t Y U` reduced
/// (`0 <= 2 y12 <= y11 <= y22`).
fn minkowski_u(y: &[Vec<Real>]) -> ZMat {
    let mut y11 = y[0][0].clone();
    let mut y12 = y[0][1].clone();
    let mut y22 = y[1][1].clone();
    let mut u = ZMat::identity(2);
    for _ in 0..100 {
        let t = y12.div(&y11).round_int();
        let translated = !t.is_zero();
        if translated {
            // column op [[1, -t], [0, 1]]
            let tr = Real::from_bigint(&t, y11.prec());
            let y12n = y12.sub(&tr.mul(&y11));
            let y22n = y22.sub(&tr.mul(&y12).shl2(1)).add(&tr.sqr().mul(&y11));
            y12 = y12n;
            y22 = y22n;
            let mut v = ZMat::identity(2);
            *v.at_mut(0, 1) = -t;
            u = u.mul(&v);
        }
        if y11.cmp(&y22) == std::cmp::Ordering::Greater {
            std::mem::swap(&mut y11, &mut y22);
            let mut v = ZMat::zero(2, 2);
            *v.at_mut(0, 1) = BigInt::one();
            *v.at_mut(1, 0) = BigInt::one();
            u = u.mul(&v);
        } else if !translated {
            break;
        }
    }
    if y12.is_negative() {
        let mut v = ZMat::identity(2);
        *v.at_mut(1, 1) = -BigInt::one();
        u = u.mul(&v);
    }
    u
}

/// Embeds `U in GL_g(Z)` as the symplectic `[[U^t, 0], [0, U^-1]]`, acting
/// on `tau` as `U^t tau U`.
fn embed_gl(u: &ZMat) -> ZMat {
    let g = u.rows;
    let det = u.at(0, 0) * u.at(1, 1) - u.at(0, 1) * u.at(1, 0);
    assert!(det.abs().is_one(), "GL_2(Z) matrix");
    let mut inv = ZMat::zero(2, 2);
    *inv.at_mut(0, 0) = u.at(1, 1) / &det;
    *inv.at_mut(0, 1) = -u.at(0, 1) / &det;
    *inv.at_mut(1, 0) = -u.at(1, 0) / &det;
    *inv.at_mut(1, 1) = u.at(0, 0) / &det;
    let ut = u.transpose();
    let mut m = ZMat::zero(2 * g, 2 * g);
    for i in 0..g {
        for j in 0..g {
            *m.at_mut(i, j) = ut.at(i, j).clone();
            *m.at_mut(g + i, g + j) = inv.at(i, j).clone();
        }
    }
    m
}

/// Reduces `tau` into the classical fundamental domain, returning the
/// reduced point and the exact integral transformation.
///
/// For `g = 1` this is ordinary `SL_2(Z)` reduction; for `g = 2` it
/// alternates Minkowski reduction of `Im tau`, integer translation of
/// `Re tau`, and Gottschling-type inversions while `|det(c tau + d)| < 1`.
pub fn siegel_reduce(tau: &PeriodMatrix) -> Result<SiegelReduction> {
    let g = tau.g();
    let prec = tau.prec();
    // boundary tolerance for the fundamental-domain walls
    let tol = Real::one(prec).shl2(-i64::from(prec) / 2);
    let one = Real::one(prec);

    match g {
        1 => {
            let mut t = tau.at(0, 0).clone();
            let mut gamma = ZMat::identity(2);
            let mut complete = false;
            for _ in 0..REDUCE_CAP {
                let s = t.re.round_int();
                if !s.is_zero() {
                    t = Complex::new(t.re.sub(&Real::from_bigint(&s, prec)), t.im.clone());
                    let mut m = ZMat::identity(2);
                    *m.at_mut(0, 1) = -s;
                    gamma = m.mul(&gamma);
                }
                if t.norm2().cmp(&one.sub(&tol)) == std::cmp::Ordering::Less {
                    let mut m = ZMat::zero(2, 2);
                    *m.at_mut(0, 1) = -BigInt::one();
                    *m.at_mut(1, 0) = BigInt::one();
                    t = t.recip().neg();
                    gamma = m.mul(&gamma);
                } else {
                    complete = true;
                    break;
                }
            }
            let on_boundary = t.norm2().sub(&one).abs().cmp(&tol) != std::cmp::Ordering::Greater;
            Ok(SiegelReduction {
                tau: PeriodMatrix::new(CMatrix::new(1, 1, vec![t]))?,
                gamma: SympMatrix::from_zmat(&gamma)?,
                complete,
                on_boundary,
            })
        }
        2 => {
            let pool = gottschling_pool();
            let mut cur = tau.tau().clone();
            let mut gamma = ZMat::identity(4);
            let mut complete = false;
            for _ in 0..REDUCE_CAP {
                let mut acted = false;

                // Minkowski-reduce the imaginary part
                let y: Vec<Vec<Real>> = (0..2)
                    .map(|i| (0..2).map(|j| cur.at(i, j).im.clone()).collect())
                    .collect();
                let u = minkowski_u(&y);
                if u != ZMat::identity(2) {
                    let m = embed_gl(&u);
                    cur = apply_zmat(&m, &cur)
                        .ok_or_else(|| Error::Numerical("degenerate Minkowski step".into()))?;
                    gamma = m.mul(&gamma);
                    acted = true;
                }

                // translate the real part to |x| <= 1/2
                let mut s = ZMat::zero(2, 2);
                let mut any_shift = false;
                for i in 0..2 {
                    for j in 0..2 {
                        let r = cur.at(i, j).re.round_int();
                        if !r.is_zero() {
                            any_shift = true;
                        }
                        *s.at_mut(i, j) = r;
                    }
                }
                // symmetrize rounding drift
                let s01 = s.at(0, 1).clone();
                *s.at_mut(1, 0) = s01;
                if any_shift {
                    let mut m = ZMat::identity(4);
                    for i in 0..2 {
                        for j in 0..2 {
                            *m.at_mut(i, 2 + j) = -s.at(i, j);
                        }
                    }
                    cur = apply_zmat(&m, &cur)
                        .ok_or_else(|| Error::Numerical("translation failed".into()))?;
                    gamma = m.mul(&gamma);
                    acted = true;
                }

                // Gottschling inversions: apply the strongest violated wall
                let mut best: Option<(usize, Real)> = None;
                for (idx, m) in pool.iter().enumerate() {
                    let c = zmat_to_cmatrix(
                        &ZMat::from_rows(vec![m.row(2)[0..2].to_vec(), m.row(3)[0..2].to_vec()]),
                        prec,
                    );
                    let d = zmat_to_cmatrix(
                        &ZMat::from_rows(vec![m.row(2)[2..4].to_vec(), m.row(3)[2..4].to_vec()]),
                        prec,
                    );
                    let q = c.mul(&cur).add(&d).det().norm2();
                    if best.as_ref().map(|(_, b)| q.cmp(b) == std::cmp::Ordering::Less).unwrap_or(true)
                    {
                        best = Some((idx, q));
                    }
                }
                let (idx, q) = best.expect("pool is nonempty");
                if q.cmp(&one.sub(&tol)) == std::cmp::Ordering::Less {
                    cur = apply_zmat(&pool[idx], &cur)
                        .ok_or_else(|| Error::Numerical("Gottschling step failed".into()))?;
                    gamma = pool[idx].mul(&gamma);
                } else if !acted {
                    complete = true;
                    break;
                }
            }

            // boundary flag: any wall within tolerance of equality
            let mut on_boundary = false;
            for m in &pool {
                let c = zmat_to_cmatrix(
                    &ZMat::from_rows(vec![m.row(2)[0..2].to_vec(), m.row(3)[0..2].to_vec()]),
                    prec,
                );
                let d = zmat_to_cmatrix(
                    &ZMat::from_rows(vec![m.row(2)[2..4].to_vec(), m.row(3)[2..4].to_vec()]),
                    prec,
                );
                let q = c.mul(&cur).add(&d).det().norm2();
                if q.sub(&one).abs().cmp(&tol) != std::cmp::Ordering::Greater {
                    on_boundary = true;
                }
            }
            Ok(SiegelReduction {
                tau: PeriodMatrix::new(cur)?,
                gamma: SympMatrix::from_zmat(&gamma)?,
                complete,
                on_boundary,
            })
        }
        other => Err(Error::UnsupportedDegree(other)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    /// Random element of Sp_4(Z) as a word in Omega, translations, and
    /// GL-embeddings.
    fn random_sp4(rng: &mut ChaCha8Rng) -> SympMatrix {
        let mut m = SympMatrix::identity(2);
        for _ in 0..6 {
            let pick = rng.gen_range(0..3);
            let f = match pick {
                0 => SympMatrix::omega(2),
                1 => {
                    let mut t = QMat::identity(4);
                    let s11 = rng.gen_range(-2..=2);
                    let s12 = rng.gen_range(-2..=2);
                    let s22 = rng.gen_range(-2..=2);
                    *t.at_mut(0, 2) = q(s11, 1);
                    *t.at_mut(0, 3) = q(s12, 1);
                    *t.at_mut(1, 2) = q(s12, 1);
                    *t.at_mut(1, 3) = q(s22, 1);
                    SympMatrix::new(t).unwrap()
                }
                _ => {
                    let mut u = ZMat::identity(2);
                    *u.at_mut(0, 1) = BigInt::from(rng.gen_range(-2..=2i64));
                    SympMatrix::from_zmat(&embed_gl(&u)).unwrap()
                }
            };
            m = m.mul(&f);
        }
        m
    }

    fn sample_tau(prec: u32) -> PeriodMatrix {
        let c = |re: BigRational, im: BigRational| Complex::from_rationals(&re, &im, prec);
        PeriodMatrix::new(CMatrix::new(
            2,
            2,
            vec![
                c(q(1, 3), q(2, 1)),
                c(q(-1, 5), q(1, 3)),
                c(q(-1, 5), q(1, 3)),
                c(q(1, 7), q(3, 1)),
            ],
        ))
        .unwrap()
    }

    #[test]
    fn section_of_the_multiplier() {
        assert_eq!(SympMatrix::section_i(2, &q(1, 1)).unwrap(), SympMatrix::identity(2));
        for t in [2i64, 3, 5, 7] {
            let m = SympMatrix::section_i(2, &q(t, 1)).unwrap();
            assert_eq!(m.nu(), &q(t, 1));
        }
        let s = SympMatrix::section_i(2, &q(2, 1)).unwrap();
        let t = SympMatrix::section_i(2, &q(3, 5)).unwrap();
        assert_eq!(s.mul(&t), SympMatrix::section_i(2, &q(6, 5)).unwrap());
        assert!(SympMatrix::section_i(2, &q(0, 1)).is_err());

        // the same section over Z/8
        let n = BigInt::from(8);
        for t in [1i64, 3, 5, 7] {
            let m = SympMatrixModN::section_i(2, n.clone(), &BigInt::from(t)).unwrap();
            assert_eq!(m.nu(), &BigInt::from(t));
        }
        assert!(SympMatrixModN::section_i(2, n, &BigInt::from(2)).is_err());
    }

    #[test]
    fn multiplier_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for _ in 0..50 {
            let a = random_sp4(&mut rng).mul(&SympMatrix::section_i(2, &q(rng.gen_range(1..9), 1)).unwrap());
            let b = random_sp4(&mut rng).mul(&SympMatrix::section_i(2, &q(1, rng.gen_range(1..9))).unwrap());
            let ab = a.mul(&b);
            assert_eq!(ab.nu(), &(a.nu() * b.nu()));
            // and the product still satisfies the defining relation
            assert!(SympMatrix::new(ab.mat().clone()).is_ok());
        }
    }

    #[test]
    fn non_symplectic_matrices_are_rejected() {
        let mut m = QMat::identity(4);
        *m.at_mut(0, 1) = q(1, 1);
        assert!(matches!(SympMatrix::new(m), Err(Error::NotSymplectic(_))));
        let mut z = ZMat::identity(4);
        *z.at_mut(0, 1) = BigInt::one();
        assert!(SympMatrixModN::new(BigInt::from(8), z).is_err());
    }

    #[test]
    fn exact_inverses() {
        let mut rng = ChaCha8Rng::seed_from_u64(72);
        for _ in 0..20 {
            let a = random_sp4(&mut rng).mul(&SympMatrix::section_i(2, &q(rng.gen_range(1..5), 3)).unwrap());
            assert_eq!(a.mul(&a.inverse()), SympMatrix::identity(2));
            assert_eq!(a.transpose().nu(), a.nu());
        }
        let n = BigInt::from(8);
        for t in [1i64, 3, 5, 7] {
            let m = SympMatrixModN::section_i(2, n.clone(), &BigInt::from(t)).unwrap();
            assert_eq!(
                m.mul(&m.inverse()).unwrap(),
                SympMatrixModN::identity(2, n.clone()).unwrap()
            );
        }
    }

    #[test]
    fn mixed_moduli_are_rejected() {
        let a = SympMatrixModN::identity(2, BigInt::from(8)).unwrap();
        let b = SympMatrixModN::identity(2, BigInt::from(5)).unwrap();
        assert!(matches!(a.mul(&b), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn reduce_mod_keeps_the_multiplier() {
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        for _ in 0..10 {
            let t = 2 * rng.gen_range(0..4) + 1;
            let a = random_sp4(&mut rng).mul(&SympMatrix::section_i(2, &q(t, 1)).unwrap());
            let m = a.reduce_mod(&BigInt::from(8)).unwrap();
            assert_eq!(m.nu(), &a.nu().to_integer().mod_floor(&BigInt::from(8)));
        }
        // non-integral matrices cannot be reduced
        let h = SympMatrix::section_i(2, &q(1, 2)).unwrap();
        assert!(h.reduce_mod(&BigInt::from(8)).is_err());
    }

    #[test]
    fn symplectic_transform_normalizes_omega_itself() {
        let om = crate::cmtypes::omega_matrix(2);
        let c = symplectic_transform(&om).unwrap();
        // unimodular and Gram-correct (the function asserts the Gram)
        let det = QMat::from_int_rows(&c.rows_vec()).det();
        assert_eq!(det.abs(), BigRational::one());
    }

    #[test]
    fn symplectic_transform_on_random_unimodular_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(74);
        let om = crate::cmtypes::omega_matrix(2);
        for _ in 0..200 {
            // E = C Omega C^t for random unimodular C
            let mut c = ZMat::identity(4);
            for _ in 0..8 {
                let i = rng.gen_range(0..4);
                let j = rng.gen_range(0..4);
                if i != j {
                    c.addmul_row(i, j, &BigInt::from(rng.gen_range(-3..=3i64)));
                }
            }
            let e = c.mul(&om).mul(&c.transpose());
            // the Gram identity is asserted inside
            symplectic_transform(&e).unwrap();
        }
    }

    #[test]
    fn symplectic_transform_rejects_bad_forms() {
        // degenerate
        assert!(symplectic_transform(&ZMat::zero(4, 4)).is_err());
        // non-principal: 2 * Omega
        let mut m = ZMat::zero(4, 4);
        for i in 0..2 {
            *m.at_mut(i, 2 + i) = BigInt::from(2);
            *m.at_mut(2 + i, i) = BigInt::from(-2);
        }
        assert!(matches!(symplectic_transform(&m), Err(Error::NotSymplectic(_))));
        // not alternating
        assert!(symplectic_transform(&ZMat::identity(4)).is_err());
    }

    #[test]
    fn gaussian_period_matrix_is_i() {
        let k = NumberField::new(&[1, 0, 1]).unwrap();
        let phi = CMType::new(k.clone(), &[0]).unwrap();
        let tau = period_matrix(&phi, &[k.gen(), k.one()], 128).unwrap();
        let i_val = Complex::from_rationals(&BigRational::zero(), &BigRational::one(), 128);
        assert!(tau.at(0, 0).close_to(&i_val, 120));
        // basis (2i, 1) gives tau = 2i
        let two_i = k.scale(&k.gen(), &q(2, 1));
        let tau2 = period_matrix(&phi, &[two_i.clone(), k.one()], 128).unwrap();
        assert!(tau2.at(0, 0).close_to(&i_val.mul_i64(2), 120));
        // swapping the halves reverses the orientation and lands in the
        // lower half space, which the validator rejects
        assert!(period_matrix(&phi, &[k.one(), two_i], 128).is_err());
    }

    #[test]
    fn action_identity_and_involution() {
        let tau = sample_tau(192);
        let id = act_on_h(&SympMatrix::identity(2), &tau).unwrap();
        assert!(id.tau().max_entry_distance(tau.tau()).abs_below_pow2(-180));

        // Omega tau = -tau^-1
        let om = act_on_h(&SympMatrix::omega(2), &tau).unwrap();
        let inv = tau.tau().inverse().unwrap();
        let want = CMatrix::zero(2, 2, 192).sub(&inv);
        assert!(om.tau().max_entry_distance(&want).abs_below_pow2(-170));
    }

    #[test]
    fn action_is_a_cocycle() {
        let tau = sample_tau(192);
        let mut rng = ChaCha8Rng::seed_from_u64(75);
        for _ in 0..500 {
            let a = random_sp4(&mut rng);
            let b = random_sp4(&mut rng);
            let lhs = act_on_h(&a, &act_on_h(&b, &tau).unwrap()).unwrap();
            let rhs = act_on_h(&a.mul(&b), &tau).unwrap();
            assert!(lhs.tau().max_entry_distance(rhs.tau()).abs_below_pow2(-150));
        }
    }

    #[test]
    fn genus_one_reduction() {
        let prec = 128;
        let c = |re: BigRational, im: BigRational| Complex::from_rationals(&re, &im, prec);
        // tau = (-1 + i)/1000
        let tau = PeriodMatrix::new(CMatrix::new(1, 1, vec![c(q(-1, 1000), q(1, 1000))])).unwrap();
        let red = siegel_reduce(&tau).unwrap();
        assert!(red.complete);
        let t = red.tau.at(0, 0);
        let one = Real::one(prec);
        let slack = one.shl2(-60);
        assert!(t.norm2().cmp(&one.sub(&slack)) != std::cmp::Ordering::Less);
        let half = Real::from_rational(&q(1, 2), prec).add(&slack);
        assert!(t.re.abs().cmp(&half) != std::cmp::Ordering::Greater);
        // gamma really maps tau to the reduced point
        let moved = act_on_h(&red.gamma, &tau).unwrap();
        assert!(moved.tau().max_entry_distance(red.tau.tau()).abs_below_pow2(-100));

        // already reduced: identity transformation
        let inside = PeriodMatrix::new(CMatrix::new(1, 1, vec![c(q(1, 3), q(3, 1))])).unwrap();
        let red2 = siegel_reduce(&inside).unwrap();
        assert_eq!(red2.gamma, SympMatrix::identity(1));
        // integer shift is recovered exactly
        let shifted = PeriodMatrix::new(CMatrix::new(1, 1, vec![c(q(16, 3), q(3, 1))])).unwrap();
        let red3 = siegel_reduce(&shifted).unwrap();
        let mut want = QMat::identity(2);
        *want.at_mut(0, 1) = q(-5, 1);
        assert_eq!(red3.gamma, SympMatrix::new(want).unwrap());
    }

    #[test]
    fn pool_matrices_are_symplectic() {
        for m in gottschling_pool() {
            let s = SympMatrix::from_zmat(&m).unwrap();
            assert_eq!(s.nu(), &BigRational::one());
        }
    }

    #[test]
    fn genus_two_reduction() {
        let prec = 192;
        let mut rng = ChaCha8Rng::seed_from_u64(76);
        let base = sample_tau(prec);
        for trial in 0..10 {
            // move a known interior-ish point far away with a random word
            let gamma = random_sp4(&mut rng);
            let moved = act_on_h(&gamma, &base).unwrap();
            let red = siegel_reduce(&moved).unwrap();
            assert!(red.complete, "trial {trial}");
            assert_eq!(red.gamma.nu(), &BigRational::one());
            assert!(red.gamma.is_integral());
            let roundtrip = act_on_h(&red.gamma, &moved).unwrap();
            assert!(
                roundtrip.tau().max_entry_distance(red.tau.tau()).abs_below_pow2(-120),
                "trial {trial}"
            );
            // real parts are in [-1/2, 1/2] up to tolerance
            let half = Real::from_rational(&q(1, 2), prec).add(&Real::one(prec).shl2(-60));
            for i in 0..2 {
                for j in 0..2 {
                    assert!(
                        red.tau.at(i, j).re.abs().cmp(&half) != std::cmp::Ordering::Greater,
                        "trial {trial}"
                    );
                }
            }
            // imaginary part is Minkowski-reduced up to tolerance
            let y11 = red.tau.at(0, 0).im.clone();
            let y12 = red.tau.at(0, 1).im.clone();
            let y22 = red.tau.at(1, 1).im.clone();
            let slack = Real::one(prec).shl2(-60);
            assert!(y12.shl2(1).cmp(&y11.add(&slack)) != std::cmp::Ordering::Greater);
            assert!(y11.cmp(&y22.add(&slack)) != std::cmp::Ordering::Greater);
            assert!(!y12.add(&slack).is_negative());

            // idempotence: reducing a reduced point is the identity
            if !red.on_boundary {
                let again = siegel_reduce(&red.tau).unwrap();
                assert_eq!(again.gamma, SympMatrix::identity(2), "trial {trial}");
            }
        }
    }
}
