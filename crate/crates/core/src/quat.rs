//! Quaternion scalars and dense quaternionic matrices.
//!
//! Everything above this module (the Lie algebra `sp(m)`, the group `Sp(m)`,
//! adjoint actions) is built out of [`QMatrix`]. Matrices here are tiny
//! (side length at most five in practice) so storage is a flat row-major
//! `Vec` and products are the naive triple loop.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance of the validating [`GroupElem`] constructor and of the
/// anti-Hermitian checks.
pub const UNITARY_TOL: f64 = 1e-12;

/// Default truncation threshold of the exponential series.
pub const EXPM_TOL: f64 = 1e-16;

/// A real quaternion `w + x i + y j + z k`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    /// The standard real basis `1, i, j, k`, in that order.
    pub const UNITS: [Quaternion; 4] = [Self::ONE, Self::I, Self::J, Self::K];

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub const fn real(w: f64) -> Self {
        Self::new(w, 0.0, 0.0, 0.0)
    }

    pub fn from_array(c: [f64; 4]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn re(self) -> f64 {
        self.w
    }

    /// Imaginary part, as a quaternion with zero real part.
    pub fn im(self) -> Self {
        Self::new(0.0, self.x, self.y, self.z)
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    /// Euclidean inner product on `R^4`, equal to `Re(p conj(q))`.
    pub fn dot(self, other: Self) -> f64 {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn is_imaginary(self, tol: f64) -> bool {
        self.w.abs() <= tol
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inverse(self) -> Option<Self> {
        let n = self.norm_sqr();
        (n > 0.0).then(|| self.conj().scale(1.0 / n))
    }
}

/// Hamilton product `p q`.
pub fn qmul(p: Quaternion, q: Quaternion) -> Quaternion {
    Quaternion::new(
        p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
        p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
        p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
        p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
    )
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl Mul for Quaternion {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        qmul(self, o)
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.scale(s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    fn mul(self, q: Quaternion) -> Quaternion {
        q.scale(self)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.w)?;
        for (c, unit) in [(self.x, 'i'), (self.y, 'j'), (self.z, 'k')] {
            if c.is_sign_negative() {
                write!(f, " - {}{}", -c, unit)?;
            } else {
                write!(f, " + {}{}", c, unit)?;
            }
        }
        Ok(())
    }
}

/// Parses sums of terms such as `i`, `-0.6j+0.8k` or `1 + 2i - 3j + 0k`
/// (the [`Display`](fmt::Display) form). A bare number is the real part.
impl std::str::FromStr for Quaternion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("not a quaternion literal: `{s}`"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad());
        }
        // Split before every sign that is not part of an exponent.
        let mut terms = Vec::new();
        let mut start = 0;
        let bytes = compact.as_bytes();
        for i in 1..bytes.len() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
                terms.push(&compact[start..i]);
                start = i;
            }
        }
        terms.push(&compact[start..]);
        let mut c = [0.0f64; 4];
        for term in terms {
            let (body, slot) = match term.chars().last() {
                Some('i') => (&term[..term.len() - 1], 1),
                Some('j') => (&term[..term.len() - 1], 2),
                Some('k') => (&term[..term.len() - 1], 3),
                _ => (term, 0),
            };
            let value = match body {
                "" | "+" if slot > 0 => 1.0,
                "-" if slot > 0 => -1.0,
                _ => body.parse::<f64>().map_err(|_| bad())?,
            };
            if !value.is_finite() {
                return Err(bad());
            }
            c[slot] += value;
        }
        Ok(Self::from_array(c))
    }
}

/// Square `m x m` matrix with quaternion entries, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QMatrix {
    m: usize,
    entries: Vec<Quaternion>,
}

impl QMatrix {
    pub fn zeros(m: usize) -> Self {
        Self { m, entries: vec![Quaternion::ZERO; m * m] }
    }

    pub fn identity(m: usize) -> Self {
        let mut a = Self::zeros(m);
        for l in 0..m {
            a[(l, l)] = Quaternion::ONE;
        }
        a
    }

    /// Builds a matrix from row-major entries; `entries.len()` must be a square.
    pub fn from_entries(m: usize, entries: Vec<Quaternion>) -> Result<Self> {
        if entries.len() != m * m {
            return Err(Error::DimensionMismatch { left: m * m, right: entries.len() });
        }
        Ok(Self { m, entries })
    }

    /// Embeds a real matrix (row-major) as a quaternionic one.
    pub fn from_real(m: usize, reals: &[f64]) -> Result<Self> {
        Self::from_entries(m, reals.iter().map(|&r| Quaternion::real(r)).collect())
    }

    pub fn diag(diagonal: &[Quaternion]) -> Self {
        let mut a = Self::zeros(diagonal.len());
        for (l, &q) in diagonal.iter().enumerate() {
            a[(l, l)] = q;
        }
        a
    }

    pub fn side(&self) -> usize {
        self.m
    }

    pub fn entries(&self) -> &[Quaternion] {
        &self.entries
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let m = self.m;
        let mut out = Self::zeros(m);
        for r in 0..m {
            for c in 0..m {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    fn check_side(&self, other: &Self) -> Result<()> {
        if self.m != other.m {
            return Err(Error::DimensionMismatch { left: self.m, right: other.m });
        }
        Ok(())
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_side(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let m = self.m;
        let mut out = Self::zeros(m);
        for r in 0..m {
            for k in 0..m {
                let a = self.entries[r * m + k];
                if a == Quaternion::ZERO {
                    continue;
                }
                for c in 0..m {
                    let b = other.entries[k * m + c];
                    out.entries[r * m + c] += qmul(a, b);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_side(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_side(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub(crate) fn zip_with(&self, other: &Self, f: impl Fn(Quaternion, Quaternion) -> Quaternion) -> Self {
        Self { m: self.m, entries: self.entries.iter().zip(&other.entries).map(|(&a, &b)| f(a, b)).collect() }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { m: self.m, entries: self.entries.iter().map(|q| q.scale(s)).collect() }
    }

    /// Frobenius norm over the `4 m^2` real components.
    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Real part of the trace.
    pub fn re_trace(&self) -> f64 {
        (0..self.m).map(|l| self[(l, l)].w).sum()
    }

    /// `||A^dagger + A||_F`; zero exactly for anti-Hermitian matrices.
    pub fn anti_hermitian_residual(&self) -> f64 {
        let m = self.m;
        let mut acc = 0.0;
        for r in 0..m {
            for c in 0..m {
                acc += (self[(r, c)] + self[(c, r)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn is_anti_hermitian(&self, tol: f64) -> bool {
        self.anti_hermitian_residual() <= tol
    }

    /// `||A^dagger A - I||_F`.
    pub fn unitarity_residual(&self) -> f64 {
        let prod = self.dagger().mul_unchecked(self);
        prod.sub(&Self::identity(self.m)).expect("same side").frobenius_norm()
    }
}

impl Index<(usize, usize)> for QMatrix {
    type Output = Quaternion;
    fn index(&self, (r, c): (usize, usize)) -> &Quaternion {
        &self.entries[r * self.m + c]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Quaternion {
        &mut self.entries[r * self.m + c]
    }
}

/// Matrix product, erroring on mismatched side lengths.
pub fn qmat_mul(a: &QMatrix, b: &QMatrix) -> Result<QMatrix> {
    a.mul(b)
}

/// An element of `Sp(m)`: a quaternionic matrix with `g^dagger g = I`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupElem {
    mat: QMatrix,
}

impl GroupElem {
    /// Validating constructor; rejects matrices with unitarity residual above
    /// [`UNITARY_TOL`].
    pub fn new(mat: QMatrix) -> Result<Self> {
        let residual = mat.unitarity_residual();
        if residual.is_nan() || residual > UNITARY_TOL {
            return Err(Error::NotUnitary { residual });
        }
        Ok(Self { mat })
    }

    pub fn identity(m: usize) -> Self {
        Self { mat: QMatrix::identity(m) }
    }

    pub fn side(&self) -> usize {
        self.mat.side()
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.mat
    }

    /// Group inverse, which is the conjugate transpose.
    pub fn inverse(&self) -> Self {
        Self { mat: self.mat.dagger() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        Ok(Self { mat: self.mat.mul(&other.mat)? })
    }
}

/// Matrix exponential of an anti-Hermitian matrix by scaling and squaring.
///
/// The argument is scaled by `2^-s` with `s = ceil(log2(max(1, ||X||_F))) + 4`,
/// the power series is summed until a term drops below `tol` in Frobenius
/// norm, and the result is squared `s` times.
pub fn expm(x: &QMatrix, tol: f64) -> Result<GroupElem> {
    let residual = x.anti_hermitian_residual();
    if residual > UNITARY_TOL {
        return Err(Error::NotAntiHermitian { residual });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("expm tolerance must be positive, got {tol}")));
    }
    let m = x.side();
    let norm = x.frobenius_norm();
    let squarings = norm.max(1.0).log2().ceil() as i32 + 4;
    let scaled = x.scale(0.5f64.powi(squarings));

    let mut sum = QMatrix::identity(m);
    let mut term = QMatrix::identity(m);
    for k in 1..200 {
        term = term.mul_unchecked(&scaled).scale(1.0 / k as f64);
        sum = sum.zip_with(&term, |a, b| a + b);
        if term.frobenius_norm() < tol {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.mul_unchecked(&sum);
    }
    GroupElem::new(sum)
}
