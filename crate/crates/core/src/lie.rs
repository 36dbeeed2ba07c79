//! The Lie algebra `sp(m)` as a real inner-product space.
//!
//! Elements are quaternionic anti-Hermitian matrices ([`AlgVec`]). The
//! bi-invariant metric is `<X, Y>_0 = -Re Tr(XY)`, and [`SpBasis`] fixes an
//! orthonormal basis for it so that real linear algebra (ranks, orthogonal
//! complements) can be done on coordinate vectors.
//!
//! [`SpaceConfig`] describes the block subalgebras used for the biquotient
//! `M_n = Sp(n+1)//Sp(n-1)Sp(1)`:
//!
//! * `k = sp(n) + sp(1)` (top-left `n x n` block and the last diagonal slot),
//! * `p` its orthogonal complement (last row and column, off the diagonal),
//! * `u = {diag(B, 0, c)}` with `B` in `sp(n-1)` and `c` imaginary.
//!
//! All tangent vectors are left-translated to the identity; group elements
//! only enter through the adjoint action.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{phi_inv, MetricOperator};
use crate::quat::{GroupElem, QMatrix, Quaternion, UNITARY_TOL};

/// Rank tolerance for coordinate linear algebra.
pub const RANK_TOL: f64 = 1e-10;

/// An element of `sp(m)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlgVec {
    mat: QMatrix,
}

impl AlgVec {
    /// Validating constructor: the matrix must be anti-Hermitian to `1e-12`.
    pub fn new(mat: QMatrix) -> Result<Self> {
        let residual = mat.anti_hermitian_residual();
        if residual > UNITARY_TOL {
            return Err(Error::NotAntiHermitian { residual });
        }
        Ok(Self { mat })
    }

    pub(crate) fn from_matrix_unchecked(mat: QMatrix) -> Self {
        Self { mat }
    }

    pub fn zeros(m: usize) -> Self {
        Self { mat: QMatrix::zeros(m) }
    }

    /// Sets entry `(r, c)` to `q` and `(c, r)` to `-conj(q)`. Diagonal slots
    /// keep only the imaginary part of `q`.
    pub fn set_entry(&mut self, r: usize, c: usize, q: Quaternion) {
        if r == c {
            self.mat[(r, r)] = q.im();
        } else {
            self.mat[(r, c)] = q;
            self.mat[(c, r)] = -q.conj();
        }
    }

    pub fn side(&self) -> usize {
        self.mat.side()
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> QMatrix {
        self.mat
    }

    pub fn get(&self, r: usize, c: usize) -> Quaternion {
        self.mat[(r, c)]
    }

    fn assert_same_side(&self, other: &Self) {
        assert_eq!(self.side(), other.side(), "sp(m) elements of different sizes");
    }

    /// `[X, Y] = XY - YX`. Panics on mismatched sizes; see [`bracket`].
    pub fn lie(&self, other: &Self) -> Self {
        self.assert_same_side(other);
        let xy = self.mat.mul_unchecked(&other.mat);
        let yx = other.mat.mul_unchecked(&self.mat);
        Self { mat: xy.zip_with(&yx, |a, b| a - b) }
    }

    /// `<X, Y>_0`. Panics on mismatched sizes; see [`inner0`].
    pub fn dot0(&self, other: &Self) -> f64 {
        self.assert_same_side(other);
        // -Re Tr(XY) = sum_{r,c} Re(X_rc conj(Y_rc)) for anti-Hermitian Y.
        self.mat.entries().iter().zip(other.mat.entries()).map(|(a, b)| a.dot(*b)).sum()
    }

    pub fn norm0(&self) -> f64 {
        self.dot0(self).sqrt()
    }

    pub fn plus(&self, other: &Self) -> Self {
        self.assert_same_side(other);
        Self { mat: self.mat.zip_with(&other.mat, |a, b| a + b) }
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.assert_same_side(other);
        Self { mat: self.mat.zip_with(&other.mat, |a, b| a - b) }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { mat: self.mat.scale(s) }
    }

    /// `X + s Y`.
    pub fn axpy(&self, s: f64, y: &Self) -> Self {
        self.assert_same_side(y);
        Self { mat: self.mat.zip_with(&y.mat, |a, b| a + b.scale(s)) }
    }

    /// Scales to unit `<.,.>_0` length; `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm0();
        (n > 0.0).then(|| self.scale(1.0 / n))
    }
}

/// Lie bracket `XY - YX`.
pub fn bracket(x: &AlgVec, y: &AlgVec) -> Result<AlgVec> {
    check_sides(x.side(), y.side())?;
    Ok(x.lie(y))
}

/// The bi-invariant metric `<X, Y>_0 = -Re Tr(XY)`.
pub fn inner0(x: &AlgVec, y: &AlgVec) -> Result<f64> {
    check_sides(x.side(), y.side())?;
    Ok(-x.matrix().mul_unchecked(y.matrix()).re_trace())
}

fn check_sides(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { left: a, right: b });
    }
    Ok(())
}

/// `Ad_g X = g X g^-1`.
pub fn adjoint_action(g: &GroupElem, x: &AlgVec) -> Result<AlgVec> {
    check_sides(g.side(), x.side())?;
    let gx = g.matrix().mul_unchecked(x.matrix());
    Ok(AlgVec::from_matrix_unchecked(gx.mul_unchecked(&g.matrix().dagger())))
}

/// One element of the orthonormal basis of `sp(m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisElem {
    /// The unit `i`, `j` or `k` (index 1..=3) in diagonal slot `slot`.
    Diag { slot: usize, unit: usize },
    /// `(q at (row, col), -conj(q) at (col, row)) / sqrt 2` with `q` the unit
    /// `1, i, j, k` of index `unit` and `row < col`.
    Off { row: usize, col: usize, unit: usize },
}

impl BasisElem {
    pub fn position(self) -> (usize, usize) {
        match self {
            BasisElem::Diag { slot, .. } => (slot, slot),
            BasisElem::Off { row, col, .. } => (row, col),
        }
    }
}

/// Orthonormal basis of `(sp(m), <.,.>_0)`, in row-major order of the upper
/// triangle: the three diagonal units of slot `(r, r)`, then the four units of
/// each `(r, c)` with `c > r`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpBasis {
    m: usize,
    elems: Vec<BasisElem>,
}

impl SpBasis {
    pub fn new(m: usize) -> Self {
        let mut elems = Vec::with_capacity(m * (2 * m + 1));
        for r in 0..m {
            for unit in 1..=3 {
                elems.push(BasisElem::Diag { slot: r, unit });
            }
            for c in r + 1..m {
                for unit in 0..4 {
                    elems.push(BasisElem::Off { row: r, col: c, unit });
                }
            }
        }
        Self { m, elems }
    }

    pub fn side(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.elems.len()
    }

    pub fn elems(&self) -> &[BasisElem] {
        &self.elems
    }

    pub fn element(&self, a: usize) -> AlgVec {
        let mut x = AlgVec::zeros(self.m);
        match self.elems[a] {
            BasisElem::Diag { slot, unit } => x.set_entry(slot, slot, Quaternion::UNITS[unit]),
            BasisElem::Off { row, col, unit } => {
                x.set_entry(row, col, Quaternion::UNITS[unit].scale(std::f64::consts::FRAC_1_SQRT_2))
            }
        }
        x
    }

    /// Coordinates `<X, e_a>_0`; `inner0` becomes the dot product.
    pub fn coords(&self, x: &AlgVec) -> DVector<f64> {
        assert_eq!(x.side(), self.m);
        DVector::from_iterator(self.dim(), self.elems.iter().map(|&e| coordinate(x, e)))
    }

    pub fn from_coords(&self, coords: &[f64]) -> AlgVec {
        assert_eq!(coords.len(), self.dim());
        let mut x = AlgVec::zeros(self.m);
        for (&e, &v) in self.elems.iter().zip(coords) {
            match e {
                BasisElem::Diag { slot, unit } => {
                    let q = x.mat[(slot, slot)];
                    x.mat[(slot, slot)] = q + Quaternion::UNITS[unit].scale(v);
                }
                BasisElem::Off { row, col, unit } => {
                    let q = Quaternion::UNITS[unit].scale(v * std::f64::consts::FRAC_1_SQRT_2);
                    x.mat[(row, col)] += q;
                    x.mat[(col, row)] -= q.conj();
                }
            }
        }
        x
    }
}

fn coordinate(x: &AlgVec, e: BasisElem) -> f64 {
    match e {
        BasisElem::Diag { slot, unit } => x.get(slot, slot).to_array()[unit],
        BasisElem::Off { row, col, unit } => std::f64::consts::SQRT_2 * x.get(row, col).to_array()[unit],
    }
}

/// The block subspaces of `sp(n+1)` used throughout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Subspace {
    /// `sp(n) + sp(1)`.
    K,
    /// Orthogonal complement of `k`.
    P,
    /// `{diag(B, 0, c)}`.
    U,
    /// Orthogonal complement of `u` inside `k`.
    UPerpInK,
    /// `{diag(A, q1, q2)}`, the Lie algebra of the normalizing subgroup `N`.
    N,
}

impl Subspace {
    pub fn name(self) -> &'static str {
        match self {
            Subspace::K => "k",
            Subspace::P => "p",
            Subspace::U => "u",
            Subspace::UPerpInK => "u_perp_in_k",
            Subspace::N => "n",
        }
    }
}

/// The family member `M_n` and its block structure.
#[derive(Clone, Debug)]
pub struct SpaceConfig {
    n: usize,
    basis: Arc<SpBasis>,
}

impl PartialEq for SpaceConfig {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
    }
}

impl SpaceConfig {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("family index n must be >= 2, got {n}")));
        }
        Ok(Self { n, basis: Arc::new(SpBasis::new(n + 1)) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Matrix side length `n + 1`.
    pub fn m(&self) -> usize {
        self.n + 1
    }

    pub fn basis(&self) -> &SpBasis {
        &self.basis
    }

    pub fn dim_g(&self) -> usize {
        (self.n + 1) * (2 * self.n + 3)
    }

    pub fn dim_k(&self) -> usize {
        self.n * (2 * self.n + 1) + 3
    }

    pub fn dim_u(&self) -> usize {
        (self.n - 1) * (2 * self.n - 1) + 3
    }

    pub fn dim_p(&self) -> usize {
        4 * self.n
    }

    /// Whether matrix position `(r, c)` belongs to the block pattern of `s`.
    pub fn in_subspace(&self, s: Subspace, r: usize, c: usize) -> bool {
        let last = self.n;
        let in_k = (r < last && c < last) || (r == last && c == last);
        let in_u = (r + 1 < last && c + 1 < last) || (r == last && c == last);
        match s {
            Subspace::K => in_k,
            Subspace::P => (r == last) != (c == last),
            Subspace::U => in_u,
            Subspace::UPerpInK => in_k && !in_u,
            Subspace::N => (r + 1 < last && c + 1 < last) || (r == c && r + 1 >= last),
        }
    }

    /// Orthogonal projection onto `s` (a block mask).
    pub fn project(&self, x: &AlgVec, s: Subspace) -> AlgVec {
        let m = self.m();
        assert_eq!(x.side(), m, "vector not in sp(n+1)");
        let mut out = x.clone();
        for r in 0..m {
            for c in 0..m {
                if !self.in_subspace(s, r, c) {
                    out.mat[(r, c)] = Quaternion::ZERO;
                }
            }
        }
        out
    }

    /// `||X - proj_s X||_0`.
    pub fn residual_outside(&self, x: &AlgVec, s: Subspace) -> f64 {
        x.minus(&self.project(x, s)).norm0()
    }

    /// Indices into [`SpBasis`] of the basis elements spanning `s`.
    pub fn basis_indices(&self, s: Subspace) -> Vec<usize> {
        self.basis
            .elems()
            .iter()
            .enumerate()
            .filter(|(_, e)| {
                let (r, c) = e.position();
                self.in_subspace(s, r, c)
            })
            .map(|(a, _)| a)
            .collect()
    }

    pub fn subspace_basis(&self, s: Subspace) -> Vec<AlgVec> {
        self.basis_indices(s).into_iter().map(|a| self.basis.element(a)).collect()
    }

    fn check_member(&self, x: &AlgVec, s: Subspace) -> Result<()> {
        check_sides(self.m(), x.side())?;
        let residual = self.residual_outside(x, s);
        if residual > UNITARY_TOL {
            return Err(Error::OutsideSubspace { subspace: s.name(), residual });
        }
        Ok(())
    }
}

/// Projection by name.
pub fn project(cfg: &SpaceConfig, x: &AlgVec, which: Subspace) -> AlgVec {
    cfg.project(x, which)
}

/// A tangent vector to `G x G` at `(g1, e)`, left-translated to `(e, e)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TangentPair {
    pub first: AlgVec,
    pub second: AlgVec,
}

impl TangentPair {
    pub fn new(first: AlgVec, second: AlgVec) -> Result<Self> {
        check_sides(first.side(), second.side())?;
        Ok(Self { first, second })
    }

    /// Concatenated real coordinates `(coords(first), coords(second))`.
    pub fn coords(&self, basis: &SpBasis) -> DVector<f64> {
        let a = basis.coords(&self.first);
        let b = basis.coords(&self.second);
        DVector::from_iterator(a.len() + b.len(), a.iter().chain(b.iter()).copied())
    }
}

/// `rho_{g1}(U1, U2) = Ad_{g1} U1 - U2`. Both components must lie in `u`.
pub fn rho(cfg: &SpaceConfig, g1: &GroupElem, u1: &AlgVec, u2: &AlgVec) -> Result<AlgVec> {
    cfg.check_member(u1, Subspace::U)?;
    cfg.check_member(u2, Subspace::U)?;
    Ok(adjoint_action(g1, u1)?.minus(u2))
}

/// Matrix (in basis coordinates) of `rho_{g1}` restricted to the embedded
/// `{0} + u`, one column per basis element of `u`.
pub fn rho_matrix(cfg: &SpaceConfig, g1: &GroupElem) -> Result<DMatrix<f64>> {
    let zero = AlgVec::zeros(cfg.m());
    let cols = cfg
        .subspace_basis(Subspace::U)
        .iter()
        .map(|u| rho(cfg, g1, &zero, u).map(|v| cfg.basis().coords(&v)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DMatrix::from_columns(&cols))
}

/// Smallest singular value of [`rho_matrix`]; positive iff `ker rho = 0`.
pub fn rho_min_singular_value(cfg: &SpaceConfig, g1: &GroupElem) -> Result<f64> {
    let a = rho_matrix(cfg, g1)?;
    Ok(a.singular_values().min())
}

/// Orthonormal basis (Gram-Schmidt with reorthogonalization) of the
/// orthogonal complement of `span(spanning)` in `R^dim`.
pub fn orthogonal_complement(spanning: &[DVector<f64>], dim: usize, tol: f64) -> Vec<DVector<f64>> {
    let mut q: Vec<DVector<f64>> = Vec::new();
    let push = |q: &mut Vec<DVector<f64>>, v: &DVector<f64>| -> bool {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in q.iter() {
                let d = b.dot(&w);
                w.axpy(-d, b, 1.0);
            }
        }
        let n = w.norm();
        if n > tol {
            q.push(w / n);
            true
        } else {
            false
        }
    };
    for v in spanning {
        push(&mut q, v);
    }
    let rank = q.len();
    for a in 0..dim {
        push(&mut q, &DVector::from_fn(dim, |i, _| if i == a { 1.0 } else { 0.0 }));
    }
    q.split_off(rank)
}

/// Spanning set of the vertical space at `(g1, e)` for the action of
/// `Delta G x ({0} + U)`: the pairs `(Ad_{g1^-1} X, X)` for `X` in the basis
/// of `g`, followed by `(0, -U)` for `U` in the basis of `u`. The list is
/// linearly independent, of length `dim g + dim u`.
pub fn vertical_basis(cfg: &SpaceConfig, g1: &GroupElem) -> Result<Vec<TangentPair>> {
    check_sides(cfg.m(), g1.side())?;
    let g1_inv = g1.inverse();
    let basis = cfg.basis();
    let mut out = Vec::with_capacity(cfg.dim_g() + cfg.dim_u());
    for a in 0..basis.dim() {
        let x = basis.element(a);
        out.push(TangentPair::new(adjoint_action(&g1_inv, &x)?, x)?);
    }
    for u in cfg.subspace_basis(Subspace::U) {
        out.push(TangentPair::new(AlgVec::zeros(cfg.m()), u.scale(-1.0))?);
    }
    Ok(out)
}

/// Horizontal lift of `X` at `(g1, e)`: `(phi^-1(-Ad_{g1^-1} X), phi^-1(X))`.
pub fn horizontal_lift(g1: &GroupElem, x: &AlgVec, op: &MetricOperator) -> Result<TangentPair> {
    let ad = adjoint_action(&g1.inverse(), x)?;
    TangentPair::new(phi_inv(&ad.scale(-1.0), op), phi_inv(x, op))
}

/// Basis of the horizontal space at `(g1, e)` with respect to
/// `<.,.>_1 + <.,.>_1`: the lifts of an orthonormal basis of
/// `rho_{g1}(u)^perp`. Length `dim g - dim u`.
pub fn horizontal_basis(cfg: &SpaceConfig, g1: &GroupElem, op: &MetricOperator) -> Result<Vec<TangentPair>> {
    check_sides(cfg.m(), g1.side())?;
    let image = rho_matrix(cfg, g1)?;
    let cols: Vec<DVector<f64>> = image.column_iter().map(|c| c.into_owned()).collect();
    let complement = orthogonal_complement(&cols, cfg.dim_g(), RANK_TOL);
    complement.iter().map(|v| horizontal_lift(g1, &cfg.basis().from_coords(v.as_slice()), op)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2_x(a: Quaternion, b: Quaternion) -> AlgVec {
        let mut x = AlgVec::zeros(3);
        x.set_entry(0, 1, a);
        x.set_entry(1, 1, b);
        x
    }

    fn m2_y(c: Quaternion, d: Quaternion) -> AlgVec {
        let mut y = AlgVec::zeros(3);
        y.set_entry(0, 2, c);
        y.set_entry(1, 2, d);
        y
    }

    #[test]
    fn bracket_of_self_vanishes() {
        let x = m2_x(Quaternion::new(1.0, 2.0, 0.5, -1.0), Quaternion::J);
        assert_eq!(x.lie(&x).norm0(), 0.0);
    }

    #[test]
    fn m2_forms_commute_when_a_and_d_vanish() {
        let x = m2_x(Quaternion::ZERO, Quaternion::I);
        let y = m2_y(Quaternion::J, Quaternion::ZERO);
        assert!(bracket(&x, &y).unwrap().norm0() < 1e-15);
    }

    #[test]
    fn m2_bracket_entry_ad() {
        let x = m2_x(Quaternion::ONE, Quaternion::ZERO);
        let y = m2_y(Quaternion::ZERO, Quaternion::J);
        let br = bracket(&x, &y).unwrap();
        assert_eq!(br.get(0, 2), Quaternion::J);
    }

    #[test]
    fn inner0_examples() {
        let mut x = AlgVec::zeros(3);
        x.set_entry(0, 0, Quaternion::I);
        assert_eq!(inner0(&x, &x).unwrap(), 1.0);
        let mut y = AlgVec::zeros(3);
        y.set_entry(0, 1, Quaternion::ONE);
        assert_eq!(inner0(&y, &y).unwrap(), 2.0);
        assert_eq!(x.dot0(&x), 1.0);
        assert_eq!(y.dot0(&y), 2.0);
    }

    #[test]
    fn inner0_dimension_mismatch() {
        assert!(matches!(inner0(&AlgVec::zeros(2), &AlgVec::zeros(3)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn basis_is_orthonormal_and_coordinates_round_trip() {
        let basis = SpBasis::new(4);
        assert_eq!(basis.dim(), 36);
        for a in 0..basis.dim() {
            let ea = basis.element(a);
            for b in 0..basis.dim() {
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((inner0(&ea, &basis.element(b)).unwrap() - expected).abs() < 1e-15);
            }
            let c = basis.coords(&ea);
            assert!((c[a] - 1.0).abs() < 1e-15 && (c.norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn u_projection_of_diagonal() {
        let cfg = SpaceConfig::new(2).unwrap();
        let x = AlgVec::new(QMatrix::diag(&[Quaternion::I, Quaternion::J, Quaternion::K])).unwrap();
        let expected = AlgVec::new(QMatrix::diag(&[Quaternion::I, Quaternion::ZERO, Quaternion::K])).unwrap();
        assert_eq!(cfg.project(&x, Subspace::U), expected);
    }

    #[test]
    fn dimension_ledger() {
        for n in 2..=4 {
            let cfg = SpaceConfig::new(n).unwrap();
            assert_eq!(cfg.basis().dim(), cfg.dim_g());
            assert_eq!(cfg.basis_indices(Subspace::K).len(), cfg.dim_k());
            assert_eq!(cfg.basis_indices(Subspace::P).len(), cfg.dim_p());
            assert_eq!(cfg.basis_indices(Subspace::U).len(), cfg.dim_u());
            assert_eq!(cfg.dim_p(), cfg.dim_g() - cfg.dim_k());
            assert_eq!(cfg.basis_indices(Subspace::UPerpInK).len(), cfg.dim_k() - cfg.dim_u());
            for a in cfg.basis_indices(Subspace::U) {
                assert!(cfg.basis_indices(Subspace::K).contains(&a));
            }
        }
        assert!(SpaceConfig::new(1).is_err());
    }

    #[test]
    fn rho_rejects_inputs_outside_u() {
        let cfg = SpaceConfig::new(2).unwrap();
        let g = GroupElem::identity(3);
        let p = cfg.basis().element(cfg.basis_indices(Subspace::P)[0]);
        let zero = AlgVec::zeros(3);
        assert!(matches!(rho(&cfg, &g, &zero, &p), Err(Error::OutsideSubspace { subspace: "u", .. })));
    }

    #[test]
    fn rho_at_identity() {
        let cfg = SpaceConfig::new(2).unwrap();
        let us = cfg.subspace_basis(Subspace::U);
        let (u1, u2) = (&us[0], &us[4]);
        let g = GroupElem::identity(3);
        assert_eq!(rho(&cfg, &g, u1, u2).unwrap(), u1.minus(u2));
        assert_eq!(rho(&cfg, &g, &AlgVec::zeros(3), u2).unwrap(), u2.scale(-1.0));
    }

    #[test]
    fn complement_of_coordinate_plane() {
        let v = vec![DVector::from_vec(vec![1.0, 1.0, 0.0])];
        let c = orthogonal_complement(&v, 3, 1e-10);
        assert_eq!(c.len(), 2);
        for w in &c {
            assert!(w.dot(&v[0]).abs() < 1e-15);
        }
    }
}
