//! Cheeger-deformed left-invariant metrics on `Sp(n+1)` and their curvature.
//!
//! Deforming the bi-invariant metric in the direction of `K = Sp(n)Sp(1)`
//! gives `<X, Y>_1 = <phi X, Y>_0` with `phi(X) = X_p + t/(t+1) X_k`. In the
//! orthonormal basis of [`SpBasis`](crate::lie::SpBasis) the operator `phi` is
//! diagonal (every basis element lies in `k` or in `p`), which is what makes
//! the Koszul solve below a diagonal scaling.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::{AlgVec, SpaceConfig, Subspace, TangentPair};

/// Threshold on curvature numerators of unit-Gram planes below which a plane
/// counts as flat.
pub const ZERO_CURVATURE_TOL: f64 = 1e-9;

/// Relative Gram threshold below which a plane is considered degenerate.
pub const GRAM_REL_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum MetricMode {
    /// `phi = id`; used as the test oracle.
    BiInvariant,
    Cheeger {
        t: f64,
    },
}

/// The metric `<.,.>_1` on `sp(n+1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricOperator {
    config: SpaceConfig,
    mode: MetricMode,
}

impl MetricOperator {
    pub fn cheeger(config: SpaceConfig, t: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidParameter(format!("Cheeger parameter t must be positive, got {t}")));
        }
        Ok(Self { config, mode: MetricMode::Cheeger { t } })
    }

    pub fn bi_invariant(config: SpaceConfig) -> Self {
        Self { config, mode: MetricMode::BiInvariant }
    }

    pub fn config(&self) -> &SpaceConfig {
        &self.config
    }

    pub fn mode(&self) -> MetricMode {
        self.mode
    }

    /// Eigenvalue of `phi` on `k`.
    pub fn k_eigenvalue(&self) -> f64 {
        match self.mode {
            MetricMode::BiInvariant => 1.0,
            MetricMode::Cheeger { t } => t / (t + 1.0),
        }
    }

    fn scale_k(&self, x: &AlgVec, factor: f64) -> AlgVec {
        let cfg = &self.config;
        let m = cfg.m();
        assert_eq!(x.side(), m, "vector not in sp(n+1)");
        let mut out = x.matrix().clone();
        for r in 0..m {
            for c in 0..m {
                if cfg.in_subspace(Subspace::K, r, c) {
                    out[(r, c)] = out[(r, c)].scale(factor);
                }
            }
        }
        AlgVec::from_matrix_unchecked(out)
    }
}

/// `phi(X) = X_p + t/(t+1) X_k`.
pub fn phi(x: &AlgVec, op: &MetricOperator) -> AlgVec {
    op.scale_k(x, op.k_eigenvalue())
}

/// Inverse of [`phi`].
pub fn phi_inv(x: &AlgVec, op: &MetricOperator) -> AlgVec {
    op.scale_k(x, 1.0 / op.k_eigenvalue())
}

/// `<X, Y>_1 = <phi X, Y>_0`.
pub fn inner1(x: &AlgVec, y: &AlgVec, op: &MetricOperator) -> f64 {
    phi(x, op).dot0(y)
}

/// Levi-Civita connection of the left-invariant metric on left-invariant
/// fields: `nabla_X Y = [X, Y]/2 + U(X, Y)`, where `U` is fixed by
/// `2 <U(X,Y), Z>_1 = <[Z,X], Y>_1 + <X, [Z,Y]>_1` for all `Z`.
///
/// Taking `Z = e_a` over the orthonormal basis, ad-invariance of `<.,.>_0`
/// turns the right-hand side into the `a`-th coordinate of
/// `[X, phi Y] + [Y, phi X]`, and the left-hand side is `2 lambda_a U_a`.
pub fn connection(x: &AlgVec, y: &AlgVec, op: &MetricOperator) -> AlgVec {
    let koszul = x.lie(&phi(y, op)).plus(&y.lie(&phi(x, op)));
    let u = phi_inv(&koszul, op).scale(0.5);
    x.lie(y).scale(0.5).plus(&u)
}

/// `R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z`.
pub fn curvature(x: &AlgVec, y: &AlgVec, z: &AlgVec, op: &MetricOperator) -> AlgVec {
    let a = connection(x, &connection(y, z, op), op);
    let b = connection(y, &connection(x, z, op), op);
    let c = connection(&x.lie(y), z, op);
    a.minus(&b).minus(&c)
}

/// `<R(X,Y)Z, W>_1`.
pub fn curvature_form(x: &AlgVec, y: &AlgVec, z: &AlgVec, w: &AlgVec, op: &MetricOperator) -> f64 {
    inner1(&curvature(x, y, z, op), w, op)
}

/// Unnormalized sectional curvature of a plane together with its Gram factor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PlaneCurvature {
    /// `<R(X,Y)Y, X>_1`.
    pub numerator: f64,
    /// `|X|^2 |Y|^2 - <X,Y>^2` in the metric used.
    pub gram: f64,
    /// `numerator / gram` when the plane is non-degenerate.
    pub sec: Option<f64>,
}

impl PlaneCurvature {
    fn new(numerator: f64, xx: f64, yy: f64, xy: f64) -> Self {
        let gram = (xx * yy - xy * xy).max(0.0);
        let sec = (gram > GRAM_REL_TOL * xx * yy).then(|| numerator / gram);
        Self { numerator, gram, sec }
    }
}

/// Curvature of `span{X, Y}` with respect to `<.,.>_1`.
pub fn plane_curvature(x: &AlgVec, y: &AlgVec, op: &MetricOperator) -> PlaneCurvature {
    let numerator = curvature_form(x, y, y, x, op);
    PlaneCurvature::new(numerator, inner1(x, x, op), inner1(y, y, op), inner1(x, y, op))
}

/// Curvature of `span{A, B}` in `G x G` with the product metric
/// `<.,.>_1 + <.,.>_1`.
pub fn lift_plane_curvature(a: &TangentPair, b: &TangentPair, op: &MetricOperator) -> PlaneCurvature {
    let numerator = curvature_form(&a.first, &b.first, &b.first, &a.first, op)
        + curvature_form(&a.second, &b.second, &b.second, &a.second, op);
    let dot = |p: &TangentPair, q: &TangentPair| inner1(&p.first, &q.first, op) + inner1(&p.second, &q.second, op);
    PlaneCurvature::new(numerator, dot(a, a), dot(b, b), dot(a, b))
}

/// `<A, B>_1 + <A', B'>_1` on pairs.
pub fn pair_inner1(a: &TangentPair, b: &TangentPair, op: &MetricOperator) -> f64 {
    inner1(&a.first, &b.first, op) + inner1(&a.second, &b.second, op)
}
