//! Cohomogeneity-two reduction of `G x G` under `Delta G x K x N`.
//!
//! An orbit is determined by the norms of the three segments of the last
//! column of `g2^-1 g1`; the two-parameter family `diag(I, A(theta, alpha))`
//! meets every orbit exactly once (up to the degenerate edge `cos theta = 0`).

use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::{AlgVec, SpaceConfig, Subspace};
use crate::quat::{expm, GroupElem, QMatrix, Quaternion, EXPM_TOL};

/// A point of the fundamental domain, `theta, alpha` in `[0, pi/2]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FundamentalPoint {
    pub theta: f64,
    pub alpha: f64,
}

impl FundamentalPoint {
    pub fn new(theta: f64, alpha: f64) -> Result<Self> {
        let ok = |v: f64| (0.0..=FRAC_PI_2).contains(&v);
        if !ok(theta) || !ok(alpha) {
            return Err(Error::InadmissiblePoint { theta, alpha, reason: "angles must lie in [0, pi/2]" });
        }
        Ok(Self { theta, alpha })
    }

    /// The `3 x 3` rotation
    ///
    /// ```text
    /// [ cos t          0       sin t       ]
    /// [ -cos a sin t   sin a   cos a cos t ]
    /// [ -sin a sin t   -cos a  sin a cos t ]
    /// ```
    pub fn rotation(&self) -> [[f64; 3]; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sa, ca) = self.alpha.sin_cos();
        [[ct, 0.0, st], [-ca * st, sa, ca * ct], [-sa * st, -ca, sa * ct]]
    }
}

/// `diag(I_{n-2}, A(theta, alpha))` in `Sp(n+1)`.
pub fn f_matrix(pt: &FundamentalPoint, n: usize) -> Result<GroupElem> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("family index n must be >= 2, got {n}")));
    }
    FundamentalPoint::new(pt.theta, pt.alpha)?;
    let m = n + 1;
    let off = n - 2;
    let mut g = QMatrix::identity(m);
    let a = pt.rotation();
    for r in 0..3 {
        for c in 0..3 {
            g[(off + r, off + c)] = Quaternion::real(a[r][c]);
        }
    }
    GroupElem::new(g)
}

/// Norms `|v_0|, |v_n|, |v_{n+1}|` of the segments of the last column.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OrbitInvariants {
    pub r0: f64,
    pub rn: f64,
    pub rn1: f64,
}

/// Orbit invariants of `g`: the last column split into its first `n - 1`
/// entries, the second-to-last entry and the last entry.
pub fn v_segments(g: &GroupElem) -> OrbitInvariants {
    let m = g.side();
    let a = g.matrix();
    let last = m - 1;
    let r0 = (0..last - 1).map(|r| a[(r, last)].norm_sqr()).sum::<f64>().sqrt();
    OrbitInvariants { r0, rn: a[(last - 1, last)].norm(), rn1: a[(last, last)].norm() }
}

/// Result of reducing a point of `G x G` to the fundamental domain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Reduction {
    pub point: FundamentalPoint,
    pub invariants: OrbitInvariants,
    /// `cos theta = 0`: `alpha` is not determined and is reported as `0`.
    pub degenerate: bool,
}

/// Reduces `(g1, g2)` to the fundamental domain via the invariants of
/// `g2^-1 g1`.
pub fn reduce_to_f(g1: &GroupElem, g2: &GroupElem) -> Result<Reduction> {
    let g = g2.inverse().mul(g1)?;
    let inv = v_segments(&g);
    let theta = inv.r0.clamp(0.0, 1.0).asin();
    let degenerate = inv.rn == 0.0 && inv.rn1 == 0.0;
    let alpha = if degenerate { 0.0 } else { inv.rn1.atan2(inv.rn) };
    Ok(Reduction { point: FundamentalPoint::new(theta, alpha.clamp(0.0, FRAC_PI_2))?, invariants: inv, degenerate })
}

/// Deterministic generator for a given seed.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random anti-Hermitian matrix with entries uniform in `[-scale, scale]`,
/// supported on the positions of `mask`.
pub fn random_masked_algvec(rng: &mut impl Rng, m: usize, scale: f64, mask: impl Fn(usize, usize) -> bool) -> AlgVec {
    let mut x = AlgVec::zeros(m);
    for r in 0..m {
        for c in r..m {
            let q = Quaternion::new(
                rng.random_range(-scale..=scale),
                rng.random_range(-scale..=scale),
                rng.random_range(-scale..=scale),
                rng.random_range(-scale..=scale),
            );
            if mask(r, c) {
                x.set_entry(r, c, q);
            }
        }
    }
    x
}

pub fn random_algvec(rng: &mut impl Rng, m: usize, scale: f64) -> AlgVec {
    random_masked_algvec(rng, m, scale, |_, _| true)
}

/// Random element of the connected subgroup with Lie algebra `s`.
pub fn random_subgroup_element(rng: &mut impl Rng, cfg: &SpaceConfig, s: Subspace) -> GroupElem {
    let x = random_masked_algvec(rng, cfg.m(), 1.0, |r, c| cfg.in_subspace(s, r, c));
    expm(x.matrix(), EXPM_TOL).expect("exponential of an anti-Hermitian matrix")
}

/// `expm` of a random anti-Hermitian matrix drawn from a generator seeded
/// with `seed`; the same seed reproduces the same element.
pub fn random_group_element(seed: u64, m: usize) -> GroupElem {
    let mut rng = seeded_rng(seed);
    random_group_element_from(&mut rng, m)
}

pub fn random_group_element_from(rng: &mut impl Rng, m: usize) -> GroupElem {
    let x = random_algvec(rng, m, 1.0);
    expm(x.matrix(), EXPM_TOL).expect("exponential of an anti-Hermitian matrix")
}
