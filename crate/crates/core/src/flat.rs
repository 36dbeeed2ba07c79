//! Zero-curvature planes of the Cheeger-deformed metrics on `M_n`.
//!
//! A plane at the point `[(p, e)]` is certified flat by a pair `X, Y` with
//!
//! * **A**: `X = X_k` and `X` orthogonal to `u`, `Y = Y_p`;
//! * **B**: `[X, Y] = 0`;
//! * **C**: `(Ad_{p^-1} X)_p` and `(Ad_{p^-1} Y)_p` linearly dependent over R.
//!
//! [`FlatWitness`] packages such a pair with its residuals. The closed-form
//! constructions ([`m2_witness`], [`family_n_witness`]) and the numerical
//! search ([`find_flat_plane`]) all go through the same certification, which
//! additionally evaluates the curvature of the horizontal lift.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::{adjoint_action, horizontal_lift, AlgVec, SpBasis, SpaceConfig, Subspace};
use crate::metric::{lift_plane_curvature, MetricOperator};
use crate::orbit::{f_matrix, seeded_rng, FundamentalPoint};
use crate::quat::{GroupElem, Quaternion};

/// Bound on `||[X, Y]||_0` (unit vectors) for a valid witness.
pub const BRACKET_TOL: f64 = 1e-10;
/// Bound on the Gram determinant of the projected pair for a valid witness.
pub const GRAM_TOL: f64 = 1e-10;
/// Bound on the lifted curvature numerator for a valid witness.
pub const LIFT_TOL: f64 = 1e-9;
/// Objective level at which the numerical search reports success.
pub const SEARCH_TOL: f64 = 1e-10;
/// Structural tolerance for Condition A.
pub const STRUCTURE_TOL: f64 = 1e-12;
/// Tolerance of the closed-form locus predicate.
pub const LOCUS_TOL: f64 = 1e-12;

/// Optimizer settings of [`find_flat_plane`] and [`sphere_min_bracket`].
pub const STEP: f64 = 0.1;
pub const GRAD_TOL: f64 = 1e-12;
pub const MAX_ITERS: usize = 5000;

/// Residuals of a candidate flat plane, evaluated on `<.,.>_0`-unit vectors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Residuals {
    /// `||[X, Y]||_0`.
    pub condition_b_norm: f64,
    /// Gram determinant of `(Ad_{p^-1} X)_p` and `(Ad_{p^-1} Y)_p`.
    pub condition_c_gram: f64,
    /// `<R(A,B)B,A>` of the horizontal lifts in `G x G`.
    pub lift_numerator: f64,
    /// Largest Condition A violation (distance of `X` from `k` cap `u^perp`,
    /// of `Y` from `p`).
    pub condition_a: f64,
}

/// A certified pair `(X, Y)` at a point of the fundamental domain.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlatWitness {
    pub point: FundamentalPoint,
    pub n: usize,
    pub x: AlgVec,
    pub y: AlgVec,
    pub residuals: Residuals,
    /// Lift tolerance used by [`FlatWitness::is_valid`].
    pub lift_tol: f64,
}

impl FlatWitness {
    pub fn is_valid(&self) -> bool {
        let r = &self.residuals;
        r.condition_a <= STRUCTURE_TOL
            && r.condition_b_norm <= BRACKET_TOL
            && r.condition_c_gram <= GRAM_TOL
            && r.lift_numerator <= self.lift_tol
    }
}

/// `|V|^2 |W|^2 - <V, W>^2`, clamped at zero.
pub fn gram_det(v: &[f64], w: &[f64]) -> f64 {
    let vv: f64 = v.iter().map(|a| a * a).sum();
    let ww: f64 = w.iter().map(|a| a * a).sum();
    let vw: f64 = v.iter().zip(w).map(|(a, b)| a * b).sum();
    (vv * ww - vw * vw).max(0.0)
}

fn p_coords(cfg: &SpaceConfig, x: &AlgVec) -> Vec<f64> {
    let c = cfg.basis().coords(x);
    cfg.basis_indices(Subspace::P).iter().map(|&a| c[a]).collect()
}

fn check_structure(cfg: &SpaceConfig, x: &AlgVec, y: &AlgVec) -> Result<f64> {
    for v in [x, y] {
        if v.side() != cfg.m() {
            return Err(Error::DimensionMismatch { left: cfg.m(), right: v.side() });
        }
    }
    let rx = cfg.residual_outside(x, Subspace::UPerpInK);
    let ry = cfg.residual_outside(y, Subspace::P);
    if rx > STRUCTURE_TOL {
        return Err(Error::OutsideSubspace { subspace: Subspace::UPerpInK.name(), residual: rx });
    }
    if ry > STRUCTURE_TOL {
        return Err(Error::OutsideSubspace { subspace: Subspace::P.name(), residual: ry });
    }
    Ok(rx.max(ry))
}

fn unit(v: &AlgVec, what: &str) -> Result<AlgVec> {
    v.normalized().ok_or_else(|| Error::InvalidParameter(format!("{what} must be non-zero")))
}

/// `||[X,Y]||_0^2 + GramDet((Ad_{p^-1} X)_p, (Ad_{p^-1} Y)_p)` for unit `X`
/// in `k` cap `u^perp` and unit `Y` in `p`; zero exactly at flat certificates.
pub fn condition_objective(pt: &FundamentalPoint, x: &AlgVec, y: &AlgVec, n: usize) -> Result<f64> {
    let cfg = SpaceConfig::new(n)?;
    check_structure(&cfg, x, y)?;
    for (v, what) in [(x, "X"), (y, "Y")] {
        let norm = v.norm0();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("{what} must have unit length, got {norm}")));
        }
    }
    let p_inv = f_matrix(pt, n)?.inverse();
    let v = p_coords(&cfg, &adjoint_action(&p_inv, x)?);
    let w = p_coords(&cfg, &adjoint_action(&p_inv, y)?);
    Ok(x.lie(y).dot0(&x.lie(y)) + gram_det(&v, &w))
}

/// The horizontal lifts at `(p, e)` of `X` and `Y`.
pub fn lift_pair(
    p: &GroupElem,
    x: &AlgVec,
    y: &AlgVec,
    op: &MetricOperator,
) -> Result<(crate::lie::TangentPair, crate::lie::TangentPair)> {
    Ok((horizontal_lift(p, x, op)?, horizontal_lift(p, y, op)?))
}

/// Evaluates all residuals for `(X, Y)` at `pt` (after normalizing both
/// vectors) and packages them.
pub fn certify(pt: &FundamentalPoint, x: &AlgVec, y: &AlgVec, op: &MetricOperator) -> Result<FlatWitness> {
    certify_with_tol(pt, x, y, op, LIFT_TOL)
}

pub fn certify_with_tol(
    pt: &FundamentalPoint,
    x: &AlgVec,
    y: &AlgVec,
    op: &MetricOperator,
    lift_tol: f64,
) -> Result<FlatWitness> {
    let cfg = op.config();
    let condition_a = check_structure(cfg, x, y)?;
    let x = unit(x, "X")?;
    let y = unit(y, "Y")?;
    let p = f_matrix(pt, cfg.n())?;
    let p_inv = p.inverse();
    let v = p_coords(cfg, &adjoint_action(&p_inv, &x)?);
    let w = p_coords(cfg, &adjoint_action(&p_inv, &y)?);
    let (a, b) = lift_pair(&p, &x, &y, op)?;
    let residuals = Residuals {
        condition_b_norm: x.lie(&y).norm0(),
        condition_c_gram: gram_det(&v, &w),
        lift_numerator: lift_plane_curvature(&a, &b, op).numerator,
        condition_a,
    };
    Ok(FlatWitness { point: *pt, n: cfg.n(), x, y, residuals, lift_tol })
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= LOCUS_TOL
}

/// Points of the boundary of the fundamental domain where `V` vanishes
/// identically: `alpha = pi/2`, `theta = pi/2`, or `theta = alpha = 0`.
pub fn m2_boundary_flat(pt: &FundamentalPoint) -> bool {
    near(pt.alpha, FRAC_PI_2) || near(pt.theta, FRAC_PI_2) || (near(pt.theta, 0.0) && near(pt.alpha, 0.0))
}

/// `tan^2 alpha (cos^2 theta - sin^2 theta) - sin^2 theta`; zero on the
/// interior flat curve of `M_2`.
pub fn m2_locus_residual(pt: &FundamentalPoint) -> f64 {
    let (s, c) = pt.theta.sin_cos();
    pt.alpha.tan().powi(2) * (c * c - s * s) - s * s
}

/// `theta` on the interior flat curve as a function of `alpha`:
/// `cos 2 theta = 1 / (1 + 2 tan^2 alpha)`.
pub fn m2_curve_theta(alpha: f64) -> f64 {
    if alpha >= FRAC_PI_2 {
        return std::f64::consts::FRAC_PI_4;
    }
    let t2 = alpha.tan().powi(2);
    0.5 * (1.0 / (1.0 + 2.0 * t2)).acos()
}

/// Euclidean distance in the `(theta, alpha)` plane to the interior flat
/// curve of `M_2`, parameterized by `alpha` via [`m2_curve_theta`].
#[derive(Clone, Debug)]
pub struct M2Curve {
    samples: Vec<(f64, f64)>,
}

impl Default for M2Curve {
    fn default() -> Self {
        Self::new(4096)
    }
}

impl M2Curve {
    pub fn new(samples: usize) -> Self {
        let samples = (0..=samples)
            .map(|k| {
                let alpha = FRAC_PI_2 * k as f64 / samples as f64;
                (m2_curve_theta(alpha), alpha)
            })
            .collect();
        Self { samples }
    }

    fn dist2(pt: &FundamentalPoint, alpha: f64) -> f64 {
        (m2_curve_theta(alpha) - pt.theta).powi(2) + (alpha - pt.alpha).powi(2)
    }

    /// Coarse nearest sample followed by golden-section refinement.
    pub fn distance(&self, pt: &FundamentalPoint) -> f64 {
        let (k, _) = self
            .samples
            .iter()
            .enumerate()
            .map(|(k, &(t, a))| (k, (t - pt.theta).powi(2) + (a - pt.alpha).powi(2)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty curve");
        let last = self.samples.len() - 1;
        let (mut lo, mut hi) = (self.samples[k.saturating_sub(1)].1, self.samples[(k + 1).min(last)].1);
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..80 {
            let a = hi - phi * (hi - lo);
            let b = lo + phi * (hi - lo);
            if Self::dist2(pt, a) < Self::dist2(pt, b) {
                hi = b;
            } else {
                lo = a;
            }
        }
        Self::dist2(pt, 0.5 * (lo + hi)).sqrt()
    }

    /// Distance to the whole flat set of `M_2`: the interior curve together
    /// with the boundary lines `alpha = pi/2` and `theta = pi/2`.
    pub fn locus_distance(&self, pt: &FundamentalPoint) -> f64 {
        self.distance(pt).min(FRAC_PI_2 - pt.alpha).min(FRAC_PI_2 - pt.theta)
    }
}

/// Whether the point carries flat planes of `M_2`: on the interior curve
/// `tan^2 alpha = sin^2 theta / (cos^2 theta - sin^2 theta)` or in one of the
/// boundary flat sets.
pub fn m2_flat_locus(pt: &FundamentalPoint) -> bool {
    if m2_boundary_flat(pt) {
        return true;
    }
    let (s, c) = pt.theta.sin_cos();
    c * c - s * s > 0.0 && m2_locus_residual(pt).abs() <= LOCUS_TOL
}

/// `X` of the `M_2` block form: `a` at `(0,1)`, `b` in the `(1,1)` slot.
pub fn m2_x(a: Quaternion, b: Quaternion) -> AlgVec {
    let mut x = AlgVec::zeros(3);
    x.set_entry(0, 1, a);
    x.set_entry(1, 1, b);
    x
}

/// `Y` of the `M_2` block form: `c` at `(0,2)`, `d` at `(1,2)`.
pub fn m2_y(c: Quaternion, d: Quaternion) -> AlgVec {
    let mut y = AlgVec::zeros(3);
    y.set_entry(0, 2, c);
    y.set_entry(1, 2, d);
    y
}

/// The quaternion vectors `V`, `W`: the `(0,2)` and `(1,2)` entries of
/// `Ad_{p^-1} X` and `Ad_{p^-1} Y`.
pub fn m2_v_w(pt: &FundamentalPoint, x: &AlgVec, y: &AlgVec) -> Result<([Quaternion; 2], [Quaternion; 2])> {
    let p_inv = f_matrix(pt, 2)?.inverse();
    let ax = adjoint_action(&p_inv, x)?;
    let ay = adjoint_action(&p_inv, y)?;
    Ok(([ax.get(0, 2), ax.get(1, 2)], [ay.get(0, 2), ay.get(1, 2)]))
}

/// Closed-form flat plane of `M_2` at a point of [`m2_flat_locus`].
///
/// On the interior curve: `a = d = 0`, `c = i` and
/// `b = sin a (cos^2 t - sin^2 t) / (-cos^2 a cos t sin t) i`, for which
/// `V = W`. On the boundary sets `V` vanishes for every `b`, and the pair
/// `b = i`, `c = j` is used.
pub fn m2_witness(pt: &FundamentalPoint, op: &MetricOperator) -> Result<FlatWitness> {
    if op.config().n() != 2 {
        return Err(Error::InvalidParameter(format!("M_2 witness requested for n = {}", op.config().n())));
    }
    let pt = FundamentalPoint::new(pt.theta, pt.alpha)?;
    if m2_boundary_flat(&pt) {
        let x = m2_x(Quaternion::ZERO, Quaternion::I);
        let y = m2_y(Quaternion::J, Quaternion::ZERO);
        return certify(&pt, &x, &y, op);
    }
    if !m2_flat_locus(&pt) {
        return Err(Error::InadmissiblePoint {
            theta: pt.theta,
            alpha: pt.alpha,
            reason: "not on the flat locus of M_2",
        });
    }
    let (st, ct) = pt.theta.sin_cos();
    let (sa, ca) = pt.alpha.sin_cos();
    let beta = sa * (ct * ct - st * st) / (-ca * ca * ct * st);
    let x = m2_x(Quaternion::ZERO, Quaternion::I.scale(beta));
    let y = m2_y(Quaternion::I, Quaternion::ZERO);
    certify(&pt, &x, &y, op)
}

/// `mu = sqrt(tan^2 theta csc^2 alpha - 1)` and
/// `eta = sin theta (cos^2 theta - sin^2 theta) / (mu cos alpha sin^2 alpha cos^3 theta)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MuEta {
    pub mu: f64,
    pub eta: f64,
    pub defined: bool,
}

/// Below this `|cos alpha sin alpha cos theta|` the denominator of `eta` is
/// treated as zero.
const DENOM_TOL: f64 = 1e-12;

pub fn mu_eta(pt: &FundamentalPoint) -> MuEta {
    let (st, ct) = pt.theta.sin_cos();
    let (sa, ca) = pt.alpha.sin_cos();
    let trig = ca * sa * ct;
    if trig.abs() <= DENOM_TOL {
        return MuEta { mu: f64::NAN, eta: f64::NAN, defined: false };
    }
    let mu2 = (st / ct).powi(2) / (sa * sa) - 1.0;
    if !(mu2 > 0.0) {
        return MuEta { mu: mu2.max(0.0).sqrt(), eta: f64::NAN, defined: false };
    }
    let mu = mu2.sqrt();
    let eta = st * (ct * ct - st * st) / (mu * ca * sa * sa * ct.powi(3));
    MuEta { mu, eta, defined: true }
}

/// The open region where `mu > 0` and `eta` is defined.
pub fn in_region_z(pt: &FundamentalPoint) -> bool {
    let me = mu_eta(pt);
    me.defined && me.mu > 0.0
}

/// Coefficients of the linear system in `(mu^2, eta mu)` whose solution gives
/// `V = cot(alpha) W`: rows `[a11, a12, rhs1]`, `[a21, a22, rhs2]`.
pub fn lemma_system(pt: &FundamentalPoint) -> [[f64; 3]; 2] {
    let (st, ct) = pt.theta.sin_cos();
    let (sa, ca) = pt.alpha.sin_cos();
    [
        [ca * (ct * ct - st * st), -ca * ca * ct * st, ca * (st * st - ct * ct)],
        [sa * st, ca * sa * ct, ca * ca * st / sa],
    ]
}

/// Determinant of [`lemma_system`] and its closed form `cos^2 a sin a cos^3 t`.
pub fn cramer_denominator(pt: &FundamentalPoint) -> (f64, f64) {
    let s = lemma_system(pt);
    let det = s[0][0] * s[1][1] - s[0][1] * s[1][0];
    let (sa, ca) = pt.alpha.sin_cos();
    (det, ca * ca * sa * pt.theta.cos().powi(3))
}

/// Closed-form `(mu^2, eta mu)` solving [`lemma_system`].
pub fn lemma_solution(pt: &FundamentalPoint) -> (f64, f64) {
    let (st, ct) = pt.theta.sin_cos();
    let (sa, ca) = pt.alpha.sin_cos();
    let mu2 = (st / ct).powi(2) / (sa * sa) - 1.0;
    let eta_mu = st * (2.0 * ct * ct - 1.0) / (ca * sa * sa * ct.powi(3));
    (mu2, eta_mu)
}

/// Residuals of both equations of [`lemma_system`] at the closed-form
/// solution, each divided by `1 + max |term|` of its equation.
pub fn lemma_residuals(pt: &FundamentalPoint) -> [f64; 2] {
    let (mu2, eta_mu) = lemma_solution(pt);
    lemma_system(pt).map(|[a, b, rhs]| {
        let (t1, t2) = (a * mu2, b * eta_mu);
        let scale = 1.0 + t1.abs().max(t2.abs()).max(rhs.abs());
        (t1 + t2 - rhs).abs() / scale
    })
}

/// The explicit flat family for `n >= 3`: `X0` and `Y0` in the bottom-right
/// `4 x 4` block,
///
/// ```text
/// X0 = [ 0   0    1    0 ]     Y0 = [ 0    0     0   1    ]
///      [ 0   0    mu b 0 ]          [ 0    0     0   -b/mu]
///      [ -1  mu b eta b 0 ]         [ 0    0     0   0    ]
///      [ 0   0    0    0 ]          [ -1   -b/mu 0   0    ]
/// ```
pub fn family_n_blocks(n: usize, me: &MuEta, b: Quaternion) -> (AlgVec, AlgVec) {
    let m = n + 1;
    let o = m - 4;
    let mut x = AlgVec::zeros(m);
    x.set_entry(o, o + 2, Quaternion::ONE);
    x.set_entry(o + 1, o + 2, b.scale(me.mu));
    x.set_entry(o + 2, o + 2, b.scale(me.eta));
    let mut y = AlgVec::zeros(m);
    y.set_entry(o, o + 3, Quaternion::ONE);
    y.set_entry(o + 1, o + 3, b.scale(-1.0 / me.mu));
    (x, y)
}

/// Certified flat plane at a point of region `Z` for `n >= 3`, for any unit
/// imaginary `b`.
pub fn family_n_witness(pt: &FundamentalPoint, b: Quaternion, op: &MetricOperator) -> Result<FlatWitness> {
    let n = op.config().n();
    if n < 3 {
        return Err(Error::InvalidParameter(format!("the open flat family needs n >= 3, got {n}")));
    }
    if b.re().abs() > STRUCTURE_TOL || (b.norm() - 1.0).abs() > STRUCTURE_TOL {
        return Err(Error::InvalidParameter(format!("b must be a unit imaginary quaternion, got {b}")));
    }
    let pt = FundamentalPoint::new(pt.theta, pt.alpha)?;
    let me = mu_eta(&pt);
    if !(me.defined && me.mu > 0.0) {
        return Err(Error::InadmissiblePoint { theta: pt.theta, alpha: pt.alpha, reason: "outside region Z" });
    }
    let (x, y) = family_n_blocks(n, &me, b);
    certify(&pt, &x, &y, op)
}

/// Local optimizer used by [`find_flat_plane_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimizer {
    /// Projected gradient descent: step [`STEP`], halved until the objective
    /// decreases, stopping at tangent gradient norm [`GRAD_TOL`] or
    /// [`MAX_ITERS`] iterations.
    ProjectedGradient,
    /// Levenberg-Marquardt on the residual vector whose squared norm is the
    /// objective, with steps restricted to the tangent space of the spheres.
    #[default]
    LevenbergMarquardt,
}

/// Settings of [`find_flat_plane_with`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SearchOptions {
    pub restarts: usize,
    pub optimizer: Optimizer,
    /// Lift tolerance of the returned witness.
    pub lift_tol: f64,
}

impl SearchOptions {
    pub fn new(restarts: usize) -> Self {
        Self { restarts, optimizer: Optimizer::default(), lift_tol: LIFT_TOL }
    }
}

/// Iteration cap of the Levenberg-Marquardt optimizer.
pub const LM_MAX_ITERS: usize = 500;
/// A Levenberg-Marquardt run ends when the objective drops by less than this
/// fraction over [`LM_WINDOW`] iterations.
pub const LM_REL_TOL: f64 = 1e-3;
pub const LM_WINDOW: usize = 10;
/// The stall rule only applies above this objective level.
pub const LM_COARSE: f64 = 1e-8;
/// Weight of the bracket residual in the final polish of a successful search.
pub const POLISH_WEIGHT: f64 = 1e10;

/// Outcome of [`find_flat_plane`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlatSearch {
    /// Certified pair when the best objective reached [`SEARCH_TOL`].
    pub witness: Option<FlatWitness>,
    pub best_objective: f64,
    /// Lifted curvature numerator of the best pair.
    pub best_lift_numerator: f64,
    pub best_x: AlgVec,
    pub best_y: AlgVec,
    /// Total optimizer iterations over all restarts.
    pub iterations: usize,
    /// Restarts actually run (the search stops at the first success).
    pub restarts_used: usize,
}

impl FlatSearch {
    pub fn found(&self) -> bool {
        self.witness.as_ref().is_some_and(FlatWitness::is_valid)
    }
}

/// The Condition A/B/C objective in coordinates:
/// `x` over the basis of `k` cap `u^perp`, `y` over the basis of `p`.
///
/// With `u = P x`, `v = Q y` the projected pair, the objective is the squared
/// norm of the residual `(B(x, y), u_i v_j - u_j v_i for i < j)`, where `B` is
/// the bracket (which lands in `p`); the second block sums to the Gram
/// determinant.
struct FlatProblem {
    dx: usize,
    dy: usize,
    dp: usize,
    /// `brk[(a * dy + b) * dp + c]`: `p`-coordinate `c` of `[e_a, f_b]`.
    brk: Vec<f64>,
    /// `dp x dx`, row-major: `p`-coordinates of `Ad_{p^-1} e_a`.
    px: Vec<f64>,
    /// `dp x dy`, row-major.
    py: Vec<f64>,
    xs: Vec<AlgVec>,
    ys: Vec<AlgVec>,
}

struct Eval {
    f: f64,
    gx: Vec<f64>,
    gy: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

fn mat_vec(m: &[f64], rows: usize, v: &[f64]) -> Vec<f64> {
    let cols = v.len();
    (0..rows).map(|r| dot(&m[r * cols..(r + 1) * cols], v)).collect()
}

fn mat_t_vec(m: &[f64], cols: usize, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; cols];
    for (r, &vr) in v.iter().enumerate() {
        for c in 0..cols {
            out[c] += m[r * cols + c] * vr;
        }
    }
    out
}

fn normalize(v: &mut [f64]) {
    let n = dot(v, v).sqrt();
    v.iter_mut().for_each(|a| *a /= n);
}

fn random_unit(rng: &mut impl Rng, d: usize) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        if dot(&v, &v) > 1e-4 {
            normalize(&mut v);
            return v;
        }
    }
}

fn tangent(g: &[f64], x: &[f64]) -> Vec<f64> {
    let s = dot(g, x);
    g.iter().zip(x).map(|(a, b)| a - s * b).collect()
}

impl FlatProblem {
    fn new(cfg: &SpaceConfig, p: &GroupElem) -> Self {
        let basis: &SpBasis = cfg.basis();
        let xs = cfg.subspace_basis(Subspace::UPerpInK);
        let ys = cfg.subspace_basis(Subspace::P);
        let p_idx = cfg.basis_indices(Subspace::P);
        let (dx, dy, dp) = (xs.len(), ys.len(), p_idx.len());
        let pc = |v: &AlgVec| {
            let c = basis.coords(v);
            p_idx.iter().map(|&a| c[a]).collect::<Vec<f64>>()
        };
        let mut brk = Vec::with_capacity(dx * dy * dp);
        for xa in &xs {
            for yb in &ys {
                brk.extend(pc(&xa.lie(yb)));
            }
        }
        let p_inv = p.inverse();
        let ad = |v: &AlgVec| pc(&adjoint_action(&p_inv, v).expect("sizes match"));
        let adx: Vec<Vec<f64>> = xs.iter().map(ad).collect();
        let ady: Vec<Vec<f64>> = ys.iter().map(ad).collect();
        let px = (0..dp).flat_map(|r| adx.iter().map(move |col| col[r])).collect();
        let py = (0..dp).flat_map(|r| ady.iter().map(move |col| col[r])).collect();
        Self { dx, dy, dp, brk, px, py, xs, ys }
    }

    fn brk_row(&self, a: usize, b: usize) -> &[f64] {
        let start = (a * self.dy + b) * self.dp;
        &self.brk[start..start + self.dp]
    }

    fn bracket(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dp];
        for (a, &xa) in x.iter().enumerate() {
            for (b, &yb) in y.iter().enumerate() {
                let s = xa * yb;
                out.iter_mut().zip(self.brk_row(a, b)).for_each(|(o, r)| *o += s * r);
            }
        }
        out
    }

    fn value(&self, x: &[f64], y: &[f64]) -> f64 {
        let br = self.bracket(x, y);
        let u = mat_vec(&self.px, self.dp, x);
        let v = mat_vec(&self.py, self.dp, y);
        dot(&br, &br) + gram_det(&u, &v)
    }

    fn eval(&self, x: &[f64], y: &[f64]) -> Eval {
        let br = self.bracket(x, y);
        let u = mat_vec(&self.px, self.dp, x);
        let v = mat_vec(&self.py, self.dp, y);
        let (uu, vv, uv) = (dot(&u, &u), dot(&v, &v), dot(&u, &v));
        let f = dot(&br, &br) + (uu * vv - uv * uv).max(0.0);

        let mut gx = vec![0.0; self.dx];
        let mut gy = vec![0.0; self.dy];
        for a in 0..self.dx {
            for b in 0..self.dy {
                let t = 2.0 * dot(self.brk_row(a, b), &br);
                gx[a] += t * y[b];
                gy[b] += t * x[a];
            }
        }
        let du: Vec<f64> = u.iter().zip(&v).map(|(ui, vi)| 2.0 * (ui * vv - uv * vi)).collect();
        let dv: Vec<f64> = v.iter().zip(&u).map(|(vi, ui)| 2.0 * (vi * uu - uv * ui)).collect();
        mat_t_vec(&self.px, self.dx, &du).iter().zip(gx.iter_mut()).for_each(|(d, g)| *g += d);
        mat_t_vec(&self.py, self.dy, &dv).iter().zip(gy.iter_mut()).for_each(|(d, g)| *g += d);
        Eval { f, gx, gy }
    }

    /// Residual vector and its Jacobian with respect to `(x, y)`.
    fn residual(&self, x: &[f64], y: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let (dx, dy, dp) = (self.dx, self.dy, self.dp);
        let u = mat_vec(&self.px, dp, x);
        let v = mat_vec(&self.py, dp, y);
        let pairs = dp * (dp - 1) / 2;
        let mut r = DVector::zeros(dp + pairs);
        let mut jac = DMatrix::zeros(dp + pairs, dx + dy);
        for a in 0..dx {
            for b in 0..dy {
                for (c, &k) in self.brk_row(a, b).iter().enumerate() {
                    if k != 0.0 {
                        r[c] += x[a] * y[b] * k;
                        jac[(c, a)] += y[b] * k;
                        jac[(c, dx + b)] += x[a] * k;
                    }
                }
            }
        }
        let mut row = dp;
        for i in 0..dp {
            for j in i + 1..dp {
                r[row] = u[i] * v[j] - u[j] * v[i];
                for a in 0..dx {
                    jac[(row, a)] = self.px[i * dx + a] * v[j] - self.px[j * dx + a] * v[i];
                }
                for b in 0..dy {
                    jac[(row, dx + b)] = u[i] * self.py[j * dy + b] - u[j] * self.py[i * dy + b];
                }
                row += 1;
            }
        }
        (r, jac)
    }

    fn to_algvec(basis: &[AlgVec], c: &[f64]) -> AlgVec {
        basis.iter().zip(c).fold(AlgVec::zeros(basis[0].side()), |acc, (e, &s)| acc.axpy(s, e))
    }

    fn descend(&self, opt: Optimizer, x: Vec<f64>, y: Vec<f64>) -> (Vec<f64>, Vec<f64>, f64, usize) {
        match opt {
            Optimizer::ProjectedGradient => self.projected_gradient(x, y),
            Optimizer::LevenbergMarquardt => self.levenberg_marquardt(x, y),
        }
    }

    fn projected_gradient(&self, mut x: Vec<f64>, mut y: Vec<f64>) -> (Vec<f64>, Vec<f64>, f64, usize) {
        let mut cur = self.eval(&x, &y);
        let mut iters = 0;
        while iters < MAX_ITERS {
            iters += 1;
            let tx = tangent(&cur.gx, &x);
            let ty = tangent(&cur.gy, &y);
            if (dot(&tx, &tx) + dot(&ty, &ty)).sqrt() <= GRAD_TOL {
                break;
            }
            let mut step = STEP;
            let mut accepted = false;
            while step > 1e-20 {
                let mut nx: Vec<f64> = x.iter().zip(&tx).map(|(a, g)| a - step * g).collect();
                let mut ny: Vec<f64> = y.iter().zip(&ty).map(|(a, g)| a - step * g).collect();
                normalize(&mut nx);
                normalize(&mut ny);
                if self.value(&nx, &ny) < cur.f {
                    x = nx;
                    y = ny;
                    cur = self.eval(&x, &y);
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        (x, y, cur.f, iters)
    }

    fn levenberg_marquardt(&self, x: Vec<f64>, y: Vec<f64>) -> (Vec<f64>, Vec<f64>, f64, usize) {
        self.levenberg_marquardt_weighted(x, y, 1.0)
    }

    /// Levenberg-Marquardt on `w |B|^2 + GramDet`. Steps are confined to the
    /// tangent space of the spheres and retracted by normalization. Stops on
    /// tangent gradient norm [`GRAD_TOL`], on a relative decrease below
    /// [`LM_REL_TOL`] over [`LM_WINDOW`] steps while above [`LM_COARSE`], or after
    /// [`LM_MAX_ITERS`] iterations.
    fn levenberg_marquardt_weighted(
        &self,
        mut x: Vec<f64>,
        mut y: Vec<f64>,
        weight: f64,
    ) -> (Vec<f64>, Vec<f64>, f64, usize) {
        let (dx, dy, dp) = (self.dx, self.dy, self.dp);
        let sw = weight.sqrt();
        let value = |x: &[f64], y: &[f64]| {
            let br = self.bracket(x, y);
            let u = mat_vec(&self.px, dp, x);
            let v = mat_vec(&self.py, dp, y);
            weight * dot(&br, &br) + gram_det(&u, &v)
        };
        let mut lambda = 1e-3;
        let mut f = value(&x, &y);
        let mut iters = 0;
        let mut checkpoint = f;
        while iters < LM_MAX_ITERS && f > 0.0 {
            iters += 1;
            let (mut r, mut jac) = self.residual(&x, &y);
            if weight != 1.0 {
                for c in 0..dp {
                    r[c] *= sw;
                    jac.row_mut(c).scale_mut(sw);
                }
            }
            // Restrict to the tangent space: J (I - x x^T) on each block.
            for (off, v) in [(0, &x), (dx, &y)] {
                let d = v.len();
                for row in 0..jac.nrows() {
                    let s: f64 = (0..d).map(|i| jac[(row, off + i)] * v[i]).sum();
                    for i in 0..d {
                        jac[(row, off + i)] -= s * v[i];
                    }
                }
            }
            let g = jac.tr_mul(&r);
            if 2.0 * g.norm() <= GRAD_TOL {
                break;
            }
            let h = jac.tr_mul(&jac);
            let mut improved = false;
            while lambda < 1e16 {
                let mut damped = h.clone();
                for i in 0..dx + dy {
                    damped[(i, i)] += lambda;
                }
                let Some(chol) = damped.cholesky() else {
                    lambda *= 4.0;
                    continue;
                };
                let delta = chol.solve(&(-&g));
                let mut nx: Vec<f64> = (0..dx).map(|i| x[i] + delta[i]).collect();
                let mut ny: Vec<f64> = (0..dy).map(|i| y[i] + delta[dx + i]).collect();
                normalize(&mut nx);
                normalize(&mut ny);
                let nf = value(&nx, &ny);
                if nf < f {
                    x = nx;
                    y = ny;
                    f = nf;
                    lambda = (lambda / 3.0).max(1e-15);
                    improved = true;
                    break;
                }
                lambda *= 4.0;
            }
            if !improved {
                break;
            }
            if iters % LM_WINDOW == 0 {
                if f > LM_COARSE && checkpoint - f <= LM_REL_TOL * checkpoint {
                    break;
                }
                checkpoint = f;
            }
        }
        (x, y, f, iters)
    }

    /// Re-runs Levenberg-Marquardt with the bracket residual weighted by
    /// [`POLISH_WEIGHT`], pushing the error of a near-flat pair out of
    /// Condition B (which can be met exactly) and into the Gram term.
    fn polish(&self, x: Vec<f64>, y: Vec<f64>) -> (Vec<f64>, Vec<f64>, usize) {
        let (x, y, _, it) = self.levenberg_marquardt_weighted(x, y, POLISH_WEIGHT);
        (x, y, it)
    }
}

/// Seeded multi-start search for a Condition A/B/C pair at `pt`, with the
/// default [`SearchOptions`] for `restarts`.
pub fn find_flat_plane(pt: &FundamentalPoint, op: &MetricOperator, seed: u64, restarts: usize) -> Result<FlatSearch> {
    find_flat_plane_with(pt, op, seed, &SearchOptions::new(restarts))
}

/// Seeded multi-start search. Every restart draws uniform unit starting
/// vectors from one generator seeded with `seed`; the search stops at the
/// first restart reaching [`SEARCH_TOL`].
pub fn find_flat_plane_with(
    pt: &FundamentalPoint,
    op: &MetricOperator,
    seed: u64,
    opts: &SearchOptions,
) -> Result<FlatSearch> {
    if opts.restarts == 0 {
        return Err(Error::InvalidParameter("restarts must be at least 1".into()));
    }
    let cfg = op.config();
    let pt = FundamentalPoint::new(pt.theta, pt.alpha)?;
    let p = f_matrix(&pt, cfg.n())?;
    let prob = FlatProblem::new(cfg, &p);
    let mut rng = seeded_rng(seed);
    let mut best: Option<(f64, Vec<f64>, Vec<f64>)> = None;
    let mut iterations = 0;
    let mut restarts_used = 0;
    for _ in 0..opts.restarts {
        restarts_used += 1;
        let x0 = random_unit(&mut rng, prob.dx);
        let y0 = random_unit(&mut rng, prob.dy);
        let (x, y, f, it) = prob.descend(opts.optimizer, x0, y0);
        iterations += it;
        if best.as_ref().is_none_or(|b| f < b.0) {
            best = Some((f, x, y));
        }
        if f <= SEARCH_TOL {
            break;
        }
    }
    let (f, x, y) = best.expect("at least one restart");
    let mut cert = certify_with_tol(
        &pt,
        &FlatProblem::to_algvec(&prob.xs, &x),
        &FlatProblem::to_algvec(&prob.ys, &y),
        op,
        opts.lift_tol,
    )?;
    if f <= SEARCH_TOL && !cert.is_valid() {
        let (px, py, it) = prob.polish(x, y);
        iterations += it;
        let polished = certify_with_tol(
            &pt,
            &FlatProblem::to_algvec(&prob.xs, &px),
            &FlatProblem::to_algvec(&prob.ys, &py),
            op,
            opts.lift_tol,
        )?;
        if polished.is_valid() {
            cert = polished;
        }
    }
    Ok(FlatSearch {
        best_lift_numerator: cert.residuals.lift_numerator,
        best_x: cert.x.clone(),
        best_y: cert.y.clone(),
        witness: (f <= SEARCH_TOL).then_some(cert),
        best_objective: f,
        iterations,
        restarts_used,
    })
}

/// Minimum of `||[X, Y]||_0^2` over orthonormal pairs in
/// `q = sp(n-1)^perp` inside `sp(n)` (the last row and column of `sp(n)`),
/// by seeded multi-start projected gradient descent with Gram-Schmidt
/// retraction.
pub fn sphere_min_bracket(n: usize, seed: u64, restarts: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n must be >= 2, got {n}")));
    }
    if restarts == 0 {
        return Err(Error::InvalidParameter("restarts must be at least 1".into()));
    }
    let basis = SpBasis::new(n);
    let q: Vec<AlgVec> = (0..basis.dim())
        .filter(|&a| {
            let (r, c) = basis.elems()[a].position();
            r == n - 1 || c == n - 1
        })
        .map(|a| basis.element(a))
        .collect();
    let d = q.len();
    let g = basis.dim();
    let mut brk = Vec::with_capacity(d * d * g);
    for a in &q {
        for b in &q {
            brk.extend(basis.coords(&a.lie(b)).iter());
        }
    }
    let bracket = |x: &[f64], y: &[f64]| {
        let mut out = vec![0.0; g];
        for a in 0..d {
            for b in 0..d {
                let s = x[a] * y[b];
                if s != 0.0 {
                    let row = &brk[(a * d + b) * g..(a * d + b + 1) * g];
                    out.iter_mut().zip(row).for_each(|(o, r)| *o += s * r);
                }
            }
        }
        out
    };
    let value = |x: &[f64], y: &[f64]| {
        let br = bracket(x, y);
        dot(&br, &br)
    };
    let grad = |x: &[f64], y: &[f64]| {
        let br = bracket(x, y);
        let mut gx = vec![0.0; d];
        let mut gy = vec![0.0; d];
        for a in 0..d {
            for b in 0..d {
                let t = 2.0 * dot(&brk[(a * d + b) * g..(a * d + b + 1) * g], &br);
                gx[a] += t * y[b];
                gy[b] += t * x[a];
            }
        }
        (gx, gy)
    };
    let retract = |x: &mut Vec<f64>, y: &mut Vec<f64>| {
        normalize(x);
        let s = dot(y, x);
        y.iter_mut().zip(x.iter()).for_each(|(b, a)| *b -= s * a);
        normalize(y);
    };

    let mut rng = seeded_rng(seed);
    let mut best = f64::INFINITY;
    for _ in 0..restarts {
        let mut x = random_unit(&mut rng, d);
        let mut y = random_unit(&mut rng, d);
        retract(&mut x, &mut y);
        let mut f = value(&x, &y);
        for _ in 0..MAX_ITERS {
            let (gx, gy) = grad(&x, &y);
            // Tangent space of the Stiefel manifold of orthonormal pairs.
            let (xx, xy, yx, yy) = (dot(&gx, &x), dot(&gx, &y), dot(&gy, &x), dot(&gy, &y));
            let sym = 0.5 * (xy + yx);
            let tx: Vec<f64> = (0..d).map(|i| gx[i] - xx * x[i] - sym * y[i]).collect();
            let ty: Vec<f64> = (0..d).map(|i| gy[i] - yy * y[i] - sym * x[i]).collect();
            if (dot(&tx, &tx) + dot(&ty, &ty)).sqrt() <= GRAD_TOL {
                break;
            }
            let mut step = STEP;
            let mut moved = false;
            while step > 1e-20 {
                let mut nx: Vec<f64> = (0..d).map(|i| x[i] - step * tx[i]).collect();
                let mut ny: Vec<f64> = (0..d).map(|i| y[i] - step * ty[i]).collect();
                retract(&mut nx, &mut ny);
                let nf = value(&nx, &ny);
                if nf < f {
                    x = nx;
                    y = ny;
                    f = nf;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if !moved {
                break;
            }
        }
        best = best.min(f);
    }
    Ok(best)
}
