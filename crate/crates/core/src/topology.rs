//! Cohomology rings and first Pontryagin classes of the circle quotients
//! `R_2 = Sp(3)/Sp(1)^2 S^1` and `Q_2 = Delta S^1 \ Sp(3) / Sp(1)^2`.
//!
//! Both rings are `Z[y1^2, y2^2, u] / (psi_K(s) - psi_H(s))` where `s` runs
//! over the generators `sigma_k(x_i^2)` of `H*(BSp(3))` and `psi_K`, `psi_H`
//! are the restrictions to the two torus factors. Everything here is exact
//! integer arithmetic.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{quotient_group, AbelianGroup, AbelianPresentation, Hermite};
use crate::poly::{elementary_symmetric_squares, Exponents, GradedIntPoly, RingMap, Var, NVARS};

/// Degree bound used for every ideal membership in this module.
pub const MEMBERSHIP_DEGREE: u32 = 12;

const XS: [Var; 3] = [Var::X1, Var::X2, Var::X3];

fn v(x: Var) -> GradedIntPoly {
    GradedIntPoly::var(x)
}

fn sq(x: Var) -> GradedIntPoly {
    v(x).pow(2)
}

/// Cohomological degree of a monomial.
fn mono_degree(e: &Exponents) -> u32 {
    Var::ALL.iter().map(|x| x.degree() * e[x.index()]).sum()
}

/// All monomials in `vars` of cohomological degree at most `bound`.
fn monomials_up_to(vars: &[Var], bound: u32) -> Vec<Exponents> {
    let mut out = vec![[0; NVARS]];
    for &x in vars {
        let mut next = Vec::new();
        for e in &out {
            let mut e = *e;
            while mono_degree(&e) <= bound {
                next.push(e);
                e[x.index()] += 1;
            }
        }
        out = next;
    }
    out
}

/// Multipliers `m_i` with `p = sum m_i g_i`, all products of degree at most
/// `degree_bound`, found by exact integer linear algebra on monomial
/// coefficients. `None` when no such combination exists within the bound.
pub fn ideal_member(p: &GradedIntPoly, generators: &[GradedIntPoly], degree_bound: u32) -> Option<Vec<GradedIntPoly>> {
    if p.is_zero() {
        return Some(vec![GradedIntPoly::zero(); generators.len()]);
    }
    if p.max_degree()? > degree_bound {
        return None;
    }
    let mut vars = p.variables();
    for g in generators {
        vars.extend(g.variables());
    }
    vars.sort();
    vars.dedup();
    let columns = monomials_up_to(&vars, degree_bound);
    let col_of = |e: &Exponents| columns.iter().position(|c| c == e);

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (i, g) in generators.iter().enumerate() {
        let Some(gd) = g.max_degree() else { continue };
        for m in monomials_up_to(&vars, degree_bound.saturating_sub(gd)) {
            if gd + mono_degree(&m) > degree_bound {
                continue;
            }
            let prod = g * &GradedIntPoly::monomial(1, m);
            let mut row = vec![0i128; columns.len()];
            for (e, &c) in prod.terms() {
                row[col_of(e).expect("product within degree bound")] = c;
            }
            rows.push(row);
            labels.push((i, m));
        }
    }
    let mut target = vec![0i128; columns.len()];
    for (e, &c) in p.terms() {
        target[col_of(e)?] = c;
    }
    let coeffs = Hermite::new(&rows, columns.len()).ok()?.solve(&target)?;
    let mut cert = vec![GradedIntPoly::zero(); generators.len()];
    for ((i, m), c) in labels.into_iter().zip(coeffs) {
        cert[i] = &cert[i] + &GradedIntPoly::monomial(c, m);
    }
    Some(cert)
}

/// `sum m_i g_i`.
pub fn combine(multipliers: &[GradedIntPoly], generators: &[GradedIntPoly]) -> GradedIntPoly {
    multipliers.iter().zip(generators).fold(GradedIntPoly::zero(), |acc, (m, g)| &acc + &(m * g))
}

/// Whether every element of `a` lies in the ideal generated by `b`.
pub fn ideal_contains_all(b: &[GradedIntPoly], a: &[GradedIntPoly], degree_bound: u32) -> bool {
    a.iter().all(|p| ideal_member(p, b, degree_bound).is_some())
}

/// Positive roots of `Sp(n)` in `x_1, ..., x_n`: `2 x_i` and `x_i +- x_j`.
pub fn sp_positive_roots(vars: &[Var]) -> Vec<GradedIntPoly> {
    let mut roots: Vec<GradedIntPoly> = vars.iter().map(|&x| v(x).scale(2)).collect();
    for (i, &a) in vars.iter().enumerate() {
        for &b in &vars[i + 1..] {
            roots.push(&v(a) + &v(b));
            roots.push(&v(a) - &v(b));
        }
    }
    roots
}

pub fn sum_of_squares(roots: &[GradedIntPoly]) -> GradedIntPoly {
    roots.iter().fold(GradedIntPoly::zero(), |acc, r| &acc + &r.pow(2))
}

/// The identity `sum beta^2 = 8 sigma_1(x_i^2)` over the positive roots of
/// `Sp(3)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SigmaCheck {
    pub sum: GradedIntPoly,
    pub expected: GradedIntPoly,
    pub holds: bool,
}

pub fn sigma_check() -> SigmaCheck {
    let sum = sum_of_squares(&sp_positive_roots(&XS));
    let expected = elementary_symmetric_squares(1, &XS).expect("three variables").scale(8);
    SigmaCheck { holds: sum == expected, sum, expected }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Space {
    Q2,
    R2,
}

impl Space {
    pub fn name(self) -> &'static str {
        match self {
            Space::Q2 => "Q2",
            Space::R2 => "R2",
        }
    }

    /// Restriction `H*(BT_G) -> H*(BT_K)`.
    pub fn k_map(self) -> RingMap {
        let middle = match self {
            Space::R2 => GradedIntPoly::zero(),
            Space::Q2 => v(Var::U),
        };
        RingMap::new()
            .assign(Var::X1, v(Var::Y1))
            .and_then(|m| m.assign(Var::X2, middle))
            .and_then(|m| m.assign(Var::X3, v(Var::Y2)))
            .expect("degree-two images")
    }

    /// Restriction `H*(BT_G) -> H*(BT_H)` to the circle.
    pub fn h_map(self) -> RingMap {
        let image = match self {
            Space::R2 => v(Var::U),
            Space::Q2 => GradedIntPoly::zero(),
        };
        RingMap::constant_on(&XS, &image).expect("degree-two image")
    }

    /// Invariant factors of `H^4(-; Z_24) / p_1` as published.
    pub fn published_quotient(self) -> AbelianGroup {
        let factors = match self {
            Space::Q2 => vec![6, 24],
            Space::R2 => vec![2, 24],
        };
        AbelianGroup { invariant_factors: factors, free_rank: 0 }
    }
}

/// A graded ring `Z[generators] / (relations)` whose generators are
/// monomials. `elimination_order` fixes which generators are rewritten first
/// when reducing to a canonical form.
#[derive(Clone, Debug, PartialEq)]
pub struct Presentation {
    pub generators: Vec<Exponents>,
    pub relations: Vec<GradedIntPoly>,
    pub elimination_order: Vec<Var>,
}

fn exps(powers: &[(Var, u32)]) -> Exponents {
    let mut e = [0; NVARS];
    for &(x, k) in powers {
        e[x.index()] = k;
    }
    e
}

/// `Z[y1^2, y2^2, u] / (psi_K(sigma_k) - psi_H(sigma_k))`.
pub fn presentation(space: Space) -> Presentation {
    let relations = (1..=3)
        .map(|k| {
            let s = elementary_symmetric_squares(k, &XS).expect("k <= 3");
            let a = space.k_map().apply(&s).expect("x variables assigned");
            let b = space.h_map().apply(&s).expect("x variables assigned");
            &a - &b
        })
        .collect();
    Presentation {
        generators: vec![exps(&[(Var::Y1, 2)]), exps(&[(Var::Y2, 2)]), exps(&[(Var::U, 1)])],
        relations,
        elimination_order: vec![Var::Y2, Var::Y1, Var::U],
    }
}

/// The two-generator form `Z[y1^2, u] / I_2` (for `R_2`) or `/ J_2` (for
/// `Q_2`) with the published generators.
pub fn reduced_presentation(space: Space) -> Presentation {
    let (y, u) = (Var::Y1, Var::U);
    let first = match space {
        Space::R2 => {
            GradedIntPoly::term(3, &[(u, 4)]) - GradedIntPoly::term(3, &[(y, 2), (u, 2)])
                + GradedIntPoly::term(1, &[(y, 4)])
        }
        Space::Q2 => {
            GradedIntPoly::term(1, &[(y, 4)])
                + GradedIntPoly::term(1, &[(y, 2), (u, 2)])
                + GradedIntPoly::term(1, &[(u, 4)])
        }
    };
    Presentation {
        generators: vec![exps(&[(y, 2)]), exps(&[(u, 1)])],
        relations: vec![first, GradedIntPoly::term(1, &[(u, 6)])],
        elimination_order: vec![y, u],
    }
}

/// Solves the degree-four relation of [`presentation`] for `y2^2` and
/// substitutes into the remaining relations.
pub fn eliminate_y2(space: Space) -> Result<Vec<GradedIntPoly>> {
    let pres = presentation(space);
    let first = &pres.relations[0];
    let y2sq = exps(&[(Var::Y2, 2)]);
    let c = first.coeff(&y2sq);
    let rest = first - &GradedIntPoly::monomial(c, y2sq);
    if c.abs() != 1 || rest.variables().contains(&Var::Y2) {
        return Err(Error::NotInRing(format!("cannot solve `{first}` for y2^2")));
    }
    let image = rest.scale(-c);
    pres.relations[1..]
        .iter()
        .map(|r| r.substitute_square(Var::Y2, &image))
        .filter(|r| r.as_ref().map_or(true, |p| !p.is_zero()))
        .collect()
}

/// Whether the eliminated relations generate the same ideal as the published
/// two-variable generators.
pub fn elimination_check(space: Space) -> bool {
    let Ok(derived) = eliminate_y2(space) else {
        return false;
    };
    let published = reduced_presentation(space).relations;
    ideal_contains_all(&derived, &published, MEMBERSHIP_DEGREE)
        && ideal_contains_all(&published, &derived, MEMBERSHIP_DEGREE)
}

/// Monomials of the presented ring in cohomological degree `degree`, i.e.
/// products of generators, sorted so that `elimination_order` variables come
/// first.
fn ring_monomials(pres: &Presentation, degree: u32) -> Vec<Exponents> {
    let mut out = vec![[0; NVARS]];
    for g in &pres.generators {
        let mut next = Vec::new();
        for e in &out {
            let mut e = *e;
            while mono_degree(&e) <= degree {
                next.push(e);
                for i in 0..NVARS {
                    e[i] += g[i];
                }
            }
        }
        out = next;
    }
    out.retain(|e| mono_degree(e) == degree);
    let key = |e: &Exponents| pres.elimination_order.iter().map(|x| e[x.index()]).collect::<Vec<_>>();
    out.sort_by_key(|e| std::cmp::Reverse(key(e)));
    out
}

/// Basis monomials and relation rows of the degree-`degree` part.
pub fn degree_part(pres: &Presentation, degree: u32) -> Result<(Vec<Exponents>, Vec<Vec<i128>>)> {
    let basis = ring_monomials(pres, degree);
    let mut rows = Vec::new();
    for r in &pres.relations {
        let Some(rd) = r.degree() else {
            return Err(Error::InvalidParameter(format!("relation `{r}` is not homogeneous")));
        };
        if rd > degree {
            continue;
        }
        for m in ring_monomials(pres, degree - rd) {
            rows.push(coordinates(&basis, &(r * &GradedIntPoly::monomial(1, m)))?);
        }
    }
    Ok((basis, rows))
}

fn coordinates(basis: &[Exponents], p: &GradedIntPoly) -> Result<Vec<i128>> {
    let mut out = vec![0; basis.len()];
    for (e, &c) in p.terms() {
        let i = basis
            .iter()
            .position(|b| b == e)
            .ok_or_else(|| Error::NotInRing(format!("`{p}` leaves the presented ring")))?;
        out[i] = c;
    }
    Ok(out)
}

/// Canonical representative of a homogeneous `p` in the presented ring.
pub fn canonical_form(pres: &Presentation, p: &GradedIntPoly) -> Result<GradedIntPoly> {
    let Some(d) = p.degree() else {
        return Ok(GradedIntPoly::zero());
    };
    let (basis, rows) = degree_part(pres, d)?;
    let coords = coordinates(&basis, p)?;
    let (rem, _) = Hermite::new(&rows, basis.len())?.reduce(&coords);
    Ok(GradedIntPoly::from_terms(basis.into_iter().zip(rem)))
}

/// `p_1 = psi_H(sum beta^2) - sum gamma^2 - sum delta^2`, reduced in the
/// degree-four part of the cohomology ring. The circle contributes no roots
/// and `Sp(1) x Sp(1)` contributes `2 y1, 2 y2`.
pub fn pontryagin_p1(space: Space) -> Result<GradedIntPoly> {
    let beta = sum_of_squares(&sp_positive_roots(&XS));
    let delta = sum_of_squares(&sp_positive_roots(&[Var::Y1])) + sum_of_squares(&sp_positive_roots(&[Var::Y2]));
    let raw = &space.h_map().apply(&beta)? - &delta;
    canonical_form(&presentation(space), &raw)
}

/// `H^4(space; Z_modulus) / <p_1>`, computed in the two-generator
/// presentation.
pub fn p1_quotient(space: Space, modulus: i128) -> Result<AbelianGroup> {
    let pres = reduced_presentation(space);
    let (basis, mut rows) = degree_part(&pres, 4)?;
    rows.push(coordinates(&basis, &pontryagin_p1(space)?)?);
    quotient_group(&AbelianPresentation { rank: basis.len(), relations: rows, modulus: Some(modulus) })
}

/// `phi(u) = u`, `phi(y1^2) = u^2 - y1^2` on `Z[y1^2, u]`.
pub fn phi(p: &GradedIntPoly) -> Result<GradedIntPoly> {
    p.substitute_square(Var::Y1, &(&sq(Var::U) - &sq(Var::Y1)))
}

/// Outcome of checking that `phi` induces `Z[y1^2,u]/I_2 ~ Z[y1^2,u]/J_2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RingIsomorphismCheck {
    /// `phi(phi(y1^2)) = y1^2` (and `phi(u) = u` by construction).
    pub involution: bool,
    pub phi_i2_generator: GradedIntPoly,
    pub phi_j2_generator: GradedIntPoly,
    pub phi_phi_y1_squared: GradedIntPoly,
    pub i2_into_j2: bool,
    pub j2_into_i2: bool,
    pub holds: bool,
}

pub fn check_ring_isomorphism() -> RingIsomorphismCheck {
    let i2 = reduced_presentation(Space::R2).relations;
    let j2 = reduced_presentation(Space::Q2).relations;
    let image = |gens: &[GradedIntPoly]| -> Vec<GradedIntPoly> {
        gens.iter().map(|g| phi(g).expect("generators lie in Z[y1^2, u]")).collect()
    };
    let phi_i2 = image(&i2);
    let phi_j2 = image(&j2);
    let y1sq = sq(Var::Y1);
    let twice = phi(&phi(&y1sq).expect("even")).expect("even");
    let involution = twice == y1sq;
    let i2_into_j2 = ideal_contains_all(&j2, &phi_i2, MEMBERSHIP_DEGREE);
    let j2_into_i2 = ideal_contains_all(&i2, &phi_j2, MEMBERSHIP_DEGREE);
    RingIsomorphismCheck {
        involution,
        phi_i2_generator: phi_i2[0].clone(),
        phi_j2_generator: phi_j2[0].clone(),
        phi_phi_y1_squared: twice,
        i2_into_j2,
        j2_into_i2,
        holds: involution && i2_into_j2 && j2_into_i2,
    }
}

/// Computed quotient next to the published one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuotientReport {
    pub computed: AbelianGroup,
    pub published: AbelianGroup,
    pub agrees_with_published: bool,
}

impl QuotientReport {
    pub fn new(space: Space, modulus: i128) -> Result<Self> {
        let computed = p1_quotient(space, modulus)?;
        let published = space.published_quotient();
        Ok(Self { agrees_with_published: computed == published, computed, published })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TopologyReport {
    pub sigma_check: SigmaCheck,
    pub prop54: RingIsomorphismCheck,
    pub p1_q2: GradedIntPoly,
    pub p1_r2: GradedIntPoly,
    pub quotient_q2: QuotientReport,
    pub quotient_r2: QuotientReport,
}

impl TopologyReport {
    /// Whether every exact identity holds. Quotient agreement is reported
    /// but not required.
    pub fn exact_checks_pass(&self) -> bool {
        self.sigma_check.holds
            && self.prop54.holds
            && self.p1_q2 == GradedIntPoly::term(4, &[(Var::U, 2)])
            && self.p1_r2 == GradedIntPoly::term(12, &[(Var::U, 2)])
    }
}

pub fn topology_report() -> Result<TopologyReport> {
    Ok(TopologyReport {
        sigma_check: sigma_check(),
        prop54: check_ring_isomorphism(),
        p1_q2: pontryagin_p1(Space::Q2)?,
        p1_r2: pontryagin_p1(Space::R2)?,
        quotient_q2: QuotientReport::new(Space::Q2, 24)?,
        quotient_r2: QuotientReport::new(Space::R2, 24)?,
    })
}
