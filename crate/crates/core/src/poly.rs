//! Exact graded polynomials over the integers.
//!
//! All variables have cohomological degree 2. Coefficients are `i128` with
//! checked arithmetic; an overflow panics instead of wrapping.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Number of variables known to [`GradedIntPoly`].
pub const NVARS: usize = 6;

/// Generators of the torus cohomology rings: `x_i` for `Sp(3)`, `y_i` for
/// `Sp(1) x Sp(1)`, `u` for the circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X1,
    X2,
    X3,
    Y1,
    Y2,
    U,
}

impl Var {
    pub const ALL: [Var; NVARS] = [Var::X1, Var::X2, Var::X3, Var::Y1, Var::Y2, Var::U];

    pub fn name(self) -> &'static str {
        match self {
            Var::X1 => "x1",
            Var::X2 => "x2",
            Var::X3 => "x3",
            Var::Y1 => "y1",
            Var::Y2 => "y2",
            Var::U => "u",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Cohomological degree.
    pub fn degree(self) -> u32 {
        2
    }
}

/// Exponent vector indexed by [`Var::index`].
pub type Exponents = [u32; NVARS];

fn monomial_degree(e: &Exponents) -> u32 {
    Var::ALL.iter().map(|v| v.degree() * e[v.index()]).sum()
}

fn checked_add(a: i128, b: i128) -> i128 {
    a.checked_add(b).expect("polynomial coefficient overflow")
}

fn checked_mul(a: i128, b: i128) -> i128 {
    a.checked_mul(b).expect("polynomial coefficient overflow")
}

/// Integer polynomial in the variables of [`Var`]; zero coefficients are
/// never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GradedIntPoly {
    terms: BTreeMap<Exponents, i128>,
}

impl GradedIntPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: i128) -> Self {
        Self::monomial(c, [0; NVARS])
    }

    pub fn var(v: Var) -> Self {
        let mut e = [0; NVARS];
        e[v.index()] = 1;
        Self::monomial(1, e)
    }

    pub fn monomial(c: i128, e: Exponents) -> Self {
        let mut p = Self::zero();
        p.add_term(e, c);
        p
    }

    /// `c * prod v^k`.
    pub fn term(c: i128, powers: &[(Var, u32)]) -> Self {
        let mut e = [0; NVARS];
        for &(v, k) in powers {
            e[v.index()] += k;
        }
        Self::monomial(c, e)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Exponents, i128)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Exponents, c: i128) {
        if c == 0 {
            return;
        }
        let slot = self.terms.entry(e).or_insert(0);
        *slot = checked_add(*slot, c);
        if *slot == 0 {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &i128)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &Exponents) -> i128 {
        self.terms.get(e).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Cohomological degree when the polynomial is homogeneous and non-zero.
    pub fn degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(monomial_degree);
        let d = degs.next()?;
        degs.all(|x| x == d).then_some(d)
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(monomial_degree).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.degree().is_some()
    }

    pub fn homogeneous_part(&self, degree: u32) -> Self {
        Self::from_terms(self.terms.iter().filter(|(e, _)| monomial_degree(e) == degree).map(|(e, c)| (*e, *c)))
    }

    /// Variables with a non-zero exponent somewhere in the polynomial.
    pub fn variables(&self) -> Vec<Var> {
        Var::ALL.into_iter().filter(|v| self.terms.keys().any(|e| e[v.index()] > 0)).collect()
    }

    pub fn scale(&self, c: i128) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, &k)| (*e, checked_mul(k, c))))
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(1), |acc, _| &acc * self)
    }

    /// Replaces every `v^(2k)` by `image^k`. Fails when `v` occurs to an odd
    /// power, i.e. when the polynomial is not in `Z[v^2, ...]`.
    pub fn substitute_square(&self, v: Var, image: &GradedIntPoly) -> Result<Self> {
        let mut out = Self::zero();
        for (e, &c) in &self.terms {
            let k = e[v.index()];
            if k % 2 != 0 {
                return Err(Error::NotInRing(format!("{} has odd exponent {k} in `{self}`", v.name())));
            }
            let mut rest = *e;
            rest[v.index()] = 0;
            out = &out + &(&Self::monomial(c, rest) * &image.pow(k / 2));
        }
        Ok(out)
    }
}

impl Add for &GradedIntPoly {
    type Output = GradedIntPoly;
    fn add(self, rhs: &GradedIntPoly) -> GradedIntPoly {
        let mut out = self.clone();
        for (e, &c) in &rhs.terms {
            out.add_term(*e, c);
        }
        out
    }
}

impl Sub for &GradedIntPoly {
    type Output = GradedIntPoly;
    fn sub(self, rhs: &GradedIntPoly) -> GradedIntPoly {
        self + &(-rhs)
    }
}

impl Neg for &GradedIntPoly {
    type Output = GradedIntPoly;
    fn neg(self) -> GradedIntPoly {
        self.scale(-1)
    }
}

impl Mul for &GradedIntPoly {
    type Output = GradedIntPoly;
    fn mul(self, rhs: &GradedIntPoly) -> GradedIntPoly {
        let mut out = GradedIntPoly::zero();
        for (a, &ca) in &self.terms {
            for (b, &cb) in &rhs.terms {
                let mut e = *a;
                for i in 0..NVARS {
                    e[i] = e[i].checked_add(b[i]).expect("exponent overflow");
                }
                out.add_term(e, checked_mul(ca, cb));
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for GradedIntPoly {
            type Output = GradedIntPoly;
            fn $f(self, rhs: GradedIntPoly) -> GradedIntPoly {
                (&self).$f(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

fn render_monomial(e: &Exponents) -> String {
    Var::ALL
        .iter()
        .filter(|v| e[v.index()] > 0)
        .map(|v| match e[v.index()] {
            1 => v.name().to_string(),
            k => format!("{}^{k}", v.name()),
        })
        .collect::<Vec<_>>()
        .join("*")
}

/// Terms in decreasing lexicographic order of exponents (`x1 > ... > u`),
/// e.g. `y1^4 - 3*y1^2*u^2 + 3*u^4`.
impl fmt::Display for GradedIntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, &c)) in self.terms.iter().rev().enumerate() {
            let mono = render_monomial(e);
            let body = match (c.unsigned_abs(), mono.is_empty()) {
                (k, true) => k.to_string(),
                (1, false) => mono,
                (k, false) => format!("{k}*{mono}"),
            };
            match (i, c < 0) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for GradedIntPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Substitution homomorphism given by the images of variables.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RingMap {
    images: BTreeMap<Var, GradedIntPoly>,
}

impl RingMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Assigns `v -> image`. The image must be zero or homogeneous of the
    /// degree of `v`.
    pub fn assign(mut self, v: Var, image: GradedIntPoly) -> Result<Self> {
        if !image.is_zero() && image.degree() != Some(v.degree()) {
            return Err(Error::InvalidParameter(format!(
                "image `{image}` of {} does not have degree {}",
                v.name(),
                v.degree()
            )));
        }
        self.images.insert(v, image);
        Ok(self)
    }

    /// Map sending each of `vars` to the same image.
    pub fn constant_on(vars: &[Var], image: &GradedIntPoly) -> Result<Self> {
        vars.iter().try_fold(Self::new(), |m, &v| m.assign(v, image.clone()))
    }

    pub fn image(&self, v: Var) -> Option<&GradedIntPoly> {
        self.images.get(&v)
    }

    pub fn apply(&self, p: &GradedIntPoly) -> Result<GradedIntPoly> {
        apply_ring_map(self, p)
    }
}

pub fn apply_ring_map(f: &RingMap, p: &GradedIntPoly) -> Result<GradedIntPoly> {
    let mut out = GradedIntPoly::zero();
    for (e, &c) in p.terms() {
        let mut term = GradedIntPoly::constant(c);
        for v in Var::ALL {
            let k = e[v.index()];
            if k == 0 {
                continue;
            }
            let img = f.image(v).ok_or_else(|| Error::UnassignedVariable(v.name().to_string()))?;
            term = &term * &img.pow(k);
        }
        out = &out + &term;
    }
    Ok(out)
}

/// `sigma_k(v_1^2, ..., v_m^2)`.
pub fn elementary_symmetric_squares(k: usize, vars: &[Var]) -> Result<GradedIntPoly> {
    if k == 0 || k > vars.len() {
        return Err(Error::InvalidParameter(format!("sigma_{k} needs 1 <= k <= {}", vars.len())));
    }
    let squares: Vec<GradedIntPoly> = vars.iter().map(|&v| GradedIntPoly::var(v).pow(2)).collect();
    // e_j of the prefix, built one variable at a time.
    let mut e = vec![GradedIntPoly::constant(1)];
    e.resize(k + 1, GradedIntPoly::zero());
    for s in &squares {
        for j in (1..=k).rev() {
            e[j] = &e[j] + &(&e[j - 1] * s);
        }
    }
    Ok(e.swap_remove(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use Var::*;

    fn v(x: Var) -> GradedIntPoly {
        GradedIntPoly::var(x)
    }

    #[test]
    fn display_is_sorted_and_signed() {
        let p = GradedIntPoly::term(3, &[(U, 4)]) - GradedIntPoly::term(3, &[(Y1, 2), (U, 2)])
            + GradedIntPoly::term(1, &[(Y1, 4)]);
        assert_eq!(p.to_string(), "y1^4 - 3*y1^2*u^2 + 3*u^4");
        assert_eq!(GradedIntPoly::term(4, &[(U, 2)]).to_string(), "4*u^2");
        assert_eq!(GradedIntPoly::term(-1, &[(X2, 1)]).to_string(), "-x2");
        assert_eq!(GradedIntPoly::constant(-7).to_string(), "-7");
        assert_eq!(GradedIntPoly::zero().to_string(), "0");
    }

    #[test]
    fn degrees() {
        let p = &v(X1).pow(2) * &v(U);
        assert_eq!(p.degree(), Some(6));
        let q = &p + &v(Y2);
        assert_eq!(q.degree(), None);
        assert_eq!(q.max_degree(), Some(6));
        assert_eq!(q.homogeneous_part(2), v(Y2));
        assert_eq!(GradedIntPoly::zero().degree(), None);
    }

    #[test]
    fn cancellation_removes_terms() {
        let p = &v(X1) - &v(X1);
        assert!(p.is_zero());
        assert_eq!(p.len(), 0);
    }

    #[test]
    fn sigma_examples() {
        let xs = [X1, X2, X3];
        let s1 = elementary_symmetric_squares(1, &xs).unwrap();
        assert_eq!(s1.to_string(), "x1^2 + x2^2 + x3^2");
        let s2 = elementary_symmetric_squares(2, &xs).unwrap();
        assert_eq!(s2.to_string(), "x1^2*x2^2 + x1^2*x3^2 + x2^2*x3^2");
        let s3 = elementary_symmetric_squares(3, &xs).unwrap();
        assert_eq!(s3.to_string(), "x1^2*x2^2*x3^2");
        assert!(elementary_symmetric_squares(3, &[X1]).is_err());
        assert!(elementary_symmetric_squares(0, &xs).is_err());
    }

    #[test]
    fn ring_map_images() {
        let xs = [X1, X2, X3];
        let k_map = RingMap::new()
            .assign(X1, v(Y1))
            .unwrap()
            .assign(X2, GradedIntPoly::zero())
            .unwrap()
            .assign(X3, v(Y2))
            .unwrap();
        let s1 = elementary_symmetric_squares(1, &xs).unwrap();
        assert_eq!(k_map.apply(&s1).unwrap().to_string(), "y1^2 + y2^2");
        let s3 = elementary_symmetric_squares(3, &xs).unwrap();
        assert!(k_map.apply(&s3).unwrap().is_zero());
        let h_map = RingMap::constant_on(&xs, &v(U)).unwrap();
        assert_eq!(h_map.apply(&s1).unwrap().to_string(), "3*u^2");
    }

    #[test]
    fn ring_map_errors() {
        let f = RingMap::new().assign(X1, v(Y1)).unwrap();
        assert_eq!(f.apply(&v(X2)), Err(Error::UnassignedVariable("x2".into())));
        assert!(RingMap::new().assign(X1, v(Y1).pow(2)).is_err());
    }

    #[test]
    fn square_substitution() {
        let phi = &v(U).pow(2) - &v(Y1).pow(2);
        let p = &v(Y1).pow(2) * &v(U);
        assert_eq!(p.substitute_square(Y1, &phi).unwrap(), &phi * &v(U));
        assert!(v(Y1).substitute_square(Y1, &phi).is_err());
    }

    #[test]
    #[should_panic(expected = "overflow")]
    fn overflow_panics() {
        let big = GradedIntPoly::constant(i128::MAX);
        let _ = &big + &GradedIntPoly::constant(1);
    }
}
