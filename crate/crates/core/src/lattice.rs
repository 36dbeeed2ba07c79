//! Integer row reduction: Hermite normal form with a transform, and Smith
//! normal form for finitely generated abelian groups.

use serde::Serialize;

use crate::error::{Error, Result};

fn sub_scaled(dst: &mut [i128], src: &[i128], q: i128) {
    if q == 0 {
        return;
    }
    for (d, s) in dst.iter_mut().zip(src) {
        *d = s.checked_mul(q).and_then(|t| d.checked_sub(t)).expect("integer overflow in row reduction");
    }
}

/// Row-style Hermite normal form of an integer matrix.
///
/// `rows` are the non-zero rows of `H = T A`; pivots are positive, entries
/// above a pivot lie in `[0, pivot)`. `transform` holds the matching rows of
/// the unimodular `T`, so each row of `H` is an explicit combination of the
/// input rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Hermite {
    pub rows: Vec<Vec<i128>>,
    pub transform: Vec<Vec<i128>>,
    pub pivots: Vec<usize>,
    pub ncols: usize,
}

impl Hermite {
    pub fn new(matrix: &[Vec<i128>], ncols: usize) -> Result<Self> {
        if let Some(bad) = matrix.iter().find(|r| r.len() != ncols) {
            return Err(Error::DimensionMismatch { left: ncols, right: bad.len() });
        }
        let m = matrix.len();
        let mut a: Vec<Vec<i128>> = matrix.to_vec();
        let mut t: Vec<Vec<i128>> = (0..m).map(|i| (0..m).map(|j| i128::from(i == j)).collect()).collect();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..ncols {
            if rank == m {
                break;
            }
            loop {
                let best = (rank..m).filter(|&i| a[i][col] != 0).min_by_key(|&i| a[i][col].unsigned_abs());
                let Some(p) = best else { break };
                a.swap(rank, p);
                t.swap(rank, p);
                let mut done = true;
                for i in rank + 1..m {
                    let q = a[i][col] / a[rank][col];
                    let (pr, pt) = (a[rank].clone(), t[rank].clone());
                    sub_scaled(&mut a[i], &pr, q);
                    sub_scaled(&mut t[i], &pt, q);
                    done &= a[i][col] == 0;
                }
                if done {
                    break;
                }
            }
            if a[rank][col] == 0 {
                continue;
            }
            if a[rank][col] < 0 {
                a[rank].iter_mut().for_each(|x| *x = -*x);
                t[rank].iter_mut().for_each(|x| *x = -*x);
            }
            let (pr, pt) = (a[rank].clone(), t[rank].clone());
            for i in 0..rank {
                let q = a[i][col].div_euclid(pr[col]);
                sub_scaled(&mut a[i], &pr, q);
                sub_scaled(&mut t[i], &pt, q);
            }
            pivots.push(col);
            rank += 1;
        }
        a.truncate(rank);
        t.truncate(rank);
        Ok(Self { rows: a, transform: t, pivots, ncols })
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Canonical representative of `v` modulo the row lattice, together with
    /// coefficients `c` (over the input rows) such that `v = rem + c A`.
    pub fn reduce(&self, v: &[i128]) -> (Vec<i128>, Vec<i128>) {
        assert_eq!(v.len(), self.ncols, "vector length");
        let mut rem = v.to_vec();
        let m = self.transform.first().map_or(0, Vec::len);
        let mut coeffs = vec![0i128; m];
        for (k, &col) in self.pivots.iter().enumerate() {
            let q = rem[col].div_euclid(self.rows[k][col]);
            sub_scaled(&mut rem, &self.rows[k], q);
            sub_scaled(&mut coeffs, &self.transform[k], -q);
        }
        (rem, coeffs)
    }

    /// Coefficients `c` with `v = c A`, if `v` is in the row lattice.
    pub fn solve(&self, v: &[i128]) -> Option<Vec<i128>> {
        let (rem, coeffs) = self.reduce(v);
        rem.iter().all(|&x| x == 0).then_some(coeffs)
    }
}

/// Non-zero diagonal of the Smith normal form: positive, each entry divides
/// the next.
pub fn smith_diagonal(matrix: &[Vec<i128>], ncols: usize) -> Result<Vec<i128>> {
    if let Some(bad) = matrix.iter().find(|r| r.len() != ncols) {
        return Err(Error::DimensionMismatch { left: ncols, right: bad.len() });
    }
    let mut a: Vec<Vec<i128>> = matrix.to_vec();
    let m = a.len();
    let mut diag = Vec::new();
    for t in 0..m.min(ncols) {
        // Smallest non-zero entry of the trailing block as pivot.
        let pick = |a: &Vec<Vec<i128>>| {
            (t..m)
                .flat_map(|i| (t..ncols).map(move |j| (i, j)))
                .filter(|&(i, j)| a[i][j] != 0)
                .min_by_key(|&(i, j)| a[i][j].unsigned_abs())
        };
        let Some((pi, pj)) = pick(&a) else { break };
        a.swap(t, pi);
        a.iter_mut().for_each(|r| r.swap(t, pj));
        loop {
            let mut clean = true;
            for i in t + 1..m {
                let q = a[i][t] / a[t][t];
                let pr = a[t].clone();
                sub_scaled(&mut a[i], &pr, q);
                clean &= a[i][t] == 0;
            }
            for j in t + 1..ncols {
                let q = a[t][j] / a[t][t];
                for row in a.iter_mut() {
                    row[j] = row[t]
                        .checked_mul(q)
                        .and_then(|x| row[j].checked_sub(x))
                        .expect("integer overflow in Smith form");
                }
                clean &= a[t][j] == 0;
            }
            if clean {
                // Divisibility: fold an offending row into the pivot row.
                let p = a[t][t];
                let bad = (t + 1..m).find(|&i| (t + 1..ncols).any(|j| a[i][j] % p != 0));
                match bad {
                    Some(i) => {
                        let r = a[i].clone();
                        a[t].iter_mut().zip(&r).for_each(|(x, y)| *x += y);
                    }
                    None => break,
                }
            } else {
                let (pi, pj) = pick(&a).expect("non-zero pivot");
                a.swap(t, pi);
                a.iter_mut().for_each(|r| r.swap(t, pj));
            }
        }
        diag.push(a[t][t].abs());
    }
    Ok(diag)
}

/// `Z^rank / <relations>`, optionally with `Z_modulus` coefficients.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AbelianPresentation {
    pub rank: usize,
    pub relations: Vec<Vec<i128>>,
    pub modulus: Option<i128>,
}

/// Invariant factors (each dividing the next, all `> 1`) and free rank.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbelianGroup {
    pub invariant_factors: Vec<i128>,
    pub free_rank: usize,
}

impl AbelianGroup {
    /// Order of the group, `None` when infinite.
    pub fn order(&self) -> Option<i128> {
        (self.free_rank == 0).then(|| self.invariant_factors.iter().product())
    }
}

impl std::fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = self.invariant_factors.iter().map(|d| format!("Z{d}")).collect();
        parts.extend(std::iter::repeat_n("Z".to_string(), self.free_rank));
        if parts.is_empty() {
            return write!(f, "0");
        }
        write!(f, "{}", parts.join(" + "))
    }
}

pub fn quotient_group(pres: &AbelianPresentation) -> Result<AbelianGroup> {
    let mut rows = pres.relations.clone();
    if let Some(n) = pres.modulus {
        if n <= 0 {
            return Err(Error::InvalidParameter(format!("modulus must be positive, got {n}")));
        }
        for i in 0..pres.rank {
            let mut r = vec![0; pres.rank];
            r[i] = n;
            rows.push(r);
        }
    }
    let diag = smith_diagonal(&rows, pres.rank)?;
    Ok(AbelianGroup {
        free_rank: pres.rank - diag.len(),
        invariant_factors: diag.into_iter().filter(|&d| d != 1).collect(),
    })
}
