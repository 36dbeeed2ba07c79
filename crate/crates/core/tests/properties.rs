use std::f64::consts::FRAC_PI_2;

use biquotient_flats::lattice::{quotient_group, smith_diagonal, AbelianPresentation, Hermite};
use biquotient_flats::lie::{adjoint_action, SpaceConfig, Subspace};
use biquotient_flats::metric::{plane_curvature, MetricOperator};
use biquotient_flats::orbit::{
    f_matrix, random_algvec, random_group_element_from, random_subgroup_element, reduce_to_f, seeded_rng,
    FundamentalPoint,
};
use biquotient_flats::poly::{Exponents, GradedIntPoly, RingMap, Var, NVARS};
use biquotient_flats::quat::{qmul, Quaternion};
use proptest::prelude::*;

fn poly() -> impl Strategy<Value = GradedIntPoly> {
    prop::collection::vec((prop::array::uniform6(0u32..3), -5i128..=5), 0..5)
        .prop_map(|terms| GradedIntPoly::from_terms(terms.into_iter().map(|(e, c)| (e as Exponents, c))))
}

fn ring_map() -> impl Strategy<Value = RingMap> {
    prop::array::uniform6(prop::array::uniform6(-3i128..=3)).prop_map(|rows| {
        let mut f = RingMap::new();
        for (v, row) in Var::ALL.iter().zip(rows) {
            let image = Var::ALL
                .iter()
                .zip(row)
                .fold(GradedIntPoly::zero(), |acc, (&w, c)| acc + GradedIntPoly::var(w).scale(c));
            f = f.assign(*v, image).expect("degree-2 image");
        }
        f
    })
}

fn quaternion() -> impl Strategy<Value = Quaternion> {
    prop::array::uniform4(-10.0f64..10.0).prop_map(Quaternion::from_array)
}

/// Order of the subgroup of `Z_n^r` generated by `rows`, with membership
/// flags, by breadth-first closure.
fn subgroup(rows: &[Vec<i128>], r: usize, n: i128) -> Vec<bool> {
    let size = (n as usize).pow(r as u32);
    let index = |v: &[i128]| v.iter().fold(0usize, |acc, &x| acc * n as usize + x.rem_euclid(n) as usize);
    let decode = |mut k: usize| {
        let mut v = vec![0i128; r];
        for x in v.iter_mut().rev() {
            *x = (k % n as usize) as i128;
            k /= n as usize;
        }
        v
    };
    let mut seen = vec![false; size];
    seen[0] = true;
    let mut queue = vec![0usize];
    while let Some(k) = queue.pop() {
        let v = decode(k);
        for row in rows {
            let w: Vec<i128> = v.iter().zip(row).map(|(a, b)| a + b).collect();
            let j = index(&w);
            if !seen[j] {
                seen[j] = true;
                queue.push(j);
            }
        }
    }
    seen
}

proptest! {
    #[test]
    fn ring_map_is_a_homomorphism(f in ring_map(), p in poly(), q in poly()) {
        prop_assert_eq!(f.apply(&(&p + &q)).unwrap(), f.apply(&p).unwrap() + f.apply(&q).unwrap());
        prop_assert_eq!(f.apply(&(&p * &q)).unwrap(), f.apply(&p).unwrap() * f.apply(&q).unwrap());
        prop_assert_eq!(f.apply(&GradedIntPoly::constant(3)).unwrap(), GradedIntPoly::constant(3));
    }

    #[test]
    fn ring_map_preserves_degree(f in ring_map(), e in prop::array::uniform6(0u32..3)) {
        let image = f.apply(&GradedIntPoly::monomial(1, e)).unwrap();
        let deg: u32 = e.iter().sum::<u32>() * 2;
        prop_assert!(image.is_zero() || image.degree() == Some(deg));
    }

    #[test]
    fn polynomial_ring_axioms(p in poly(), q in poly(), r in poly()) {
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert!((&p - &p).is_zero());
    }

    #[test]
    fn hermite_reduction_is_exact(
        rows in prop::collection::vec(prop::collection::vec(-9i128..=9, 3), 1..5),
        v in prop::collection::vec(-30i128..=30, 3),
    ) {
        let h = Hermite::new(&rows, 3).unwrap();
        let (rem, c) = h.reduce(&v);
        for j in 0..3 {
            let comb: i128 = c.iter().zip(&rows).map(|(ci, r)| ci * r[j]).sum();
            prop_assert_eq!(rem[j] + comb, v[j]);
        }
        for row in &rows {
            prop_assert!(h.solve(row).is_some());
        }
    }

    #[test]
    fn smith_form_matches_brute_force(
        r in 1usize..=3,
        n in prop::sample::select(vec![2i128, 4, 6, 8, 12]),
        raw in prop::collection::vec(prop::collection::vec(-8i128..=8, 3), 0..4),
    ) {
        let rows: Vec<Vec<i128>> = raw.into_iter().map(|mut v| { v.truncate(r); v }).collect();
        let g = quotient_group(&AbelianPresentation { rank: r, relations: rows.clone(), modulus: Some(n) }).unwrap();
        prop_assert_eq!(g.free_rank, 0);
        prop_assert!(g.invariant_factors.windows(2).all(|w| w[1] % w[0] == 0));
        let h = subgroup(&rows, r, n);
        let h_order = h.iter().filter(|&&b| b).count() as i128;
        let total = n.pow(r as u32);
        prop_assert_eq!(g.order().unwrap(), total / h_order);
        // #{x : d x = 0} in the quotient equals prod gcd(d, f_i).
        for d in 1..=n {
            let killed = (0..total as usize)
                .filter(|&k| {
                    let mut x = k;
                    let mut v = vec![0i128; r];
                    for c in v.iter_mut().rev() {
                        *c = (x % n as usize) as i128;
                        x /= n as usize;
                    }
                    let j = v.iter().fold(0usize, |acc, &c| acc * n as usize + (c * d).rem_euclid(n) as usize);
                    h[j]
                })
                .count() as i128
                / h_order;
            let gcd = |mut a: i128, mut b: i128| { while b != 0 { (a, b) = (b, a % b); } a };
            let expected: i128 = g.invariant_factors.iter().map(|&f| gcd(d, f)).product();
            prop_assert_eq!(killed, expected);
        }
    }

    #[test]
    fn smith_diagonal_preserves_determinant(a in prop::array::uniform3(prop::array::uniform3(-6i128..=6))) {
        let rows: Vec<Vec<i128>> = a.iter().map(|r| r.to_vec()).collect();
        let det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
        let d = smith_diagonal(&rows, 3).unwrap();
        if det == 0 {
            prop_assert!(d.len() < 3);
        } else {
            prop_assert_eq!(d.iter().product::<i128>(), det.abs());
        }
    }

    #[test]
    fn quaternion_norm_is_multiplicative(p in quaternion(), q in quaternion()) {
        let pq = qmul(p, q);
        prop_assert!((pq.norm() - p.norm() * q.norm()).abs() <= 1e-12 * (1.0 + p.norm() * q.norm()));
        let c = qmul(p, q).conj();
        let d = qmul(q.conj(), p.conj());
        prop_assert!((c.w - d.w).abs() + (c.x - d.x).abs() + (c.y - d.y).abs() + (c.z - d.z).abs() < 1e-10);
    }

    #[test]
    fn quaternion_literal_round_trip(q in quaternion()) {
        prop_assert_eq!(q.to_string().parse::<Quaternion>().unwrap(), q);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn jacobi_and_ad_invariance(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = seeded_rng(seed);
        let m = n + 1;
        let (x, y, z) = (random_algvec(&mut rng, m, 1.0), random_algvec(&mut rng, m, 1.0), random_algvec(&mut rng, m, 1.0));
        let j = x.lie(&y.lie(&z)).plus(&y.lie(&z.lie(&x))).plus(&z.lie(&x.lie(&y)));
        prop_assert!(j.norm0() <= 1e-11);
        let g = random_group_element_from(&mut rng, m);
        let (gx, gy) = (adjoint_action(&g, &x).unwrap(), adjoint_action(&g, &y).unwrap());
        prop_assert!((gx.dot0(&gy) - x.dot0(&y)).abs() <= 1e-11);
        // <[X,Y],Z> = <X,[Y,Z]>
        prop_assert!((x.lie(&y).dot0(&z) - x.dot0(&y.lie(&z))).abs() <= 1e-11);
    }

    #[test]
    fn projections_split_orthogonally(seed in any::<u64>(), n in 2usize..=4) {
        let cfg = SpaceConfig::new(n).unwrap();
        let mut rng = seeded_rng(seed);
        let x = random_algvec(&mut rng, cfg.m(), 1.0);
        let (k, p) = (cfg.project(&x, Subspace::K), cfg.project(&x, Subspace::P));
        prop_assert!(k.plus(&p).minus(&x).norm0() <= 1e-14);
        prop_assert!(k.dot0(&p).abs() <= 1e-14);
        let u = cfg.project(&x, Subspace::U);
        let w = cfg.project(&x, Subspace::UPerpInK);
        prop_assert!(u.plus(&w).minus(&k).norm0() <= 1e-14);
        prop_assert!(cfg.residual_outside(&k.lie(&p), Subspace::P) <= 1e-12);
    }

    #[test]
    fn cheeger_curvature_is_nonnegative(seed in any::<u64>(), t in 0.05f64..20.0) {
        let cfg = SpaceConfig::new(2).unwrap();
        let op = MetricOperator::cheeger(cfg.clone(), t).unwrap();
        let mut rng = seeded_rng(seed);
        let x = random_algvec(&mut rng, cfg.m(), 1.0);
        let y = random_algvec(&mut rng, cfg.m(), 1.0);
        let pc = plane_curvature(&x, &y, &op);
        prop_assert!(pc.numerator >= -1e-10 * (1.0 + pc.gram));
    }

    #[test]
    fn reduction_inverts_f_matrix(
        theta in 1e-3f64..FRAC_PI_2 - 1e-3,
        alpha in 1e-3f64..FRAC_PI_2 - 1e-3,
        seed in any::<u64>(),
    ) {
        let cfg = SpaceConfig::new(3).unwrap();
        let pt = FundamentalPoint::new(theta, alpha).unwrap();
        let mut rng = seeded_rng(seed);
        let g = random_group_element_from(&mut rng, cfg.m());
        let k = random_subgroup_element(&mut rng, &cfg, Subspace::K);
        let nn = random_subgroup_element(&mut rng, &cfg, Subspace::N);
        let g1 = g.mul(&f_matrix(&pt, 3).unwrap()).unwrap().mul(&k.inverse()).unwrap();
        let g2 = g.mul(&nn.inverse()).unwrap();
        let r = reduce_to_f(&g1, &g2).unwrap();
        prop_assert!((r.point.theta - theta).abs() <= 1e-10);
        prop_assert!((r.point.alpha - alpha).abs() <= 1e-10);
    }
}

#[test]
fn fundamental_point_rejects_outside_domain() {
    assert!(FundamentalPoint::new(-0.1, 0.2).is_err());
    assert!(FundamentalPoint::new(0.2, FRAC_PI_2 + 0.1).is_err());
    assert!(FundamentalPoint::new(f64::NAN, 0.2).is_err());
    assert_eq!(NVARS, Var::ALL.len());
}
