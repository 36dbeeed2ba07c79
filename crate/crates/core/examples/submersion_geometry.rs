//! Vertical and horizontal spaces of the submersion onto M_n at a random
//! point, and O'Neill's bound for a horizontal plane.

use biquotient_flats::lie::{horizontal_basis, horizontal_lift, rho_min_singular_value, vertical_basis, SpaceConfig};
use biquotient_flats::metric::{lift_plane_curvature, pair_inner1, MetricOperator};
use biquotient_flats::orbit::{random_algvec, random_group_element};

fn main() -> biquotient_flats::error::Result<()> {
    for n in [2, 3] {
        let cfg = SpaceConfig::new(n)?;
        let op = MetricOperator::cheeger(cfg.clone(), 1.0)?;
        let g1 = random_group_element(n as u64, cfg.m());
        let v = vertical_basis(&cfg, &g1)?;
        let h = horizontal_basis(&cfg, &g1, &op)?;
        let worst = h
            .iter()
            .flat_map(|a| v.iter().map(move |b| (a, b)))
            .map(|(a, b)| pair_inner1(a, b, &op).abs())
            .fold(0.0, f64::max);
        println!(
            "n = {n}: vertical {} horizontal {} max |<H,V>| = {worst:.1e} min sv(rho) = {:.3}",
            v.len(),
            h.len(),
            rho_min_singular_value(&cfg, &g1)?
        );

        let mut rng = biquotient_flats::orbit::seeded_rng(3);
        let a = horizontal_lift(&g1, &random_algvec(&mut rng, cfg.m(), 1.0), &op)?;
        let b = horizontal_lift(&g1, &random_algvec(&mut rng, cfg.m(), 1.0), &op)?;
        println!("       lifted plane curvature numerator {:.6}", lift_plane_curvature(&a, &b, &op).numerator);
    }
    Ok(())
}
