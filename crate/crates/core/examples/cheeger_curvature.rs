//! Sectional curvature of the Cheeger-deformed metric on Sp(n+1) for a few
//! values of t, compared against the bi-invariant value.

use biquotient_flats::lie::SpaceConfig;
use biquotient_flats::metric::{phi_inv, plane_curvature, MetricOperator};
use biquotient_flats::orbit::{random_algvec, seeded_rng};

fn main() -> biquotient_flats::error::Result<()> {
    let cfg = SpaceConfig::new(2)?;
    let mut rng = seeded_rng(7);
    let x = random_algvec(&mut rng, cfg.m(), 1.0);
    let y = random_algvec(&mut rng, cfg.m(), 1.0);

    let bi = MetricOperator::bi_invariant(cfg.clone());
    let pc = plane_curvature(&x, &y, &bi);
    println!("bi-invariant numerator {:.6}  (1/4)|[X,Y]|^2 = {:.6}", pc.numerator, 0.25 * x.lie(&y).norm0().powi(2));

    for t in [0.1, 1.0, 10.0] {
        let op = MetricOperator::cheeger(cfg.clone(), t)?;
        let pc = plane_curvature(&phi_inv(&x, &op), &phi_inv(&y, &op), &op);
        println!("t = {t:>4}: sec(phi^-1 X, phi^-1 Y) = {:.6}", pc.sec.unwrap_or(f64::NAN));
    }
    Ok(())
}
