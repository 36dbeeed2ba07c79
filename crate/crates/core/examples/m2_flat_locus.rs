//! Closed-form flat planes of M_2 along the curve and the boundary lines.

use std::f64::consts::FRAC_PI_2;

use biquotient_flats::flat::{m2_curve_theta, m2_flat_locus, m2_witness};
use biquotient_flats::lie::SpaceConfig;
use biquotient_flats::metric::MetricOperator;
use biquotient_flats::orbit::FundamentalPoint;

fn main() -> biquotient_flats::error::Result<()> {
    let op = MetricOperator::cheeger(SpaceConfig::new(2)?, 1.0)?;
    println!("{:>8} {:>8} {:>10} {:>10} {:>10}", "alpha", "theta", "|[X,Y]|", "gram", "lift");
    for k in 1..=8 {
        let alpha = FRAC_PI_2 * k as f64 / 9.0;
        let pt = FundamentalPoint::new(m2_curve_theta(alpha), alpha)?;
        let w = m2_witness(&pt, &op)?;
        let r = w.residuals;
        println!(
            "{:8.4} {:8.4} {:10.1e} {:10.1e} {:10.1e}",
            alpha, pt.theta, r.condition_b_norm, r.condition_c_gram, r.lift_numerator
        );
    }
    let off = FundamentalPoint::new(1.0, 0.3)?;
    println!("(1.0, 0.3) on locus: {}", m2_flat_locus(&off));
    Ok(())
}
