//! Multi-start search for flat planes: on the M_2 curve it recovers a
//! certified witness, away from it the objective stays bounded below.

use biquotient_flats::flat::{find_flat_plane_with, m2_curve_theta, Optimizer, SearchOptions};
use biquotient_flats::lie::SpaceConfig;
use biquotient_flats::metric::MetricOperator;
use biquotient_flats::orbit::FundamentalPoint;

fn main() -> biquotient_flats::error::Result<()> {
    let op = MetricOperator::cheeger(SpaceConfig::new(2)?, 1.0)?;
    let points = [
        ("on curve", FundamentalPoint::new(m2_curve_theta(0.9), 0.9)?),
        ("off curve", FundamentalPoint::new(1.0, 0.3)?),
    ];
    for optimizer in [Optimizer::LevenbergMarquardt, Optimizer::ProjectedGradient] {
        let mut opts = SearchOptions::new(10);
        opts.optimizer = optimizer;
        for (label, pt) in &points {
            let s = find_flat_plane_with(pt, &op, 5, &opts)?;
            println!(
                "{optimizer:?} {label:>9}: objective {:.3e} found {} iterations {}",
                s.best_objective,
                s.found(),
                s.iterations
            );
        }
    }
    Ok(())
}
