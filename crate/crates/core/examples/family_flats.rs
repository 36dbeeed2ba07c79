//! The open family of flat planes for n >= 3: mu, eta and the certified
//! witness at a point of region Z for several directions b.

use biquotient_flats::flat::{family_n_witness, in_region_z, lemma_residuals, mu_eta};
use biquotient_flats::lie::SpaceConfig;
use biquotient_flats::metric::MetricOperator;
use biquotient_flats::orbit::FundamentalPoint;
use biquotient_flats::quat::Quaternion;

fn main() -> biquotient_flats::error::Result<()> {
    let pt = FundamentalPoint::new(std::f64::consts::FRAC_PI_3, std::f64::consts::FRAC_PI_4)?;
    println!("in Z: {}", in_region_z(&pt));
    let me = mu_eta(&pt);
    println!("mu = {:.12}, eta = {:.12}, system residuals {:?}", me.mu, me.eta, lemma_residuals(&pt));

    for n in [3, 4] {
        let op = MetricOperator::cheeger(SpaceConfig::new(n)?, 1.0)?;
        for b in [Quaternion::I, Quaternion::J, "0.6j+0.8k".parse()?] {
            let w = family_n_witness(&pt, b, &op)?;
            println!("n = {n} b = {b}: valid {} residuals {:?}", w.is_valid(), w.residuals);
        }
    }
    Ok(())
}
