//! Moves the pair (F(theta, alpha), 1) around its orbit and reduces it back
//! to the fundamental domain.

use biquotient_flats::lie::{SpaceConfig, Subspace};
use biquotient_flats::orbit::{
    f_matrix, random_group_element_from, random_subgroup_element, reduce_to_f, seeded_rng, FundamentalPoint,
};

fn main() -> biquotient_flats::error::Result<()> {
    let cfg = SpaceConfig::new(3)?;
    let mut rng = seeded_rng(11);
    for (theta, alpha) in [(0.3, 0.2), (0.7, 1.1), (1.4, 0.05)] {
        let pt = FundamentalPoint::new(theta, alpha)?;
        let f = f_matrix(&pt, cfg.n())?;
        let g = random_group_element_from(&mut rng, cfg.m());
        let k = random_subgroup_element(&mut rng, &cfg, Subspace::K);
        let nn = random_subgroup_element(&mut rng, &cfg, Subspace::N);
        let g1 = g.mul(&f)?.mul(&k.inverse())?;
        let g2 = g.mul(&nn.inverse())?;
        let r = reduce_to_f(&g1, &g2)?;
        println!(
            "({theta:.3}, {alpha:.3}) -> ({:.12}, {:.12})  invariants {:?}",
            r.point.theta, r.point.alpha, r.invariants
        );
    }
    Ok(())
}
