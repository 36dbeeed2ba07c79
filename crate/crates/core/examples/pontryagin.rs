//! First Pontryagin classes of the two comparison spaces and the quotients
//! of H^4 with Z_24 coefficients.

use biquotient_flats::topology::{check_ring_isomorphism, pontryagin_p1, presentation, QuotientReport, Space};

fn main() -> biquotient_flats::error::Result<()> {
    for space in [Space::Q2, Space::R2] {
        let pres = presentation(space);
        println!("{}: relations", space.name());
        for r in &pres.relations {
            println!("    {r}");
        }
        println!("  p1 = {}", pontryagin_p1(space)?);
        let q = QuotientReport::new(space, 24)?;
        println!("  H^4/p1 = {} (published {})", q.computed, q.published);
    }
    let iso = check_ring_isomorphism();
    println!("ring isomorphism holds: {}", iso.holds);
    Ok(())
}
