//! Quaternion arithmetic, sp(m) brackets and group elements from `expm`.

use biquotient_flats::lie::{adjoint_action, SpBasis};
use biquotient_flats::orbit::{random_algvec, seeded_rng};
use biquotient_flats::quat::{expm, qmul, Quaternion, EXPM_TOL};

fn main() -> biquotient_flats::error::Result<()> {
    let (i, j) = (Quaternion::I, Quaternion::J);
    println!("i j = {}", qmul(i, j));
    println!("j i = {}", qmul(j, i));
    let q: Quaternion = "1 + 2i - 0.5k".parse()?;
    println!("|q| = {:.6}, q^-1 = {}", q.norm(), q.inverse().unwrap());

    let basis = SpBasis::new(3);
    println!("dim sp(3) = {}", basis.dim());

    let mut rng = seeded_rng(1);
    let x = random_algvec(&mut rng, 3, 1.0);
    let y = random_algvec(&mut rng, 3, 1.0);
    let g = expm(x.matrix(), EXPM_TOL)?;
    println!("unitarity residual of exp(X): {:.2e}", g.matrix().unitarity_residual());

    // Ad_g preserves brackets.
    let lhs = adjoint_action(&g, &x.lie(&y))?;
    let rhs = adjoint_action(&g, &x)?.lie(&adjoint_action(&g, &y)?);
    println!("|Ad_g[X,Y] - [Ad_g X, Ad_g Y]| = {:.2e}", lhs.minus(&rhs).norm0());
    Ok(())
}
