//! Lower bound on |[X, Y]|^2 over orthonormal pairs in the complement of
//! sp(n-1) inside sp(n).

use biquotient_flats::flat::sphere_min_bracket;

fn main() -> biquotient_flats::error::Result<()> {
    for n in [2, 3] {
        for restarts in [5, 50] {
            println!("n = {n} restarts = {restarts:>2}: min |[X,Y]|^2 = {:.6}", sphere_min_bracket(n, 1, restarts)?);
        }
    }
    Ok(())
}
