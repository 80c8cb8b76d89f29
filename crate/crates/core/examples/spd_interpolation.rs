//! Log-Euclidean blending between a compliance stiffness and PD gains.

use cotap::spd::{log_euclidean_interpolate, SpdMatrix, Unit};
use nalgebra::DMatrix;

fn main() -> cotap::Result<()> {
    let k_comp = SpdMatrix::new(
        DMatrix::from_row_slice(2, 2, &[40.0, 12.0, 12.0, 15.0]),
        Unit::RotationalStiffness,
    )?;
    let k_pd = SpdMatrix::from_diagonal(&[100.0, 100.0], Unit::RotationalStiffness)?;

    println!("alpha   log det     eigenvalues");
    for i in 0..=10 {
        let alpha = i as f64 / 10.0;
        let k = log_euclidean_interpolate(&k_comp, &k_pd, alpha)?;
        let eig = k.eigenvalues();
        println!(
            "{alpha:4.1}  {:10.6}  [{:9.4} {:9.4}]",
            k.log_det(),
            eig[0],
            eig[1]
        );
    }
    Ok(())
}
