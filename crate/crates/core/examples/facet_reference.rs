//! Impedance reference under a step load, integrated at the control rate.

use cotap::facet::{advance_reference, ImpedanceParams, ReferenceState};
use nalgebra::Vector3;

fn main() -> cotap::Result<()> {
    let p = ImpedanceParams::diagonal([500.0; 3])?;
    let x_des = Vector3::new(0.3, 0.2, 0.0);
    for load in [10.0, 30.0, 50.0] {
        let f = Vector3::new(0.0, 0.0, -load);
        let mut s = ReferenceState::at_rest(x_des, 0.0);
        for _ in 0..500 {
            s = advance_reference(&p, &s, &x_des, &Vector3::zeros(), &f, 0.02);
        }
        println!(
            "{load:4} N: x_des - x_ref = {:.6} m (ideal {:.3})",
            (x_des - s.x_ref).z,
            load / 500.0
        );
    }
    Ok(())
}
