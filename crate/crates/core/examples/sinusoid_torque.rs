//! Sinusoidal load on both hands. The left arm is compliance modulated
//! (α = 0.7), the right arm runs PD.

use std::path::Path;

use cotap::sim::{run_scenario, ScenarioConfig};

fn main() -> cotap::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/periodic_load.toml");
    let out = run_scenario(&ScenarioConfig::load(&path)?)?;
    for (joint, rms) in &out.metrics.joint_torque_rms {
        println!("{joint:20} {rms:8.4} Nm");
    }
    let left = out.metrics.joint_torque_rms["left_elbow"];
    let right = out.metrics.joint_torque_rms["right_elbow"];
    println!("elbow RMS modulated/PD = {:.5}", left / right);
    Ok(())
}
