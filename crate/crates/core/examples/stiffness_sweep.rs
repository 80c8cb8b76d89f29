//! Steady deflection against task stiffness under the constant load.

use std::path::Path;

use cotap::sim::{run_scenario, ScenarioConfig, SweepKey};

fn main() -> cotap::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/constant_load.toml");
    let base = ScenarioConfig::load(&path)?;
    println!("k_ee.z   e_ee      steady z");
    for k in [100.0, 300.0, 500.0, 800.0] {
        let mut cfg = base.clone();
        SweepKey::KeeZ.apply(&mut cfg, k)?;
        let m = run_scenario(&cfg)?.metrics;
        println!("{k:6}  {:.5}  {:.5}", m.e_ee, m.steady_ee_error[2]);
    }
    Ok(())
}
