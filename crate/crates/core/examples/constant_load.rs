//! Constant −50 N load on the left hand for PD, α = 0, compliance and the
//! impedance reference. Prints the steady hand deflection of each.

use std::path::Path;

use cotap::sim::{run_scenario, ScenarioConfig};

fn main() -> cotap::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    for name in [
        "constant_load_pd",
        "constant_load_alpha0",
        "constant_load",
        "constant_load_facet",
    ] {
        let cfg = ScenarioConfig::load(&dir.join(format!("{name}.toml")))?;
        let out = run_scenario(&cfg)?;
        let e = out.metrics.steady_ee_error;
        print!(
            "{name:22} steady error [{:+.4} {:+.4} {:+.4}] m",
            e[0], e[1], e[2]
        );
        if let Some(r) = out.metrics.steady_ref_error {
            print!("  reference offset z {:.4} m", r[2]);
        }
        println!();
    }
    println!("ideal F/K = {:.4} m", 50.0 / 500.0);
    Ok(())
}
