use std::path::Path;

use cotap::sim::{run_scenario, ScenarioConfig};

fn load(name: &str) -> ScenarioConfig {
    ScenarioConfig::load(
        &Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("scenarios")
            .join(name),
    )
    .unwrap()
}

#[test]
fn identical_seed_gives_identical_csv() {
    let mut cfg = load("impact.toml");
    cfg.randomization.enabled = true;
    let a = run_scenario(&cfg).unwrap();
    let b = run_scenario(&cfg).unwrap();
    assert_eq!(a.trace.to_csv(), b.trace.to_csv());
    assert_eq!(a.randomized, b.randomized);

    cfg.seed += 1;
    let c = run_scenario(&cfg).unwrap();
    assert_ne!(a.randomized, c.randomized);
}

#[test]
fn zero_force_holds_posture() {
    let m = run_scenario(&load("zero_force.toml")).unwrap().metrics;
    assert!(m.e_ee < 1e-3, "e_ee = {}", m.e_ee);
}

#[test]
fn halving_dt_barely_moves_the_steady_deflection() {
    let mut cfg = load("constant_load.toml");
    let coarse = run_scenario(&cfg).unwrap().metrics.steady_ee_error[2];
    cfg.dt = 0.0005;
    let fine = run_scenario(&cfg).unwrap().metrics.steady_ee_error[2];
    assert!((coarse - fine).abs() / fine < 0.005, "{coarse} vs {fine}");
}

#[test]
fn impact_settles_without_sustained_oscillation() {
    let out = run_scenario(&load("impact.toml")).unwrap();
    let t = out.trace.column("t").unwrap();
    let err: Vec<f64> = ["ee_err_x", "ee_err_y", "ee_err_z"]
        .iter()
        .map(|c| out.trace.column(c).unwrap())
        .fold(vec![0.0; t.len()], |acc, col| {
            acc.iter().zip(col).map(|(a, b)| a + b * b).collect()
        })
        .into_iter()
        .map(f64::sqrt)
        .collect();
    let peak = t
        .iter()
        .zip(&err)
        .filter(|(t, _)| **t > 1.0 && **t < 2.0)
        .map(|(_, e)| *e)
        .fold(0.0, f64::max);
    let tail = t
        .iter()
        .zip(&err)
        .filter(|(t, _)| **t > 3.0)
        .map(|(_, e)| *e)
        .fold(0.0, f64::max);
    assert!(peak > 0.01, "impact should displace the hand, peak {peak}");
    assert!(tail < 0.1 * peak, "tail {tail} vs peak {peak}");
}

#[test]
fn deflection_is_linear_in_small_loads() {
    let mut cfg = load("constant_load.toml");
    for load in [5.0, 10.0, 20.0] {
        cfg.forces[0].vector = [0.0, 0.0, -load];
        let z = run_scenario(&cfg).unwrap().metrics.steady_ee_error[2];
        let ideal = load / 500.0;
        assert!((z - ideal).abs() / ideal < 0.1, "{load} N: {z}");
    }
}
