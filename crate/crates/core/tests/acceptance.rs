//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails. Tolerances and runtime budgets are
//! pinned below.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use cotap::compliance::{
    build_modulated_stiffness, rigid_torso, solve_upper_joint_compliance, ComplianceGoal,
    PdBaseline,
};
use cotap::facet::facet_tracking_reward;
use cotap::kinematics::{h1_upper, BasePose, JointVector, KinematicChain, GRAVITY};
use cotap::sim::scenario::TorsoSpec;
use cotap::sim::{
    keypoint_to_torso_relative, keypoint_to_world, mass_matrix, run_scenario, ControllerKind,
    ScenarioConfig, SweepKey,
};
use cotap::spd::{log_euclidean_interpolate, spd_exp, spd_log, SpdMatrix, Unit};
use cotap::training::{
    gaussian_kl, keypoint_reward, ranges, ref_closeness_reward, sample_randomization_with,
    DiagonalGaussian, Interval, RandomizedParams, KEYPOINT_REWARD_SCALE,
};
use nalgebra::{DMatrix, DVector, UnitQuaternion, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LOAD_REL_TOL_COTAP: f64 = 0.10;
const LOAD_REL_TOL_FACET: f64 = 0.02;
const K_COMP_FROB_TOL: f64 = 1e-9;
const LOG_DET_TOL: f64 = 1e-8;
const ROUND_TRIP_TOL: f64 = 1e-9;
const SOLVER_TOL: f64 = 1e-9;
const JACOBIAN_FD_TOL: f64 = 1e-5;
const GRAVITY_FD_TOL: f64 = 1e-6;
const MASS_KE_TOL: f64 = 1e-6;
const KL_QUAD_TOL: f64 = 1e-6;
const REWARD_TOL: f64 = 1e-12;
const KEYPOINT_TOL: f64 = 1e-12;

struct Outcome {
    ok: bool,
    detail: String,
}

fn scenario(name: &str) -> ScenarioConfig {
    let path: PathBuf = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name);
    ScenarioConfig::load(&path).expect("bundled scenario loads")
}

fn random_spd(rng: &mut impl Rng, dim: usize, lo: f64, hi: f64) -> DMatrix<f64> {
    let a = DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-1.0..1.0));
    let q = a.qr().q();
    let eig = DVector::from_fn(dim, |_, _| {
        (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
    });
    let m = &q * DMatrix::from_diagonal(&eig) * q.transpose();
    (&m + m.transpose()) * 0.5
}

fn random_q(chain: &KinematicChain, rng: &mut impl Rng) -> JointVector {
    let (lo, hi) = (chain.lower_limits(), chain.upper_limits());
    JointVector::from_fn(chain.dof(), |i, _| {
        let margin = 0.05 * (hi[i] - lo[i]);
        rng.random_range(lo[i] + margin..hi[i] - margin)
    })
}

fn random_pose(rng: &mut impl Rng) -> BasePose {
    let mut v = || {
        Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        )
    };
    let (p, axis, lin, ang) = (v(), v(), v(), v());
    BasePose {
        position: p,
        orientation: UnitQuaternion::from_scaled_axis(axis * 2.0),
        linear_velocity: lin,
        angular_velocity: ang,
    }
}

/// Steady hand deflection under constant loads of 10, 30 and 50 N.
fn criterion_1() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    let mut slowest = Duration::ZERO;
    for load in [10.0, 30.0, 50.0] {
        let ideal = load / 500.0;
        for kind in [ControllerKind::Cotap, ControllerKind::Facet] {
            let mut cfg = scenario("constant_load.toml");
            cfg.controller.kind = kind;
            cfg.forces[0].vector = [0.0, 0.0, -load];
            let start = Instant::now();
            let m = match run_scenario(&cfg) {
                Ok(out) => out.metrics,
                Err(e) => {
                    return Outcome {
                        ok: false,
                        detail: format!("{kind:?} {load} N: {e}"),
                    }
                }
            };
            slowest = slowest.max(start.elapsed());
            let (measured, tol, label) = match kind {
                ControllerKind::Cotap => (m.steady_ee_error[2], LOAD_REL_TOL_COTAP, "cotap"),
                _ => (
                    m.steady_ref_error.map_or(f64::NAN, |r| r[2]),
                    LOAD_REL_TOL_FACET,
                    "facet x_ref",
                ),
            };
            let rel = (measured - ideal).abs() / ideal;
            ok &= rel <= tol;
            detail.push(format!("{label} {load}N {measured:.4}"));
        }
    }
    ok &= slowest < Duration::from_secs(30);
    detail.push(format!("slowest {:.2}s", slowest.as_secs_f64()));
    Outcome {
        ok,
        detail: detail.join(", "),
    }
}

/// α = 0 is bit-identical to PD; α = 1 uses the solved stiffness.
fn criterion_2() -> Outcome {
    let mut pd = scenario("constant_load_alpha0.toml");
    pd.controller.kind = ControllerKind::Pd;
    let alpha0 = scenario("constant_load_alpha0.toml");
    let a = run_scenario(&pd).map(|o| o.trace.to_csv());
    let b = run_scenario(&alpha0).map(|o| o.trace.to_csv());
    let identical = matches!((&a, &b), (Ok(x), Ok(y)) if x == y);

    let chain = h1_upper();
    let base = BasePose::identity();
    let pd_gains = PdBaseline::uniform(chain.dof(), 100.0, 1.0).unwrap();
    let goal = ComplianceGoal::diagonal([300.0, 500.0, 800.0], 25.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    while checked < 50 {
        let q = random_q(&chain, &mut rng);
        let m = build_modulated_stiffness(
            &chain,
            &base,
            &q,
            "left_hand",
            &goal,
            &pd_gains,
            &rigid_torso(),
        )
        .unwrap();
        if m.alpha.processed != 1.0 {
            continue;
        }
        let k_comp = m.k_comp.as_ref().expect("solved at alpha 1");
        worst = worst.max((m.stiffness.matrix() - k_comp.matrix()).norm());

        let jac = chain.position_jacobian(&base, &q, "left_hand").unwrap();
        let j = DMatrix::from_fn(3, m.joints.len(), |r, c| jac[(r, m.joints[c])]);
        let pinv = j.transpose() * (&j * j.transpose()).try_inverse().unwrap();
        let c_e = DMatrix::from_diagonal(&DVector::from_vec(vec![
            1.0 / 300.0,
            1.0 / 500.0,
            1.0 / 800.0,
        ]));
        let n = DMatrix::identity(4, 4) - &pinv * &j;
        let k_inv = &pinv * c_e * pinv.transpose() + n / 25.0;
        let oracle = k_inv.try_inverse().unwrap();
        worst = worst.max((m.stiffness.matrix() - &oracle).norm() / oracle.norm());
        checked += 1;
    }
    Outcome {
        ok: identical && worst <= K_COMP_FROB_TOL,
        detail: format!("alpha0 trace identical {identical}, alpha1 max deviation {worst:.2e}"),
    }
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut all_spd, mut worst_det, mut worst_rt): (bool, f64, f64) = (true, 0.0, 0.0);
    for i in 0..1000 {
        let dim = 2 + i % 7;
        let a = SpdMatrix::new(
            random_spd(&mut rng, dim, 0.1, 100.0),
            Unit::RotationalStiffness,
        )
        .unwrap();
        let b = SpdMatrix::new(
            random_spd(&mut rng, dim, 0.1, 100.0),
            Unit::RotationalStiffness,
        )
        .unwrap();
        for alpha in [0.0, 0.25, 0.5, 0.75, 1.0, rng.random::<f64>()] {
            let k = log_euclidean_interpolate(&a, &b, alpha).unwrap();
            all_spd &= k.eigenvalues().iter().all(|&l| l > 0.0);
            let expected = alpha * a.log_det() + (1.0 - alpha) * b.log_det();
            worst_det = worst_det.max((k.log_det() - expected).abs());
        }
        let back = spd_exp(&spd_log(&a).unwrap(), Unit::RotationalStiffness);
        worst_rt = worst_rt.max((back.matrix() - a.matrix()).norm() / a.matrix().norm());
    }
    Outcome {
        ok: all_spd && worst_det <= LOG_DET_TOL && worst_rt <= ROUND_TRIP_TOL,
        detail: format!("all SPD {all_spd}, log det {worst_det:.2e}, round trip {worst_rt:.2e}"),
    }
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut worst_rec, mut worst_null): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let j = DMatrix::from_fn(3, 8, |_, _| rng.random_range(-1.0..1.0));
        let c_hat = SpdMatrix::new(
            random_spd(&mut rng, 3, 1e-3, 1e-1),
            Unit::TranslationalCompliance,
        )
        .unwrap();
        let k_null = rng.random_range(5.0..80.0);
        let k_inv = solve_upper_joint_compliance(&j, &c_hat, k_null).unwrap();
        let k_inv = k_inv.matrix();
        let rec = &j * k_inv * j.transpose();
        worst_rec = worst_rec.max((rec - c_hat.matrix()).norm() / c_hat.matrix().norm());
        let pinv = j.transpose() * (&j * j.transpose()).try_inverse().unwrap();
        let n = DMatrix::identity(8, 8) - &pinv * &j;
        let projected = &n * k_inv * &n;
        worst_null = worst_null.max((projected - &n / k_null).norm() * k_null);
    }
    Outcome {
        ok: worst_rec <= SOLVER_TOL && worst_null <= SOLVER_TOL,
        detail: format!("reconstruction {worst_rec:.2e}, null space {worst_null:.2e}"),
    }
}

fn criterion_5() -> Outcome {
    let base = scenario("constant_load.toml");
    let mut errors = Vec::new();
    for k in [100.0, 300.0, 500.0, 800.0] {
        let mut cfg = base.clone();
        SweepKey::KeeZ.apply(&mut cfg, k).unwrap();
        match run_scenario(&cfg) {
            Ok(out) => errors.push(Vector3::from(out.metrics.steady_ee_error).norm()),
            Err(e) => {
                return Outcome {
                    ok: false,
                    detail: format!("K {k}: {e}"),
                }
            }
        }
    }
    let ok = errors.windows(2).all(|w| w[1] < w[0]);
    let shown: Vec<String> = errors.iter().map(|e| format!("{e:.4}")).collect();
    Outcome {
        ok,
        detail: format!("steady e_ee over K 100/300/500/800: {}", shown.join(" > ")),
    }
}

fn criterion_6() -> Outcome {
    let dual = scenario("periodic_load.toml");
    let mut all_pd = dual.clone();
    all_pd.controller.kind = ControllerKind::Pd;
    let (a, b) = match (run_scenario(&dual), run_scenario(&all_pd)) {
        (Ok(a), Ok(b)) => (a.metrics, b.metrics),
        _ => {
            return Outcome {
                ok: false,
                detail: "scenario failed".into(),
            }
        }
    };
    let modulated = a.joint_torque_rms["left_elbow"];
    let pd_same_run = a.joint_torque_rms["right_elbow"];
    let pd_same_arm = b.joint_torque_rms["left_elbow"];
    Outcome {
        ok: modulated < pd_same_run && modulated < pd_same_arm,
        detail: format!("elbow RMS modulated {modulated:.4} Nm, PD arm {pd_same_run:.4} Nm, PD same arm {pd_same_arm:.4} Nm"),
    }
}

fn potential(chain: &KinematicChain, base: &BasePose, q: &JointVector) -> f64 {
    let frames = chain.frames(base, q).unwrap();
    chain
        .com_positions(&frames)
        .iter()
        .zip(chain.links())
        .map(|(c, l)| -l.mass * GRAVITY.dot(c))
        .sum()
}

fn kinetic(chain: &KinematicChain, q: &JointVector, qd: &JointVector) -> f64 {
    let h = 1e-6;
    let base = BasePose::identity();
    let plus = chain.com_positions(&chain.frames(&base, &(q + qd * h)).unwrap());
    let minus = chain.com_positions(&chain.frames(&base, &(q - qd * h)).unwrap());
    let links: f64 = chain
        .links()
        .iter()
        .enumerate()
        .map(|(k, l)| 0.5 * l.mass * ((plus[k] - minus[k]) / (2.0 * h)).norm_squared())
        .sum();
    let rotors: f64 = chain
        .links()
        .iter()
        .zip(qd.iter())
        .map(|(l, v)| 0.5 * l.armature * v * v)
        .sum();
    links + rotors
}

fn criterion_7() -> Outcome {
    let chain = h1_upper();
    let n = chain.dof();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut worst_j, mut worst_g, mut worst_m): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..200 {
        let q = random_q(&chain, &mut rng);
        let base = random_pose(&mut rng);
        let h = 1e-6;
        for ee in ["left_hand", "right_hand"] {
            let jac = chain.position_jacobian(&base, &q, ee).unwrap();
            for i in 0..n {
                let mut qp = q.clone();
                let mut qm = q.clone();
                qp[i] += h;
                qm[i] -= h;
                let fd = (chain.end_effector_position(&base, &qp, ee).unwrap()
                    - chain.end_effector_position(&base, &qm, ee).unwrap())
                    / (2.0 * h);
                worst_j = worst_j.max((fd - jac.column(i)).amax());
            }
        }

        let tau = chain.gravity_torques(&base, &q, &GRAVITY).unwrap();
        let h = 1e-5;
        for i in 0..n {
            let mut qp = q.clone();
            let mut qm = q.clone();
            qp[i] += h;
            qm[i] -= h;
            let fd = (potential(&chain, &base, &qp) - potential(&chain, &base, &qm)) / (2.0 * h);
            worst_g = worst_g.max((fd - tau[i]).abs());
        }

        let m = mass_matrix(&chain, &q).unwrap();
        let e = |i: usize| JointVector::from_fn(n, |r, _| if r == i { 1.0 } else { 0.0 });
        for i in 0..n {
            for j in 0..n {
                let oracle = if i == j {
                    2.0 * kinetic(&chain, &q, &e(i))
                } else {
                    kinetic(&chain, &q, &(e(i) + e(j)))
                        - kinetic(&chain, &q, &e(i))
                        - kinetic(&chain, &q, &e(j))
                };
                worst_m = worst_m.max((oracle - m.matrix()[(i, j)]).abs());
            }
        }
    }
    Outcome {
        ok: worst_j <= JACOBIAN_FD_TOL && worst_g <= GRAVITY_FD_TOL && worst_m <= MASS_KE_TOL,
        detail: format!("jacobian {worst_j:.2e}, gravity {worst_g:.2e} Nm, mass {worst_m:.2e}"),
    }
}

fn log_normal_pdf(x: f64, mu: f64, sigma: f64) -> f64 {
    let z = (x - mu) / sigma;
    -0.5 * z * z - sigma.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
}

/// Composite Simpson quadrature of `∫ p ln(p/q)` per dimension.
fn kl_quadrature(p: &DiagonalGaussian, q: &DiagonalGaussian) -> f64 {
    let intervals = 20_000;
    (0..p.dim())
        .map(|i| {
            let (mp, sp, mq, sq) = (p.mean()[i], p.std()[i], q.mean()[i], q.std()[i]);
            let (a, b) = (mp - 12.0 * sp, mp + 12.0 * sp);
            let h = (b - a) / intervals as f64;
            let f = |x: f64| {
                let lp = log_normal_pdf(x, mp, sp);
                lp.exp() * (lp - log_normal_pdf(x, mq, sq))
            };
            let mut s = f(a) + f(b);
            for k in 1..intervals {
                s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
            }
            s * h / 3.0
        })
        .sum()
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_kl: f64 = 0.0;
    for _ in 0..20 {
        let dim = rng.random_range(1..6);
        let mut draw = |lo: f64, hi: f64| {
            (0..dim)
                .map(|_| rng.random_range(lo..hi))
                .collect::<Vec<_>>()
        };
        let p = DiagonalGaussian::from_slices(&draw(-1.0, 1.0), &draw(0.2, 1.5)).unwrap();
        let q = DiagonalGaussian::from_slices(&draw(-1.0, 1.0), &draw(0.2, 1.5)).unwrap();
        worst_kl = worst_kl.max((gaussian_kl(&p, &q).unwrap() - kl_quadrature(&p, &q)).abs());
    }

    let draws = 100_000;
    let fields: [(Interval, fn(&RandomizedParams) -> f64); 9] = [
        (ranges::FRICTION, |p| p.friction),
        (ranges::LINK_MASS_SCALE, |p| p.link_mass_scale),
        (ranges::BASE_MASS_DELTA, |p| p.base_mass_delta),
        (ranges::CONTROL_DELAY, |p| p.control_delay),
        (ranges::P_GAIN_SCALE, |p| p.p_gain_scale),
        (ranges::D_GAIN_SCALE, |p| p.d_gain_scale),
        (ranges::K_EE, |p| p.k_ee),
        (ranges::K_NULL, |p| p.k_null),
        (ranges::ALPHA, |p| p.alpha),
    ];
    let mut sums = [0.0; 9];
    let mut in_range = true;
    for _ in 0..draws {
        let s = sample_randomization_with(&mut rng);
        in_range &= s.in_range();
        for (k, (iv, get)) in fields.iter().enumerate() {
            let v = get(&s);
            in_range &= v >= iv.lo && v <= iv.hi;
            sums[k] += v;
        }
    }
    let mean_ok = fields.iter().zip(sums).all(|((iv, _), sum)| {
        let sd = (iv.hi - iv.lo) / 12f64.sqrt();
        (sum / draws as f64 - 0.5 * (iv.lo + iv.hi)).abs() <= 5.0 * sd / (draws as f64).sqrt()
    });

    let mut worst_r: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.random_range(1..10);
        let a = JointVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let q_ref = JointVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let sigma = rng.random_range(0.1..3.0);
        let sq: f64 = (0..n).map(|i| (a[i] - q_ref[i]).powi(2)).sum();
        worst_r = worst_r.max(
            (ref_closeness_reward(&a, &q_ref, sigma).unwrap() - (-sigma * sq.sqrt()).exp()).abs(),
        );

        let mut v = || {
            Vector3::new(
                rng.random_range(-0.2..0.2),
                rng.random_range(-0.2..0.2),
                rng.random_range(-0.2..0.2),
            )
        };
        let p: Vec<Vector3<f64>> = (0..n).map(|_| v()).collect();
        let p_ref: Vec<Vector3<f64>> = (0..n).map(|_| v()).collect();
        let mut sq = 0.0;
        for (x, y) in p.iter().zip(&p_ref) {
            for c in 0..3 {
                sq += (x[c] - y[c]) * (x[c] - y[c]);
            }
        }
        worst_r = worst_r.max(
            (keypoint_reward(&p, &p_ref).unwrap() - (-sq / KEYPOINT_REWARD_SCALE).exp()).abs(),
        );

        let (x, xd) = (v(), v());
        let mut direct = 0.0;
        for (r, rd) in p.iter().zip(&p_ref) {
            let (dp, dv) = (r - x, rd - xd);
            direct += (-(dv.x * dv.x + dv.y * dv.y + dv.z * dv.z)
                - (dp.x * dp.x + dp.y * dp.y + dp.z * dp.z))
                .exp();
        }
        direct /= n as f64;
        worst_r = worst_r.max((facet_tracking_reward(&p, &p_ref, &x, &xd).unwrap() - direct).abs());
    }
    Outcome {
        ok: worst_kl <= KL_QUAD_TOL && in_range && mean_ok && worst_r <= REWARD_TOL,
        detail: format!("KL {worst_kl:.2e}, samples in range {in_range}, uniform means {mean_ok}, rewards {worst_r:.2e}"),
    }
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let torso = random_pose(&mut rng);
        let p = Vector3::new(
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
        );
        let v = Vector3::new(
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
        );
        let (pr, vr) = keypoint_to_torso_relative(&p, &v, &torso);
        let (pb, vb) = keypoint_to_world(&pr, &vr, &torso);
        worst = worst.max((pb - p).amax()).max((vb - v).amax());
    }
    Outcome {
        ok: worst <= KEYPOINT_TOL,
        detail: format!("max round-trip error {worst:.2e}"),
    }
}

/// Aggregate stance and walk metrics need learned policies; this only checks
/// that the metric plumbing reports them honestly.
fn criterion_10() -> Outcome {
    let mut cfg = scenario("zero_force.toml");
    let without = run_scenario(&cfg).map(|o| o.metrics.e_torso);
    let steps = (cfg.duration * cfg.control_rate).round() as usize + 1;
    cfg.torso = Some(TorsoSpec {
        v_ref: vec![[0.5, 0.0, 0.0]; steps],
        v: vec![[0.4, 0.0, 0.0]; steps],
    });
    let with = run_scenario(&cfg).map(|o| o.metrics.e_torso);
    let ok = matches!(without, Ok(None)) && matches!(with, Ok(Some(e)) if (e - 0.1).abs() < 1e-12);
    Outcome {
        ok,
        detail: format!("informational, absolute aggregate metrics not reproduced; e_torso without script {without:?}, scripted {with:?}"),
    }
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome, Duration); 10] = [
        (
            1,
            "load deflection table",
            criterion_1,
            Duration::from_secs(180),
        ),
        (
            2,
            "modulation endpoints",
            criterion_2,
            Duration::from_secs(5),
        ),
        (3, "SPD properties", criterion_3, Duration::from_secs(10)),
        (
            4,
            "compliance solver identities",
            criterion_4,
            Duration::from_secs(5),
        ),
        (
            5,
            "monotone stiffness trend",
            criterion_5,
            Duration::from_secs(120),
        ),
        (
            6,
            "sinusoidal load elbow torque",
            criterion_6,
            Duration::from_secs(60),
        ),
        (
            7,
            "kinematics oracles",
            criterion_7,
            Duration::from_secs(20),
        ),
        (8, "training math", criterion_8, Duration::from_secs(10)),
        (
            9,
            "keypoint transforms",
            criterion_9,
            Duration::from_secs(10),
        ),
        (
            10,
            "aggregate metrics",
            criterion_10,
            Duration::from_secs(30),
        ),
    ];
    let mut failed = 0;
    for (n, name, check, budget) in criteria {
        let start = Instant::now();
        let out = check();
        let elapsed = start.elapsed();
        let ok = out.ok && elapsed <= budget;
        failed += usize::from(!ok);
        println!(
            "criterion {n:2} {}: {name}: {} [{:.2}s of {:.0}s]",
            if ok { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            budget.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
