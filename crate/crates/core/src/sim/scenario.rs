//! Scenario files (`cotap-scenario/1`) and the scenario runner.
//!
//! ```toml
//! format = "cotap-scenario/1"
//! name = "constant-load"
//! model = "builtin:h1-upper"   # or a model file path, relative to this file
//! duration = 6.0               # [s]
//! seed = 7
//! dt = 0.001                   # physics step [s]
//! control_rate = 50.0          # [Hz]
//! probe_ee = "left_hand"       # end effector written to the trace
//! steady_window = 1.0          # tail used for steady-state metrics [s]
//!
//! [controller]
//! kind = "cotap"               # pd | cotap | facet | cotap_facet
//! kp = 100.0                   # scalar or one gain per joint [Nm/rad]
//! damping_ratio = 1.0
//! fallback = "pd"              # pd | error
//! gravity_mismatch = 1.0
//! torso_compliance = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
//!
//! [[controller.arm]]
//! ee = "left_hand"
//! k_ee = [500.0, 500.0, 500.0] # diagonal, or a nested 3x3 array [N/m]
//! k_null = 25.0
//! alpha = 1.0
//!
//! [controller.facet]
//! virtual_mass = 2.0
//! damping_ratio = 0.9
//! lambda = 0.05
//! ik_iterations = 5
//!
//! [[force]]
//! kind = "constant"            # constant | impulse | sinusoid
//! ee = "left_hand"
//! vector = [0.0, 0.0, -50.0]   # force, or sinusoid amplitude [N]
//! start = 1.0
//! # duration = 0.05           required for impulses
//! # period = 4.0              required for sinusoids
//!
//! [torso]                      # optional scripted torso velocities
//! v_ref = [[0.5, 0.0, 0.0]]
//! v = [[0.45, 0.02, 0.0]]
//!
//! [randomization]
//! enabled = false
//!
//! [output]
//! trace = "trace.csv"
//! metrics = "metrics.json"
//! trace_every = 20             # physics steps per trace row
//! ```

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::controller::{
    task_stiffness, ArmConfig, Controller, ControllerConfig, ControllerKind, FacetConfig, Fallback,
};
use super::dynamics::{
    self, external_forces, ExternalForceProfile, ForceKind, Plant, SimState, MAX_DT,
};
use super::metrics::{
    avg_upper_torque, ee_tracking_error, mean3, torque_rms, torso_velocity_error,
    upper_tracking_error, MetricsReport,
};
use crate::compliance::{ComplianceGoal, PdBaseline};
use crate::error::{Error, Result};
use crate::kinematics::{h1_upper, load_chain, toml_error, BasePose, JointVector, KinematicChain};
use crate::spd::SymmetricMatrix;
use crate::training::{sample_randomization, RandomizedParams};

pub const SCENARIO_FORMAT: &str = "cotap-scenario/1";
pub const METRICS_SCHEMA: &str = "cotap-metrics/1";
/// Model name resolving to the bundled upper body.
pub const BUILTIN_H1_UPPER: &str = "builtin:h1-upper";

fn default_model() -> String {
    BUILTIN_H1_UPPER.into()
}
fn default_dt() -> f64 {
    0.001
}
fn default_control_rate() -> f64 {
    50.0
}
fn default_steady_window() -> f64 {
    1.0
}
fn default_kp() -> Gains {
    Gains::Uniform(100.0)
}
fn one() -> f64 {
    1.0
}
fn default_k_null() -> f64 {
    25.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub format: String,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default = "default_model")]
    pub model: String,
    pub duration: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_control_rate")]
    pub control_rate: f64,
    #[serde(default)]
    pub probe_ee: Option<String>,
    #[serde(default = "default_steady_window")]
    pub steady_window: f64,
    pub controller: ControllerSpec,
    #[serde(rename = "force", default)]
    pub forces: Vec<ForceSpec>,
    #[serde(default)]
    pub torso: Option<TorsoSpec>,
    #[serde(default)]
    pub randomization: RandomizationSpec,
    #[serde(default)]
    pub output: OutputSpec,
    /// Directory relative model paths resolve against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Gains {
    Uniform(f64),
    PerJoint(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TaskStiffnessSpec {
    Diagonal([f64; 3]),
    Full([[f64; 3]; 3]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerSpec {
    pub kind: ControllerKind,
    #[serde(default = "default_kp")]
    pub kp: Gains,
    #[serde(default = "one")]
    pub damping_ratio: f64,
    #[serde(default)]
    pub fallback: Fallback,
    #[serde(default = "one")]
    pub gravity_mismatch: f64,
    #[serde(default)]
    pub torso_compliance: Option<[f64; 6]>,
    #[serde(rename = "arm", default)]
    pub arms: Vec<ArmSpec>,
    #[serde(default)]
    pub facet: Option<FacetSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArmSpec {
    pub ee: String,
    pub k_ee: TaskStiffnessSpec,
    #[serde(default = "default_k_null")]
    pub k_null: f64,
    #[serde(default = "one")]
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FacetSpec {
    pub virtual_mass: Option<f64>,
    pub damping_ratio: Option<f64>,
    pub lambda: Option<f64>,
    pub ik_iterations: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForceSpec {
    pub kind: ForceKind,
    pub ee: String,
    pub vector: [f64; 3],
    #[serde(default)]
    pub start: f64,
    #[serde(default)]
    pub duration: Option<f64>,
    #[serde(default)]
    pub period: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorsoSpec {
    pub v_ref: Vec<[f64; 3]>,
    pub v: Vec<[f64; 3]>,
}

/// When enabled, the plant masses, PD gains, compliance goals and command
/// delay are drawn from the randomization ranges using the scenario seed.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomizationSpec {
    #[serde(default)]
    pub enabled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_trace")]
    pub trace: String,
    #[serde(default = "default_metrics")]
    pub metrics: String,
    #[serde(default)]
    pub trace_every: Option<usize>,
}

fn default_trace() -> String {
    "trace.csv".into()
}
fn default_metrics() -> String {
    "metrics.json".into()
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            trace: default_trace(),
            metrics: default_metrics(),
            trace_every: None,
        }
    }
}

impl ScenarioConfig {
    /// Parses scenario text; `base_dir` anchors relative model paths.
    pub fn from_toml(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let mut cfg: ScenarioConfig = toml::from_str(text).map_err(|e| toml_error(text, e))?;
        if cfg.format != SCENARIO_FORMAT {
            return Err(Error::validation(
                "format",
                format!("expected \"{SCENARIO_FORMAT}\", found \"{}\"", cfg.format),
            ));
        }
        cfg.base_dir = base_dir.map(Path::to_path_buf);
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = read_text(path)?;
        Self::from_toml(&text, path.parent())
    }

    pub fn load_model(&self) -> Result<KinematicChain> {
        if self.model == BUILTIN_H1_UPPER {
            return Ok(h1_upper());
        }
        let path = match &self.base_dir {
            Some(dir) => dir.join(&self.model),
            None => PathBuf::from(&self.model),
        };
        load_chain(&read_text(&path)?)
    }

    /// Checks every invariant a run relies on without simulating.
    pub fn validate(&self) -> Result<KinematicChain> {
        Ok(self.resolve()?.chain)
    }

    fn probe(&self, chain: &KinematicChain) -> Result<String> {
        let name = match (&self.probe_ee, self.controller.arms.first()) {
            (Some(p), _) => p.clone(),
            (None, Some(arm)) => arm.ee.clone(),
            (None, None) => chain
                .end_effectors()
                .first()
                .map(|e| e.name.clone())
                .ok_or_else(|| Error::validation("probe_ee", "model has no end effectors"))?,
        };
        chain
            .end_effector(&name)
            .map_err(|_| Error::validation("probe_ee", format!("unknown end effector `{name}`")))?;
        Ok(name)
    }

    fn resolve(&self) -> Result<Resolved> {
        let chain = self.load_model()?;
        let n = chain.dof();
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            return Err(Error::validation("duration", "duration must be positive"));
        }
        if !(self.dt > 0.0 && self.dt <= MAX_DT) {
            return Err(Error::validation(
                "dt",
                format!("physics dt must be in (0, {MAX_DT}]"),
            ));
        }
        if !(self.control_rate > 0.0) {
            return Err(Error::validation(
                "control_rate",
                "control rate must be positive",
            ));
        }
        let per = 1.0 / (self.control_rate * self.dt);
        let ctrl_every = per.round() as usize;
        if ctrl_every == 0 || (per - ctrl_every as f64).abs() > 1e-6 {
            return Err(Error::validation(
                "control_rate",
                "control period must be a whole number of physics steps",
            ));
        }
        if !(self.steady_window > 0.0 && self.steady_window <= self.duration) {
            return Err(Error::validation(
                "steady_window",
                "steady window must lie within the run",
            ));
        }
        let n_steps = (self.duration / self.dt).round() as usize;

        let randomized = self
            .randomization
            .enabled
            .then(|| sample_randomization(self.seed));

        let c = &self.controller;
        let mut kp = match &c.kp {
            Gains::Uniform(k) => vec![*k; n],
            Gains::PerJoint(v) if v.len() == n => v.clone(),
            Gains::PerJoint(v) => {
                return Err(Error::validation(
                    "controller.kp",
                    format!("expected {n} gains, found {}", v.len()),
                ));
            }
        };
        let mut damping_ratio = c.damping_ratio;
        if let Some(r) = &randomized {
            kp.iter_mut().for_each(|k| *k *= r.p_gain_scale);
            damping_ratio *= r.d_gain_scale;
        }
        let pd = PdBaseline::new(&kp, damping_ratio)
            .map_err(|e| Error::validation("controller.kp", e.to_string()))?;

        let mut arms = Vec::new();
        let mut seen = Vec::new();
        for a in &c.arms {
            let field = format!("controller.arm.{}", a.ee);
            chain
                .end_effector(&a.ee)
                .map_err(|_| Error::validation(format!("{field}.ee"), "unknown end effector"))?;
            if seen.contains(&a.ee) {
                return Err(Error::validation(field, "end effector listed twice"));
            }
            seen.push(a.ee.clone());
            let goal = match &randomized {
                Some(r) => ComplianceGoal::diagonal([r.k_ee; 3], r.k_null, r.alpha),
                None => {
                    let k_ee = match a.k_ee {
                        TaskStiffnessSpec::Diagonal(d) => task_stiffness(Some(d), None),
                        TaskStiffnessSpec::Full(m) => task_stiffness(None, Some(m)),
                    }
                    .map_err(|e| Error::validation(format!("{field}.k_ee"), e.to_string()))?;
                    ComplianceGoal::new(k_ee, a.k_null, a.alpha)
                }
            }
            .map_err(|e| Error::validation(field.clone(), e.to_string()))?;
            arms.push(ArmConfig {
                ee: a.ee.clone(),
                goal,
            });
        }
        if c.kind != ControllerKind::Pd && arms.is_empty() {
            return Err(Error::validation(
                "controller.arm",
                "this controller kind needs at least one arm",
            ));
        }

        let k_torso_inv = match c.torso_compliance {
            None => SymmetricMatrix::zeros(6),
            Some(d) if d.iter().all(|v| *v >= 0.0 && v.is_finite()) => {
                SymmetricMatrix::from_diagonal(&d)
            }
            Some(_) => {
                return Err(Error::validation(
                    "controller.torso_compliance",
                    "entries must be >= 0",
                ))
            }
        };

        let defaults = FacetConfig::default();
        let facet = match c.facet {
            None => defaults,
            Some(f) => FacetConfig {
                virtual_mass: f.virtual_mass.unwrap_or(defaults.virtual_mass),
                damping_ratio: f.damping_ratio.unwrap_or(defaults.damping_ratio),
                lambda: f.lambda.unwrap_or(defaults.lambda),
                ik_iterations: f.ik_iterations.unwrap_or(defaults.ik_iterations),
            },
        };
        if !(facet.virtual_mass > 0.0 && facet.damping_ratio > 0.0 && facet.lambda > 0.0) {
            return Err(Error::validation(
                "controller.facet",
                "mass, damping ratio and lambda must be positive",
            ));
        }

        let mut profiles = Vec::new();
        for (i, f) in self.forces.iter().enumerate() {
            chain.end_effector(&f.ee).map_err(|_| {
                Error::validation(
                    format!("force[{i}].ee"),
                    format!("unknown end effector `{}`", f.ee),
                )
            })?;
            let p = ExternalForceProfile::new(
                f.kind,
                &f.ee,
                Vector3::from(f.vector),
                f.start,
                f.duration,
                f.period,
            )
            .map_err(|e| match e {
                Error::Validation { field, rule } => Error::Validation {
                    field: field.replacen("force", &format!("force[{i}]"), 1),
                    rule,
                },
                other => other,
            })?;
            profiles.push(p);
        }

        if let Some(t) = &self.torso {
            if t.v_ref.len() != t.v.len() || t.v.is_empty() {
                return Err(Error::validation(
                    "torso",
                    "v_ref and v must be non-empty and equally long",
                ));
            }
        }
        if !(c.gravity_mismatch.is_finite()) {
            return Err(Error::validation(
                "controller.gravity_mismatch",
                "must be finite",
            ));
        }
        let trace_every = self.output.trace_every.unwrap_or(ctrl_every);
        if trace_every == 0 {
            return Err(Error::validation(
                "output.trace_every",
                "must be at least 1",
            ));
        }

        let mut plant = Plant::new(chain.clone());
        plant.gravity_mismatch = c.gravity_mismatch;
        let mut delay_steps = 0;
        if let Some(r) = &randomized {
            plant.chain = chain.with_mass_scale(r.link_mass_scale);
            plant.model = Some(chain.clone());
            delay_steps = (r.control_delay * 1e-3 / self.dt).round() as usize;
        }

        Ok(Resolved {
            probe: self.probe(&chain)?,
            controller: ControllerConfig {
                kind: c.kind,
                pd,
                fallback: c.fallback,
                k_torso_inv,
                arms,
                facet,
            },
            chain,
            plant,
            profiles,
            n_steps,
            ctrl_every,
            trace_every,
            delay_steps,
            randomized,
        })
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

struct Resolved {
    chain: KinematicChain,
    plant: Plant,
    controller: ControllerConfig,
    profiles: Vec<ExternalForceProfile>,
    probe: String,
    n_steps: usize,
    ctrl_every: usize,
    trace_every: usize,
    delay_steps: usize,
    randomized: Option<RandomizedParams>,
}

/// Per-step records in a fixed column order.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Trace {
    /// `t`, `q_*`, `qd_*`, `tau_*` per joint, then the probe hand position,
    /// its error `reference − actual`, and the force applied to it.
    pub fn columns_for(chain: &KinematicChain) -> Vec<String> {
        let names = chain.joint_names();
        let mut cols = vec!["t".to_string()];
        for prefix in ["q", "qd", "tau"] {
            cols.extend(names.iter().map(|n| format!("{prefix}_{n}")));
        }
        for group in ["ee", "ee_err", "f"] {
            cols.extend(["x", "y", "z"].iter().map(|a| format!("{group}_{a}")));
        }
        cols
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{v}").expect("write to string");
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct SimOutput {
    pub trace: Trace,
    pub metrics: MetricsReport,
    pub randomized: Option<RandomizedParams>,
    pub final_state: SimState,
}

#[derive(Default)]
struct Samples {
    t: Vec<f64>,
    x_des: Vec<Vector3<f64>>,
    x: Vec<Vector3<f64>>,
    x_ref: Vec<Vector3<f64>>,
    q_ref: Vec<JointVector>,
    q: Vec<JointVector>,
    tau: Vec<JointVector>,
}

fn runtime(step: usize, t: f64, e: Error) -> Error {
    match e {
        e @ (Error::NumericalDivergence { .. } | Error::Controller { .. }) => e,
        other => Error::Controller {
            step,
            t,
            source: Box::new(other),
        },
    }
}

/// Simulates a scenario. Deterministic for a given configuration.
pub fn run_scenario(config: &ScenarioConfig) -> Result<SimOutput> {
    let r = config.resolve()?;
    let chain = &r.chain;
    let base = BasePose::identity();
    let q_ref = chain.home();
    let x_des = chain.end_effector_position(&base, &q_ref, &r.probe)?;
    let ctrl_dt = r.ctrl_every as f64 * config.dt;
    let kind = r.controller.kind;
    let mut controller = Controller::new(chain, base, r.controller, q_ref.clone())?;

    let mut state = SimState::at_rest(q_ref.clone());
    let mut cmd = None;
    let mut pending: VecDeque<(usize, _)> = VecDeque::new();
    let mut trace = Trace {
        columns: Trace::columns_for(chain),
        rows: Vec::with_capacity(r.n_steps / r.trace_every + 1),
    };
    let mut samples = Samples::default();
    let mut peak_speed = 0.0f64;

    for k in 0..r.n_steps {
        let t = state.t;
        if k % r.ctrl_every == 0 {
            let f_now = external_forces(&r.profiles, t);
            let new = controller
                .update(chain, &state.q, &f_now, ctrl_dt)
                .map_err(|e| runtime(k, t, e))?;
            if cmd.is_none() || r.delay_steps == 0 {
                cmd = Some(new);
            } else {
                pending.push_back((k + r.delay_steps, new));
            }
        }
        while pending.front().is_some_and(|(at, _)| *at <= k) {
            cmd = pending.pop_front().map(|(_, c)| c);
        }
        let held = cmd.as_ref().expect("command issued at step 0");
        let next = dynamics::step(&r.plant, &state, held, &r.profiles, config.dt)
            .map_err(|e| runtime(k, t, e))?;

        let sample = k % r.ctrl_every == 0;
        if sample || k % r.trace_every == 0 {
            let x = chain.end_effector_position(&base, &state.q, &r.probe)?;
            let f = next
                .f_ext
                .get(&r.probe)
                .copied()
                .unwrap_or_else(Vector3::zeros);
            if k % r.trace_every == 0 {
                let mut row = Vec::with_capacity(trace.columns.len());
                row.push(t);
                row.extend(state.q.iter());
                row.extend(state.qd.iter());
                row.extend(next.last_tau.iter());
                row.extend(x.iter());
                row.extend((x_des - x).iter());
                row.extend(f.iter());
                trace.rows.push(row);
            }
            if sample {
                samples.t.push(t);
                samples.x_des.push(x_des);
                samples.x.push(x);
                if let Some(rs) = controller.reference(&r.probe) {
                    samples.x_ref.push(rs.x_ref);
                }
                samples.q_ref.push(q_ref.clone());
                samples.q.push(state.q.clone());
                samples.tau.push(next.last_tau.clone());
            }
        }
        peak_speed = peak_speed.max(next.qd.norm());
        state = next;
    }

    let steady_from = config.duration - config.steady_window - 1e-9;
    let steady: Vec<usize> = (0..samples.t.len())
        .filter(|&i| samples.t[i] >= steady_from)
        .collect();
    let steady_err: Vec<Vector3<f64>> = steady
        .iter()
        .map(|&i| samples.x_des[i] - samples.x[i])
        .collect();
    let steady_ref_error =
        (kind.uses_reference() && samples.x_ref.len() == samples.t.len()).then(|| {
            mean3(
                &steady
                    .iter()
                    .map(|&i| samples.x_des[i] - samples.x_ref[i])
                    .collect::<Vec<_>>(),
            )
        });
    let e_torso = match &config.torso {
        Some(t) => Some(torso_velocity_error(
            &t.v_ref
                .iter()
                .map(|v| Vector3::from(*v))
                .collect::<Vec<_>>(),
            &t.v.iter().map(|v| Vector3::from(*v)).collect::<Vec<_>>(),
        )?),
        None => None,
    };
    let metrics = MetricsReport {
        e_torso,
        e_ee: ee_tracking_error(&samples.x_des, &samples.x)?,
        j_upper: avg_upper_torque(&samples.tau)?,
        e_upper: upper_tracking_error(&samples.q_ref, &samples.q)?,
        steady_ee_error: mean3(&steady_err),
        steady_ref_error,
        joint_torque_rms: torque_rms(&chain.joint_names(), &samples.tau),
        peak_joint_speed: peak_speed,
        samples: samples.t.len(),
    };
    Ok(SimOutput {
        trace,
        metrics,
        randomized: r.randomized,
        final_state: state,
    })
}

/// The `metrics.json` document.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsDocument<'a> {
    pub schema: &'static str,
    pub scenario: Option<&'a str>,
    pub metrics: &'a MetricsReport,
    pub randomization: Option<&'a RandomizedParams>,
    pub config: &'a ScenarioConfig,
}

impl SimOutput {
    pub fn metrics_json(&self, config: &ScenarioConfig) -> String {
        let doc = MetricsDocument {
            schema: METRICS_SCHEMA,
            scenario: config.name.as_deref(),
            metrics: &self.metrics,
            randomization: self.randomized.as_ref(),
            config,
        };
        serde_json::to_string_pretty(&doc).expect("metrics serialize")
    }

    /// Writes the trace and metrics files into `dir`; returns their paths.
    pub fn write(&self, config: &ScenarioConfig, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        let io = |path: &Path| {
            let path = path.display().to_string();
            move |source| Error::Io { path, source }
        };
        fs::create_dir_all(dir).map_err(io(dir))?;
        let trace = dir.join(&config.output.trace);
        let metrics = dir.join(&config.output.metrics);
        fs::write(&trace, self.trace.to_csv()).map_err(io(&trace))?;
        fs::write(&metrics, self.metrics_json(config) + "\n").map_err(io(&metrics))?;
        Ok((trace, metrics))
    }
}

/// Controller parameters a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepKey {
    KeeX,
    KeeY,
    KeeZ,
    Alpha,
    KNull,
    DampingRatio,
}

impl SweepKey {
    pub const ALL: [SweepKey; 6] = [
        SweepKey::KeeX,
        SweepKey::KeeY,
        SweepKey::KeeZ,
        SweepKey::Alpha,
        SweepKey::KNull,
        SweepKey::DampingRatio,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepKey::KeeX => "k_ee.x",
            SweepKey::KeeY => "k_ee.y",
            SweepKey::KeeZ => "k_ee.z",
            SweepKey::Alpha => "alpha",
            SweepKey::KNull => "k_null",
            SweepKey::DampingRatio => "damping_ratio",
        }
    }

    /// Sets the parameter on every configured arm (or on the controller).
    pub fn apply(self, config: &mut ScenarioConfig, value: f64) -> Result<()> {
        if self == SweepKey::DampingRatio {
            config.controller.damping_ratio = value;
            return Ok(());
        }
        if config.controller.arms.is_empty() {
            return Err(Error::config(
                self.name(),
                "scenario has no [[controller.arm]] to vary",
            ));
        }
        for arm in &mut config.controller.arms {
            let axis = match self {
                SweepKey::KeeX => 0,
                SweepKey::KeeY => 1,
                SweepKey::KeeZ => 2,
                SweepKey::Alpha => {
                    arm.alpha = value;
                    continue;
                }
                SweepKey::KNull => {
                    arm.k_null = value;
                    continue;
                }
                SweepKey::DampingRatio => unreachable!(),
            };
            match &mut arm.k_ee {
                TaskStiffnessSpec::Diagonal(d) => d[axis] = value,
                TaskStiffnessSpec::Full(m) => m[axis][axis] = value,
            }
        }
        Ok(())
    }
}

impl FromStr for SweepKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepKey::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let known: Vec<_> = SweepKey::ALL.iter().map(|k| k.name()).collect();
                Error::config(
                    "vary",
                    format!("unknown key `{s}` (expected one of {})", known.join(", ")),
                )
            })
    }
}

/// Summary row of a sweep variant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub key: Option<String>,
    pub value: Option<f64>,
    pub e_torso: Option<f64>,
    pub e_ee: f64,
    pub j_upper: f64,
    pub e_upper: f64,
    pub steady_err_x: f64,
    pub steady_err_y: f64,
    pub steady_err_z: f64,
}

impl SweepRow {
    pub fn new(key: Option<SweepKey>, value: Option<f64>, m: &MetricsReport) -> Self {
        Self {
            key: key.map(|k| k.name().to_string()),
            value,
            e_torso: m.e_torso,
            e_ee: m.e_ee,
            j_upper: m.j_upper,
            e_upper: m.e_upper,
            steady_err_x: m.steady_ee_error[0],
            steady_err_y: m.steady_ee_error[1],
            steady_err_z: m.steady_ee_error[2],
        }
    }

    pub const CSV_HEADER: &'static str =
        "key,value,e_torso,e_ee,j_upper,e_upper,steady_err_x,steady_err_y,steady_err_z";

    pub fn csv_line(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.key.as_deref().unwrap_or(""),
            opt(self.value),
            opt(self.e_torso),
            self.e_ee,
            self.j_upper,
            self.e_upper,
            self.steady_err_x,
            self.steady_err_y,
            self.steady_err_z
        )
    }
}
