//! Fixed-base joint-space dynamics.
//!
//! Links are point masses at their COM offsets; each joint adds its
//! armature inertia on the diagonal. Coriolis and centrifugal terms are
//! omitted, so the plant is `M(q) q̈ = τ − τ_g(q) + Σ J_eeᵀ f_ext`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, Vector3};
use serde::{Deserialize, Serialize};

use crate::compliance::TorqueCommand;
use crate::error::{Error, Result};
use crate::kinematics::{BasePose, ChainFrames, JointVector, KinematicChain, GRAVITY};
use crate::spd::{SpdMatrix, Unit};

/// Joint speed beyond which a run is declared divergent [rad/s].
pub const DIVERGENCE_SPEED: f64 = 1e3;
/// Largest accepted physics step [s].
pub const MAX_DT: f64 = 0.005;

const WINDOW_EPS: f64 = 1e-9;

fn mass_matrix_raw(chain: &KinematicChain, frames: &ChainFrames) -> DMatrix<f64> {
    let n = chain.dof();
    let mut m = DMatrix::zeros(n, n);
    for (k, p) in chain.com_positions(frames).iter().enumerate() {
        let mass = chain.links()[k].mass;
        if mass == 0.0 {
            continue;
        }
        let jac = chain.point_jacobian(frames, k, p);
        m += jac.transpose() * &jac * mass;
    }
    for (i, l) in chain.links().iter().enumerate() {
        m[(i, i)] += l.armature;
    }
    (&m + m.transpose()) * 0.5
}

/// Joint-space inertia `Σ m_k J_kᵀ J_k + diag(armature)`.
pub fn mass_matrix(chain: &KinematicChain, q: &JointVector) -> Result<SpdMatrix> {
    let frames = chain.frames(&BasePose::identity(), q)?;
    SpdMatrix::new(mass_matrix_raw(chain, &frames), Unit::Inertia)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForceKind {
    Constant,
    Impulse,
    Sinusoid,
}

/// Scripted force on one end effector.
#[derive(Debug, Clone, PartialEq)]
pub struct ExternalForceProfile {
    pub kind: ForceKind,
    /// Constant force, or the amplitude vector of a sinusoid [N].
    pub vector: Vector3<f64>,
    pub start: f64,
    /// Active window length; `None` keeps the force on until the end.
    pub duration: Option<f64>,
    /// Sinusoid period [s].
    pub period: Option<f64>,
    pub target_ee: String,
}

impl ExternalForceProfile {
    pub fn new(
        kind: ForceKind,
        target_ee: impl Into<String>,
        vector: Vector3<f64>,
        start: f64,
        duration: Option<f64>,
        period: Option<f64>,
    ) -> Result<Self> {
        if !vector.iter().all(|v| v.is_finite()) || !start.is_finite() {
            return Err(Error::validation(
                "force",
                "force vector and start must be finite",
            ));
        }
        if let Some(d) = duration {
            if !(d > 0.0) {
                return Err(Error::validation(
                    "force.duration",
                    "duration must be positive",
                ));
            }
        }
        match kind {
            ForceKind::Impulse if duration.is_none() => {
                return Err(Error::validation(
                    "force.duration",
                    "impulse needs a duration",
                ));
            }
            ForceKind::Sinusoid if !period.is_some_and(|p| p > 0.0) => {
                return Err(Error::validation(
                    "force.period",
                    "sinusoid needs a positive period",
                ));
            }
            _ => {}
        }
        Ok(Self {
            kind,
            vector,
            start,
            duration,
            period,
            target_ee: target_ee.into(),
        })
    }

    pub fn constant(ee: &str, vector: Vector3<f64>, start: f64) -> Self {
        Self::new(ForceKind::Constant, ee, vector, start, None, None).expect("valid constant force")
    }

    pub fn impulse(ee: &str, vector: Vector3<f64>, start: f64, duration: f64) -> Result<Self> {
        Self::new(ForceKind::Impulse, ee, vector, start, Some(duration), None)
    }

    pub fn sinusoid(ee: &str, amplitude: Vector3<f64>, start: f64, period: f64) -> Result<Self> {
        Self::new(
            ForceKind::Sinusoid,
            ee,
            amplitude,
            start,
            None,
            Some(period),
        )
    }

    fn active(&self, t: f64) -> bool {
        t >= self.start - WINDOW_EPS
            && self
                .duration
                .is_none_or(|d| t < self.start + d - WINDOW_EPS)
    }

    pub fn force_at(&self, t: f64) -> Vector3<f64> {
        if !self.active(t) {
            return Vector3::zeros();
        }
        match self.kind {
            ForceKind::Constant | ForceKind::Impulse => self.vector,
            ForceKind::Sinusoid => {
                let period = self.period.expect("validated period");
                self.vector * (std::f64::consts::TAU * (t - self.start) / period).sin()
            }
        }
    }
}

/// Total scripted force on each targeted end effector at time `t`.
pub fn external_forces(
    profiles: &[ExternalForceProfile],
    t: f64,
) -> BTreeMap<String, Vector3<f64>> {
    let mut out = BTreeMap::new();
    for p in profiles {
        *out.entry(p.target_ee.clone())
            .or_insert_with(Vector3::zeros) += p.force_at(t);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    /// Physics steps taken so far.
    pub step: usize,
    pub q: JointVector,
    pub qd: JointVector,
    /// Torque applied during the last step.
    pub last_tau: JointVector,
    /// Force applied during the last step.
    pub f_ext: BTreeMap<String, Vector3<f64>>,
}

impl SimState {
    pub fn at_rest(q: JointVector) -> Self {
        let n = q.len();
        Self {
            t: 0.0,
            step: 0,
            q,
            qd: JointVector::zeros(n),
            last_tau: JointVector::zeros(n),
            f_ext: BTreeMap::new(),
        }
    }
}

/// The simulated robot.
#[derive(Debug, Clone)]
pub struct Plant {
    pub chain: KinematicChain,
    pub base: BasePose,
    /// Model used for the commanded gravity compensation; `None` means the
    /// plant's own chain.
    pub model: Option<KinematicChain>,
    /// Scale on the plant's true gravity load.
    pub gravity_mismatch: f64,
}

impl Plant {
    pub fn new(chain: KinematicChain) -> Self {
        Self {
            chain,
            base: BasePose::identity(),
            model: None,
            gravity_mismatch: 1.0,
        }
    }
}

/// One semi-implicit Euler step of `dt` under the held command.
pub fn step(
    plant: &Plant,
    state: &SimState,
    cmd: &TorqueCommand,
    profiles: &[ExternalForceProfile],
    dt: f64,
) -> Result<SimState> {
    if !(dt > 0.0 && dt <= MAX_DT) {
        return Err(Error::OutOfRange(format!(
            "physics dt {dt} not in (0, {MAX_DT}]"
        )));
    }
    let chain = &plant.chain;
    let frames = chain.frames(&plant.base, &state.q)?;
    let g_plant = chain.gravity_torques_at(&frames, &GRAVITY);
    let g_model = match &plant.model {
        None => g_plant.clone(),
        Some(model) => model.gravity_torques(&plant.base, &state.q, &GRAVITY)?,
    };
    let tau = cmd.torque(&state.q, &state.qd, &g_model)?;

    let f_ext = external_forces(profiles, state.t);
    let mut rhs = &tau - &g_plant * plant.gravity_mismatch;
    for (ee, f) in &f_ext {
        if *f == Vector3::zeros() {
            continue;
        }
        let jac = chain.ee_jacobian(&frames, ee)?;
        rhs += jac.transpose() * f;
    }

    let m = mass_matrix_raw(chain, &frames);
    let qdd = m
        .cholesky()
        .ok_or(Error::NotPositiveDefinite {
            min_eigenvalue: 0.0,
        })?
        .solve(&rhs);

    let mut qd = &state.qd + qdd * dt;
    let next_step = state.step + 1;
    let t = next_step as f64 * dt;
    let speed = qd.norm();
    if !(speed <= DIVERGENCE_SPEED) {
        return Err(Error::NumericalDivergence {
            step: next_step,
            t,
            speed,
        });
    }
    let mut q = &state.q + &qd * dt;
    for i in chain.clamp_to_limits(&mut q) {
        qd[i] = 0.0;
    }
    Ok(SimState {
        t,
        step: next_step,
        q,
        qd,
        last_tau: tau,
        f_ext,
    })
}
