//! Closed-form pieces of policy training: the distillation objective,
//! reward terms, domain-randomization sampling and observation scaling.

use nalgebra::{DVector, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::JointVector;

/// Diagonal Gaussian action distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalGaussian {
    mean: DVector<f64>,
    std: DVector<f64>,
}

impl DiagonalGaussian {
    pub fn new(mean: DVector<f64>, std: DVector<f64>) -> Result<Self> {
        if mean.len() != std.len() {
            return Err(Error::dims(mean.len(), std.len()));
        }
        if std.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
            return Err(Error::OutOfRange(
                "standard deviations must be positive".into(),
            ));
        }
        Ok(Self { mean, std })
    }

    pub fn from_slices(mean: &[f64], std: &[f64]) -> Result<Self> {
        Self::new(
            DVector::from_column_slice(mean),
            DVector::from_column_slice(std),
        )
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn std(&self) -> &DVector<f64> {
        &self.std
    }
}

/// `KL(p ‖ q) = Σ ln(σ_q/σ_p) + (σ_p² + (μ_p − μ_q)²) / (2σ_q²) − ½`.
pub fn gaussian_kl(p: &DiagonalGaussian, q: &DiagonalGaussian) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::dims(p.dim(), q.dim()));
    }
    let mut kl = 0.0;
    for i in 0..p.dim() {
        let (sp, sq) = (p.std[i], q.std[i]);
        let dm = p.mean[i] - q.mean[i];
        kl += (sq / sp).ln() + (sp * sp + dm * dm) / (2.0 * sq * sq) - 0.5;
    }
    Ok(kl.max(0.0))
}

/// `L = L_PPO + β_KL · KL`. Requires `beta_kl ≥ 0`.
pub fn distill_loss(l_ppo: f64, kl: f64, beta_kl: f64) -> f64 {
    assert!(beta_kl >= 0.0, "beta_kl must be non-negative");
    l_ppo + beta_kl * kl
}

/// Linear decay `max(0, β₀ (1 − step / decay_steps))`.
pub fn beta_schedule(step: u64, beta0: f64, decay_steps: u64) -> f64 {
    assert!(decay_steps > 0, "decay_steps must be positive");
    (beta0 * (1.0 - step as f64 / decay_steps as f64)).max(0.0)
}

pub const DEFAULT_SIGMA_REF: f64 = 1.0;

/// `exp(−σ_ref ‖a − q_ref‖₂)`.
pub fn ref_closeness_reward(
    action: &JointVector,
    q_ref: &JointVector,
    sigma_ref: f64,
) -> Result<f64> {
    if action.len() != q_ref.len() {
        return Err(Error::dims(q_ref.len(), action.len()));
    }
    if !(sigma_ref > 0.0) {
        return Err(Error::OutOfRange(format!(
            "sigma_ref = {sigma_ref} must be positive"
        )));
    }
    Ok((-sigma_ref * (action - q_ref).norm()).exp())
}

/// Length scale of the keypoint reward [m²].
pub const KEYPOINT_REWARD_SCALE: f64 = 0.01;

/// `exp(−‖p − p_ref‖² / 0.01)` over the stacked keypoints.
pub fn keypoint_reward(p: &[Vector3<f64>], p_ref: &[Vector3<f64>]) -> Result<f64> {
    if p.len() != p_ref.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: p_ref.len(),
        });
    }
    let sq: f64 = p
        .iter()
        .zip(p_ref)
        .map(|(a, b)| (a - b).norm_squared())
        .sum();
    Ok((-sq / KEYPOINT_REWARD_SCALE).exp())
}

/// Closed interval `[lo, hi]` sampled uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    fn sample(&self, rng: &mut impl Rng) -> f64 {
        rng.random_range(self.lo..=self.hi)
    }
}

/// Randomization ranges, already multiplied out where they scale a default.
pub mod ranges {
    use super::Interval;

    pub const FRICTION: Interval = Interval::new(0.5, 1.25);
    pub const LINK_MASS_SCALE: Interval = Interval::new(0.9, 1.2);
    /// kg added to the base.
    pub const BASE_MASS_DELTA: Interval = Interval::new(-1.0, 3.0);
    /// ms
    pub const CONTROL_DELAY: Interval = Interval::new(0.0, 20.0);
    pub const P_GAIN_SCALE: Interval = Interval::new(0.9, 1.1);
    pub const D_GAIN_SCALE: Interval = Interval::new(0.9, 1.1);
    /// `U(0.5, 1.5) × 300` N/m
    pub const K_EE: Interval = Interval::new(0.5 * 300.0, 1.5 * 300.0);
    /// `U(0.6, 1.4) × 40` Nm/rad
    pub const K_NULL: Interval = Interval::new(0.6 * 40.0, 1.4 * 40.0);
    pub const ALPHA: Interval = Interval::new(0.0, 1.0);
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomizedParams {
    pub friction: f64,
    pub link_mass_scale: f64,
    pub base_mass_delta: f64,
    /// ms
    pub control_delay: f64,
    pub p_gain_scale: f64,
    pub d_gain_scale: f64,
    pub k_ee: f64,
    pub k_null: f64,
    pub alpha: f64,
}

impl RandomizedParams {
    pub fn in_range(&self) -> bool {
        use ranges::*;
        FRICTION.contains(self.friction)
            && LINK_MASS_SCALE.contains(self.link_mass_scale)
            && BASE_MASS_DELTA.contains(self.base_mass_delta)
            && CONTROL_DELAY.contains(self.control_delay)
            && P_GAIN_SCALE.contains(self.p_gain_scale)
            && D_GAIN_SCALE.contains(self.d_gain_scale)
            && K_EE.contains(self.k_ee)
            && K_NULL.contains(self.k_null)
            && ALPHA.contains(self.alpha)
    }
}

/// Draws one parameter set from `rng`.
pub fn sample_randomization_with(rng: &mut impl Rng) -> RandomizedParams {
    use ranges::*;
    RandomizedParams {
        friction: FRICTION.sample(rng),
        link_mass_scale: LINK_MASS_SCALE.sample(rng),
        base_mass_delta: BASE_MASS_DELTA.sample(rng),
        control_delay: CONTROL_DELAY.sample(rng),
        p_gain_scale: P_GAIN_SCALE.sample(rng),
        d_gain_scale: D_GAIN_SCALE.sample(rng),
        k_ee: K_EE.sample(rng),
        k_null: K_NULL.sample(rng),
        alpha: ALPHA.sample(rng),
    }
}

/// Deterministic parameter set for `seed`.
pub fn sample_randomization(seed: u64) -> RandomizedParams {
    sample_randomization_with(&mut ChaCha8Rng::seed_from_u64(seed))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservationGroup {
    Actor,
    /// Privileged terms seen only by the critic, on top of the actor terms.
    Critic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObservationTerm {
    pub name: &'static str,
    pub dims: usize,
    pub scale: f64,
    pub group: ObservationGroup,
}

const fn actor(name: &'static str, dims: usize, scale: f64) -> ObservationTerm {
    ObservationTerm {
        name,
        dims,
        scale,
        group: ObservationGroup::Actor,
    }
}

const fn critic(name: &'static str, dims: usize, scale: f64) -> ObservationTerm {
    ObservationTerm {
        name,
        dims,
        scale,
        group: ObservationGroup::Critic,
    }
}

pub const ACTOR_OBSERVATION: [ObservationTerm; 13] = [
    actor("torso_angular_velocity", 3, 0.25),
    actor("projected_gravity", 3, 1.0),
    actor("command_linear_velocity", 2, 1.0),
    actor("command_angular_velocity", 1, 1.0),
    actor("command_stand", 1, 1.0),
    actor("command_torso_height", 1, 2.0),
    actor("reference_upper_dof_position", 8, 1.0),
    actor("whole_body_dof_position", 19, 1.0),
    actor("whole_body_dof_velocity", 19, 0.05),
    actor("actions", 19, 1.0),
    actor("sin_phase", 1, 1.0),
    actor("cos_phase", 1, 1.0),
    actor("upper_joint_torque", 8, 1.0),
];

pub const CRITIC_EXTRA_OBSERVATION: [ObservationTerm; 4] = [
    critic("torso_orientation", 4, 1.0),
    critic("torso_linear_velocity", 3, 2.0),
    critic("left_ee_force", 3, 0.1),
    critic("right_ee_force", 3, 0.1),
];

pub fn observation_dim(terms: &[ObservationTerm]) -> usize {
    terms.iter().map(|t| t.dims).sum()
}

/// Multiplies each slice of `raw` by its term's scale.
pub fn scale_observation(terms: &[ObservationTerm], raw: &[f64]) -> Result<Vec<f64>> {
    let n = observation_dim(terms);
    if raw.len() != n {
        return Err(Error::LengthMismatch {
            left: raw.len(),
            right: n,
        });
    }
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    for t in terms {
        out.extend(raw[i..i + t.dims].iter().map(|v| v * t.scale));
        i += t.dims;
    }
    Ok(out)
}
