//! Time-averaged tracking and effort metrics.
//!
//! Each metric is `(1/T) Σ_t ‖a_t − b_t‖₂` over `T` equally spaced samples.

use std::collections::BTreeMap;

use nalgebra::{DVector, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn mean_norm<I>(left: usize, right: usize, norms: I) -> Result<f64>
where
    I: Iterator<Item = f64>,
{
    if left != right {
        return Err(Error::LengthMismatch { left, right });
    }
    if left == 0 {
        return Err(Error::EmptyWindow);
    }
    Ok(norms.sum::<f64>() / left as f64)
}

/// Torso linear-velocity tracking error [m/s].
pub fn torso_velocity_error(v_ref: &[Vector3<f64>], v: &[Vector3<f64>]) -> Result<f64> {
    mean_norm(
        v_ref.len(),
        v.len(),
        v_ref.iter().zip(v).map(|(a, b)| (a - b).norm()),
    )
}

/// End-effector position tracking error [m].
pub fn ee_tracking_error(p_ref: &[Vector3<f64>], p: &[Vector3<f64>]) -> Result<f64> {
    mean_norm(
        p_ref.len(),
        p.len(),
        p_ref.iter().zip(p).map(|(a, b)| (a - b).norm()),
    )
}

/// Mean upper-body joint torque norm [Nm].
pub fn avg_upper_torque(tau: &[DVector<f64>]) -> Result<f64> {
    mean_norm(tau.len(), tau.len(), tau.iter().map(|t| t.norm()))
}

/// Upper-body joint tracking error [rad].
pub fn upper_tracking_error(q_ref: &[DVector<f64>], q: &[DVector<f64>]) -> Result<f64> {
    if let Some((a, b)) = q_ref.iter().zip(q).find(|(a, b)| a.len() != b.len()) {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    mean_norm(
        q_ref.len(),
        q.len(),
        q_ref.iter().zip(q).map(|(a, b)| (a - b).norm()),
    )
}

/// Summary of one scenario run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Absent when the scenario scripts no torso trajectory.
    pub e_torso: Option<f64>,
    pub e_ee: f64,
    pub j_upper: f64,
    pub e_upper: f64,
    /// Mean `reference − actual` hand position of the probe end effector over
    /// the steady window [m].
    pub steady_ee_error: [f64; 3],
    /// Mean `x_des − x_ref` of the generated reference over the steady
    /// window, for reference-generating controllers [m].
    pub steady_ref_error: Option<[f64; 3]>,
    /// Per-joint torque RMS over the whole run [Nm].
    pub joint_torque_rms: BTreeMap<String, f64>,
    pub peak_joint_speed: f64,
    pub samples: usize,
}

/// Mean of a window of 3-vectors.
pub(crate) fn mean3(v: &[Vector3<f64>]) -> [f64; 3] {
    if v.is_empty() {
        return [0.0; 3];
    }
    let s: Vector3<f64> = v.iter().sum();
    let m = s / v.len() as f64;
    [m.x, m.y, m.z]
}

/// Root mean square of each joint's torque over a series.
pub(crate) fn torque_rms(names: &[&str], tau: &[DVector<f64>]) -> BTreeMap<String, f64> {
    names
        .iter()
        .enumerate()
        .map(|(i, n)| {
            let ms = tau.iter().map(|t| t[i] * t[i]).sum::<f64>() / tau.len().max(1) as f64;
            (n.to_string(), ms.sqrt())
        })
        .collect()
}
