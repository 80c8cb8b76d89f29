//! Re-anchoring of keypoint references to the current torso.
//!
//! A reference keypoint is first expressed in the reference torso frame,
//!
//! ```text
//! p_rel = R⁻¹ (p̃ − p_torso)
//! v_rel = R⁻¹ (ṽ − v_torso) − ω × p_rel
//! ```
//!
//! and then mapped back to the world through the current torso state,
//!
//! ```text
//! p = R p_rel + p_torso
//! v = R (v_rel + ω × p_rel) + v_torso
//! ```
//!
//! The angular velocity `ω` is taken in the torso frame.

use nalgebra::Vector3;

use crate::kinematics::BasePose;

pub fn keypoint_to_torso_relative(
    p_ref_world: &Vector3<f64>,
    v_ref_world: &Vector3<f64>,
    torso_ref: &BasePose,
) -> (Vector3<f64>, Vector3<f64>) {
    let r_inv = torso_ref.orientation.inverse();
    let p_rel = r_inv * (p_ref_world - torso_ref.position);
    let v_rel = r_inv * (v_ref_world - torso_ref.linear_velocity)
        - torso_ref.angular_velocity.cross(&p_rel);
    (p_rel, v_rel)
}

pub fn keypoint_to_world(
    p_rel: &Vector3<f64>,
    v_rel: &Vector3<f64>,
    torso_cur: &BasePose,
) -> (Vector3<f64>, Vector3<f64>) {
    let r = torso_cur.orientation;
    let p = r * p_rel + torso_cur.position;
    let v = r * (v_rel + torso_cur.angular_velocity.cross(p_rel)) + torso_cur.linear_velocity;
    (p, v)
}
