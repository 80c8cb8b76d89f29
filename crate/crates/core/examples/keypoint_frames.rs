//! Moves a world keypoint into a rotating torso frame and back.

use cotap::kinematics::BasePose;
use cotap::sim::{keypoint_to_torso_relative, keypoint_to_world};
use nalgebra::{UnitQuaternion, Vector3};

fn main() {
    let torso = BasePose {
        position: Vector3::new(0.1, 0.0, 1.0),
        orientation: UnitQuaternion::from_euler_angles(0.0, 0.0, 0.5),
        linear_velocity: Vector3::new(0.5, 0.0, 0.0),
        angular_velocity: Vector3::new(0.0, 0.0, 0.3),
    };
    let p = Vector3::new(0.4, 0.3, 1.2);
    let v = Vector3::new(0.0, 0.1, 0.0);
    let (p_rel, v_rel) = keypoint_to_torso_relative(&p, &v, &torso);
    let (p_back, v_back) = keypoint_to_world(&p_rel, &v_rel, &torso);
    println!("relative p {p_rel:?} v {v_rel:?}");
    println!(
        "round trip error p {:.3e} v {:.3e}",
        (p_back - p).norm(),
        (v_back - v).norm()
    );
}
