//! Solves the joint stiffness that realizes a task-space stiffness on the
//! left hand and checks the reconstruction.

use cotap::compliance::{
    build_modulated_stiffness, rigid_torso, task_compliance_from_joint, ComplianceGoal, PdBaseline,
};
use cotap::kinematics::{h1_upper, BasePose};
use nalgebra::DMatrix;

fn main() -> cotap::Result<()> {
    let chain = h1_upper();
    let base = BasePose::identity();
    let q = chain.home();
    let pd = PdBaseline::uniform(chain.dof(), 100.0, 1.0)?;
    let goal = ComplianceGoal::diagonal([300.0, 500.0, 800.0], 25.0, 1.0)?;

    let m = build_modulated_stiffness(&chain, &base, &q, "left_hand", &goal, &pd, &rigid_torso())?;
    println!(
        "joints {:?}, cond {:.3}, alpha {:?}",
        m.joints, m.condition_number, m.alpha
    );
    println!("K_u = {}", m.stiffness.matrix());

    let jac = chain.position_jacobian(&base, &q, "left_hand")?;
    let j = DMatrix::from_fn(3, m.joints.len(), |r, c| jac[(r, m.joints[c])]);
    let c_task = task_compliance_from_joint(&j, &m.stiffness)?;
    let k_task = c_task.inverse();
    println!("realized task stiffness = {}", k_task.matrix());
    Ok(())
}
