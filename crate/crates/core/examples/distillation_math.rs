//! Distillation loss, reward terms and a randomized parameter draw.

use cotap::training::{
    beta_schedule, distill_loss, gaussian_kl, keypoint_reward, observation_dim,
    ref_closeness_reward, sample_randomization, DiagonalGaussian, ACTOR_OBSERVATION,
    CRITIC_EXTRA_OBSERVATION, DEFAULT_SIGMA_REF,
};
use nalgebra::{DVector, Vector3};

fn main() -> cotap::Result<()> {
    let teacher = DiagonalGaussian::from_slices(&[0.1, -0.2, 0.3], &[0.5, 0.4, 0.6])?;
    let student = DiagonalGaussian::from_slices(&[0.0, 0.0, 0.2], &[0.6, 0.6, 0.6])?;
    let kl = gaussian_kl(&teacher, &student)?;
    for step in [0, 1000, 5000] {
        let beta = beta_schedule(step, 1.0, 5000);
        println!(
            "step {step:5}: beta {beta:.3}, loss {:.5}",
            distill_loss(0.8, kl, beta)
        );
    }

    let a = DVector::from_vec(vec![0.1, 0.0, -0.1]);
    let q_ref = DVector::from_vec(vec![0.0, 0.0, 0.0]);
    println!(
        "ref reward {:.5}",
        ref_closeness_reward(&a, &q_ref, DEFAULT_SIGMA_REF)?
    );
    let kp = [Vector3::new(0.3, 0.2, 1.1)];
    let kp_ref = [Vector3::new(0.31, 0.2, 1.1)];
    println!("keypoint reward {:.5}", keypoint_reward(&kp, &kp_ref)?);

    println!(
        "actor obs {} dims, critic extra {} dims",
        observation_dim(&ACTOR_OBSERVATION),
        observation_dim(&CRITIC_EXTRA_OBSERVATION)
    );
    println!("{:#?}", sample_randomization(7));
    Ok(())
}
