//! Compliance modulation for humanoid upper bodies.
//!
//! Task-space stiffness goals are mapped to joint stiffness through the arm
//! Jacobian and blended with a joint PD baseline on the SPD manifold. The
//! crate also ships an impedance reference generator, a fixed-base
//! simulator with scenario files, and the math used around policy training.

pub mod cli;
pub mod compliance;
pub mod error;
pub mod facet;
pub mod kinematics;
pub mod sim;
pub mod spd;
pub mod training;

pub use error::{Error, Result};
