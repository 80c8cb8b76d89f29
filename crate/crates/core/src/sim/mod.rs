//! Upper-body simulation: dynamics, controllers, scenarios and metrics.

pub mod controller;
pub mod dynamics;
pub mod keypoints;
pub mod metrics;
pub mod scenario;

pub use controller::{
    ArmConfig, Controller, ControllerConfig, ControllerKind, FacetConfig, Fallback,
};
pub use dynamics::{mass_matrix, step, ExternalForceProfile, ForceKind, Plant, SimState};
pub use keypoints::{keypoint_to_torso_relative, keypoint_to_world};
pub use metrics::{
    avg_upper_torque, ee_tracking_error, torso_velocity_error, upper_tracking_error, MetricsReport,
};
pub use scenario::{run_scenario, ScenarioConfig, SimOutput, SweepKey, SweepRow, Trace};
