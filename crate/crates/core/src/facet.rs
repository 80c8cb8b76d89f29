//! Impedance-based task-space reference generation.
//!
//! A virtual spring-mass-damper attached to the desired hand position is
//! driven by the external end-effector force. Integrating it yields a
//! compliant reference `x_ref`, which an online damped-least-squares IK step
//! converts into joint targets.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use crate::compliance::sqrt_spd;
use crate::error::{Error, Result};
use crate::kinematics::{BasePose, JointVector, KinematicChain};
use crate::spd::{SpdMatrix, Unit};

pub const DEFAULT_VIRTUAL_MASS: f64 = 2.0;
pub const DEFAULT_REFERENCE_DAMPING_RATIO: f64 = 0.9;
pub const DEFAULT_DLS_LAMBDA: f64 = 0.05;
/// Largest joint-space step a single IK update may take [rad].
pub const IK_STEP_CLAMP: f64 = 0.2;

#[derive(Debug, Clone, PartialEq)]
pub struct ImpedanceParams {
    /// Task stiffness, N/m.
    pub k_e: SpdMatrix,
    /// Task damping, Ns/m.
    pub d_e: SpdMatrix,
    pub virtual_mass: f64,
}

impl ImpedanceParams {
    pub fn new(k_e: SpdMatrix, d_e: SpdMatrix, virtual_mass: f64) -> Result<Self> {
        if k_e.dim() != 3 || d_e.dim() != 3 {
            return Err(Error::dims(
                "3x3",
                format!(
                    "{}x{} and {}x{}",
                    k_e.dim(),
                    k_e.dim(),
                    d_e.dim(),
                    d_e.dim()
                ),
            ));
        }
        if !(virtual_mass > 0.0) || !virtual_mass.is_finite() {
            return Err(Error::OutOfRange(format!(
                "virtual mass {virtual_mass} must be positive"
            )));
        }
        Ok(Self {
            k_e,
            d_e,
            virtual_mass,
        })
    }

    /// Damping `D_e = 2ζ √(m K_e)`.
    pub fn with_damping_ratio(
        k_e: SpdMatrix,
        virtual_mass: f64,
        damping_ratio: f64,
    ) -> Result<Self> {
        if !(virtual_mass > 0.0) {
            return Err(Error::OutOfRange(format!(
                "virtual mass {virtual_mass} must be positive"
            )));
        }
        let mk = SpdMatrix::new(k_e.matrix() * virtual_mass, k_e.unit())?;
        let root = sqrt_spd(&mk)?.into_matrix();
        let d_e = SpdMatrix::new(root * (2.0 * damping_ratio), Unit::Damping)?;
        Self::new(k_e, d_e, virtual_mass)
    }

    /// Diagonal stiffness with the default mass and damping ratio.
    pub fn diagonal(k: [f64; 3]) -> Result<Self> {
        Self::with_damping_ratio(
            SpdMatrix::from_diagonal(&k, Unit::TranslationalStiffness)?,
            DEFAULT_VIRTUAL_MASS,
            DEFAULT_REFERENCE_DAMPING_RATIO,
        )
    }

    fn k3(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|r, c| self.k_e.matrix()[(r, c)])
    }

    fn d3(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|r, c| self.d_e.matrix()[(r, c)])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceState {
    pub x_ref: Vector3<f64>,
    pub xd_ref: Vector3<f64>,
    pub t: f64,
}

impl ReferenceState {
    pub fn at_rest(x: Vector3<f64>, t: f64) -> Self {
        Self {
            x_ref: x,
            xd_ref: Vector3::zeros(),
            t,
        }
    }
}

/// `f = K_e (x_des − x) + D_e (ẋ_des − ẋ)`.
pub fn impedance_force(
    p: &ImpedanceParams,
    x_des: &Vector3<f64>,
    x: &Vector3<f64>,
    xd_des: &Vector3<f64>,
    xd: &Vector3<f64>,
) -> Vector3<f64> {
    p.k3() * (x_des - x) + p.d3() * (xd_des - xd)
}

pub fn reference_acceleration(
    f_spring: &Vector3<f64>,
    f_ee: &Vector3<f64>,
    virtual_mass: f64,
) -> Vector3<f64> {
    (f_spring + f_ee) / virtual_mass
}

/// Semi-implicit Euler: velocity first, then position with the new velocity.
pub fn integrate_reference(
    state: &ReferenceState,
    xdd_ref: &Vector3<f64>,
    dt: f64,
) -> ReferenceState {
    let xd_ref = state.xd_ref + xdd_ref * dt;
    ReferenceState {
        x_ref: state.x_ref + xd_ref * dt,
        xd_ref,
        t: state.t + dt,
    }
}

/// One reference update: spring force on the reference state, plus the
/// external force, integrated over `dt`.
pub fn advance_reference(
    p: &ImpedanceParams,
    state: &ReferenceState,
    x_des: &Vector3<f64>,
    xd_des: &Vector3<f64>,
    f_ee: &Vector3<f64>,
    dt: f64,
) -> ReferenceState {
    let f = impedance_force(p, x_des, &state.x_ref, xd_des, &state.xd_ref);
    integrate_reference(state, &reference_acceleration(&f, f_ee, p.virtual_mass), dt)
}

/// Damped least squares `Jᵀ(JJᵀ + λ²I)⁻¹ e` for a 3-row task Jacobian.
pub fn dls_solve(j: &DMatrix<f64>, e: &Vector3<f64>, lambda_dls: f64) -> Result<DVector<f64>> {
    let a = j * j.transpose() + DMatrix::identity(3, 3) * (lambda_dls * lambda_dls);
    let y = a
        .cholesky()
        .ok_or(Error::NotPositiveDefinite {
            min_eigenvalue: 0.0,
        })?
        .solve(&DVector::from_column_slice(e.as_slice()));
    Ok(j.transpose() * y)
}

/// Damped-least-squares step `q + Jᵀ(JJᵀ + λ²I)⁻¹ e`, with `‖Δq‖` clamped
/// to [`IK_STEP_CLAMP`].
pub fn ik_step(
    chain: &KinematicChain,
    base: &BasePose,
    q: &JointVector,
    ee_name: &str,
    x_ref: &Vector3<f64>,
    lambda_dls: f64,
) -> Result<JointVector> {
    let frames = chain.frames(base, q)?;
    let x = chain.ee_position(&frames, ee_name)?;
    let jac = chain.ee_jacobian(&frames, ee_name)?;
    let j = DMatrix::from_fn(3, jac.ncols(), |r, c| jac[(r, c)]);
    let mut dq = dls_solve(&j, &(x_ref - x), lambda_dls)?;
    let norm = dq.norm();
    if norm > IK_STEP_CLAMP {
        dq *= IK_STEP_CLAMP / norm;
    }
    Ok(q + dq)
}

/// Repeated [`ik_step`] from `q0`.
pub fn ik_solve(
    chain: &KinematicChain,
    base: &BasePose,
    q0: &JointVector,
    ee_name: &str,
    x_ref: &Vector3<f64>,
    lambda_dls: f64,
    iterations: usize,
) -> Result<JointVector> {
    let mut q = q0.clone();
    for _ in 0..iterations {
        q = ik_step(chain, base, &q, ee_name, x_ref, lambda_dls)?;
    }
    Ok(q)
}

/// `(1/M) Σ exp(−‖ẋ_ref − ẋ_ee‖² − ‖x_ref − x_ee‖²)` over a reference window.
pub fn facet_tracking_reward(
    x_ref_window: &[Vector3<f64>],
    xd_ref_window: &[Vector3<f64>],
    x_ee: &Vector3<f64>,
    xd_ee: &Vector3<f64>,
) -> Result<f64> {
    if x_ref_window.is_empty() {
        return Err(Error::EmptyWindow);
    }
    if x_ref_window.len() != xd_ref_window.len() {
        return Err(Error::LengthMismatch {
            left: x_ref_window.len(),
            right: xd_ref_window.len(),
        });
    }
    let sum: f64 = x_ref_window
        .iter()
        .zip(xd_ref_window)
        .map(|(x, xd)| (-(xd - xd_ee).norm_squared() - (x - x_ee).norm_squared()).exp())
        .sum();
    Ok(sum / x_ref_window.len() as f64)
}
