//! Upper-body controllers run at the control rate.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, Vector3};
use serde::{Deserialize, Serialize};

use crate::compliance::{build_modulated_stiffness, ComplianceGoal, PdBaseline, TorqueCommand};
use crate::error::{Error, Result};
use crate::facet::{advance_reference, dls_solve, ik_solve, ImpedanceParams, ReferenceState};
use crate::kinematics::{BasePose, JointVector, KinematicChain};
use crate::spd::{SpdMatrix, SymmetricMatrix, Unit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerKind {
    /// Joint PD around the nominal posture.
    Pd,
    /// Modulated task-space compliance on the configured arms.
    Cotap,
    /// Joint PD tracking an impedance reference through IK.
    Facet,
    /// Modulated compliance tracking the impedance reference.
    CotapFacet,
}

impl ControllerKind {
    pub fn uses_compliance(self) -> bool {
        matches!(self, ControllerKind::Cotap | ControllerKind::CotapFacet)
    }

    pub fn uses_reference(self) -> bool {
        matches!(self, ControllerKind::Facet | ControllerKind::CotapFacet)
    }
}

/// What to do when the compliance solve fails for an arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fallback {
    /// Keep the PD gains on that arm for this update.
    #[default]
    Pd,
    /// Abort the run.
    Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArmConfig {
    pub ee: String,
    pub goal: ComplianceGoal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FacetConfig {
    pub virtual_mass: f64,
    pub damping_ratio: f64,
    pub lambda: f64,
    /// IK iterations per control update.
    pub ik_iterations: usize,
}

impl Default for FacetConfig {
    fn default() -> Self {
        Self {
            virtual_mass: crate::facet::DEFAULT_VIRTUAL_MASS,
            damping_ratio: crate::facet::DEFAULT_REFERENCE_DAMPING_RATIO,
            lambda: crate::facet::DEFAULT_DLS_LAMBDA,
            ik_iterations: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControllerConfig {
    pub kind: ControllerKind,
    pub pd: PdBaseline,
    pub fallback: Fallback,
    /// Torso compliance `K_torso⁻¹` seen by the compliance solve.
    pub k_torso_inv: SymmetricMatrix,
    pub arms: Vec<ArmConfig>,
    pub facet: FacetConfig,
}

#[derive(Debug, Clone)]
struct ArmReference {
    ee: String,
    params: ImpedanceParams,
    x_des: Vector3<f64>,
    state: ReferenceState,
}

/// Stateful controller. [`Controller::update`] is called once per control
/// period; the returned command is held until the next call.
#[derive(Debug, Clone)]
pub struct Controller {
    config: ControllerConfig,
    base: BasePose,
    q_ref: JointVector,
    q_star: JointVector,
    references: Vec<ArmReference>,
    warned: Vec<bool>,
}

impl Controller {
    pub fn new(
        chain: &KinematicChain,
        base: BasePose,
        config: ControllerConfig,
        q_ref: JointVector,
    ) -> Result<Self> {
        if q_ref.len() != chain.dof() || config.pd.kp().dim() != chain.dof() {
            return Err(Error::dims(chain.dof(), q_ref.len()));
        }
        for arm in &config.arms {
            chain.end_effector(&arm.ee)?;
        }
        let mut references = Vec::new();
        if config.kind.uses_reference() {
            for arm in &config.arms {
                let params = ImpedanceParams::with_damping_ratio(
                    arm.goal.k_ee.clone(),
                    config.facet.virtual_mass,
                    config.facet.damping_ratio,
                )?;
                let x_des = chain.end_effector_position(&base, &q_ref, &arm.ee)?;
                references.push(ArmReference {
                    ee: arm.ee.clone(),
                    params,
                    x_des,
                    state: ReferenceState::at_rest(x_des, 0.0),
                });
            }
        }
        let warned = vec![false; config.arms.len()];
        Ok(Self {
            q_star: q_ref.clone(),
            q_ref,
            base,
            config,
            references,
            warned,
        })
    }

    pub fn config(&self) -> &ControllerConfig {
        &self.config
    }

    /// Current impedance reference of `ee`, if one is generated.
    pub fn reference(&self, ee: &str) -> Option<&ReferenceState> {
        self.references
            .iter()
            .find(|r| r.ee == ee)
            .map(|r| &r.state)
    }

    /// Advances the references by `dt` and computes a new command for the
    /// measured state.
    pub fn update(
        &mut self,
        chain: &KinematicChain,
        q: &JointVector,
        f_ext: &BTreeMap<String, Vector3<f64>>,
        dt: f64,
    ) -> Result<TorqueCommand> {
        let n = chain.dof();
        let mut q_target = self.q_ref.clone();
        let mut qd_target = JointVector::zeros(n);

        if self.config.kind.uses_reference() {
            let mut q_star = self.q_star.clone();
            for r in &mut self.references {
                let f = f_ext.get(&r.ee).copied().unwrap_or_else(Vector3::zeros);
                r.state =
                    advance_reference(&r.params, &r.state, &r.x_des, &Vector3::zeros(), &f, dt);
                q_star = ik_solve(
                    chain,
                    &self.base,
                    &q_star,
                    &r.ee,
                    &r.state.x_ref,
                    self.config.facet.lambda,
                    self.config.facet.ik_iterations,
                )?;
                chain.clamp_to_limits(&mut q_star);
            }
            let frames = chain.frames(&self.base, &q_star)?;
            for r in &self.references {
                let jac = chain.ee_jacobian(&frames, &r.ee)?;
                let j = DMatrix::from_fn(3, n, |row, c| jac[(row, c)]);
                qd_target += dls_solve(&j, &r.state.xd_ref, self.config.facet.lambda)?;
            }
            self.q_star = q_star.clone();
            q_target = q_star;
        }

        let mut blocks = Vec::new();
        if self.config.kind.uses_compliance() {
            for (i, arm) in self.config.arms.iter().enumerate() {
                match build_modulated_stiffness(
                    chain,
                    &self.base,
                    q,
                    &arm.ee,
                    &arm.goal,
                    &self.config.pd,
                    &self.config.k_torso_inv,
                ) {
                    Ok(b) => blocks.push(b),
                    Err(e) if self.config.fallback == Fallback::Pd => {
                        if !self.warned[i] {
                            log::warn!("compliance solve failed for `{}`, using PD: {e}", arm.ee);
                            self.warned[i] = true;
                        }
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        TorqueCommand::assemble(&self.config.pd, &blocks, q_target, qd_target)
    }
}

/// Builds a 3×3 task stiffness from either a diagonal or a full matrix.
pub fn task_stiffness(diag: Option<[f64; 3]>, full: Option<[[f64; 3]; 3]>) -> Result<SpdMatrix> {
    match (diag, full) {
        (Some(d), None) => SpdMatrix::from_diagonal(&d, Unit::TranslationalStiffness),
        (None, Some(m)) => SpdMatrix::new(
            DMatrix::from_fn(3, 3, |r, c| m[r][c]),
            Unit::TranslationalStiffness,
        ),
        _ => Err(Error::config(
            "k_ee",
            "give either a diagonal or a full 3x3 matrix",
        )),
    }
}
