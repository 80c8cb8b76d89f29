//! Task-space to joint-space compliance mapping and stiffness modulation.
//!
//! Under the quasi-static assumption the end-effector compliance seen
//! through a joint stiffness `K_q` is `C_e = J_e K_q⁻¹ J_eᵀ`. Splitting
//! `J_e = [J_eb | J_eu]` into torso-base and upper-body columns, the upper
//! joints must realize `Ĉ_e = C_e − J_eb K_torso⁻¹ J_ebᵀ`. The joint
//! compliance
//!
//! ```text
//! K_u⁻¹ = J♯ Ĉ_e J♯ᵀ + Y − J♯ J Y Jᵀ J♯ᵀ,   Y = I / k_null
//! ```
//!
//! (with `J♯` the Moore–Penrose right inverse of `J_eu`) reproduces `Ĉ_e`
//! exactly in task space and leaves `1/k_null` compliance in the null space.
//! The resulting `K_comp` is blended with a joint PD baseline on the SPD
//! manifold, using a modulation ratio shrunk near singular postures.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kinematics::{split_jacobian, BasePose, JointVector, KinematicChain};
use crate::spd::{
    condition_number, log_euclidean_interpolate, map_eigenvalues, regularize_alpha,
    ModulationRatio, SpdMatrix, SymmetricMatrix, Unit,
};

/// Per-end-effector compliance goal.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplianceGoal {
    /// Task-space stiffness, 3×3 N/m.
    pub k_ee: SpdMatrix,
    /// Null-space stiffness, Nm/rad.
    pub k_null: f64,
    /// Modulation ratio between compliance control (1) and PD (0).
    pub alpha: f64,
}

impl ComplianceGoal {
    pub fn new(k_ee: SpdMatrix, k_null: f64, alpha: f64) -> Result<Self> {
        if !(k_null > 0.0) || !k_null.is_finite() {
            return Err(Error::OutOfRange(format!(
                "k_null = {k_null} must be positive"
            )));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::OutOfRange(format!("alpha = {alpha} not in [0, 1]")));
        }
        Ok(Self {
            k_ee,
            k_null,
            alpha,
        })
    }

    /// Diagonal task stiffness `diag(kx, ky, kz)`.
    pub fn diagonal(k: [f64; 3], k_null: f64, alpha: f64) -> Result<Self> {
        Self::new(
            SpdMatrix::from_diagonal(&k, Unit::TranslationalStiffness)?,
            k_null,
            alpha,
        )
    }
}

/// Joint PD baseline: diagonal proportional gains for every chain joint.
#[derive(Debug, Clone, PartialEq)]
pub struct PdBaseline {
    kp: SpdMatrix,
    damping_ratio: f64,
}

impl PdBaseline {
    pub fn new(kp: &[f64], damping_ratio: f64) -> Result<Self> {
        if kp.iter().any(|k| !(*k > 0.0)) {
            return Err(Error::OutOfRange("PD gains must be positive".into()));
        }
        if !(damping_ratio > 0.0) {
            return Err(Error::OutOfRange(format!(
                "damping ratio {damping_ratio} must be positive"
            )));
        }
        Ok(Self {
            kp: SpdMatrix::from_diagonal(kp, Unit::RotationalStiffness)?,
            damping_ratio,
        })
    }

    pub fn uniform(dof: usize, kp: f64, damping_ratio: f64) -> Result<Self> {
        Self::new(&vec![kp; dof], damping_ratio)
    }

    pub fn kp(&self) -> &SpdMatrix {
        &self.kp
    }

    pub fn damping_ratio(&self) -> f64 {
        self.damping_ratio
    }

    /// Gains restricted to a subset of joints.
    pub fn block(&self, joints: &[usize]) -> SpdMatrix {
        SpdMatrix::from_trusted(
            select_block(self.kp.matrix(), joints),
            Unit::RotationalStiffness,
        )
    }
}

fn select_block(m: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), idx.len(), |r, c| m[(idx[r], idx[c])])
}

fn is_diagonal(m: &DMatrix<f64>) -> bool {
    (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)] == 0.0))
}

/// Principal square root of an SPD matrix.
pub fn sqrt_spd(k: &SpdMatrix) -> Result<SpdMatrix> {
    let m = k.matrix();
    if is_diagonal(m) {
        if let Some(bad) = m.diagonal().iter().find(|d| !(**d > crate::spd::EPS_SPD)) {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue: *bad,
            });
        }
        return Ok(SpdMatrix::from_trusted(
            DMatrix::from_diagonal(&m.diagonal().map(f64::sqrt)),
            k.unit(),
        ));
    }
    let min = crate::spd::min_eigenvalue(m);
    if min <= crate::spd::EPS_SPD {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: min,
        });
    }
    Ok(SpdMatrix::from_trusted(
        map_eigenvalues(m, f64::sqrt),
        k.unit(),
    ))
}

/// Damping synthesized from stiffness: `D = 2ζ √K`.
pub fn damping_from_stiffness(k: &SpdMatrix, damping_ratio: f64) -> Result<SpdMatrix> {
    let root = sqrt_spd(k)?;
    Ok(SpdMatrix::from_trusted(
        root.into_matrix() * (2.0 * damping_ratio),
        Unit::Damping,
    ))
}

fn ensure_full_row_rank(j: &DMatrix<f64>) -> Result<()> {
    if j.nrows() > j.ncols() {
        return Err(Error::RankDeficient {
            condition_number: f64::INFINITY,
        });
    }
    let cond = condition_number(j)?;
    if cond.is_infinite() {
        return Err(Error::RankDeficient {
            condition_number: cond,
        });
    }
    Ok(())
}

/// `C_e = J K_q⁻¹ Jᵀ` for a full-row-rank task Jacobian.
pub fn task_compliance_from_joint(j: &DMatrix<f64>, k_q: &SpdMatrix) -> Result<SpdMatrix> {
    if j.ncols() != k_q.dim() {
        return Err(Error::dims(
            format!("{} Jacobian columns", k_q.dim()),
            j.ncols(),
        ));
    }
    ensure_full_row_rank(j)?;
    let chol = k_q
        .matrix()
        .clone()
        .cholesky()
        .ok_or(Error::NotPositiveDefinite {
            min_eigenvalue: 0.0,
        })?;
    let c = j * chol.solve(&j.transpose());
    SpdMatrix::new((&c + c.transpose()) * 0.5, k_q.unit().inverse())
}

/// `Ĉ_e = C_e − J_eb K_torso⁻¹ J_ebᵀ`. The result may be indefinite when the
/// torso is more compliant than the goal; callers check definiteness.
pub fn effective_task_compliance(
    c_e: &SpdMatrix,
    j_eb: &DMatrix<f64>,
    k_torso_inv: &SymmetricMatrix,
) -> Result<SymmetricMatrix> {
    if j_eb.nrows() != c_e.dim() || j_eb.ncols() != k_torso_inv.dim() {
        return Err(Error::dims(
            format!("{}x{}", c_e.dim(), k_torso_inv.dim()),
            format!("{}x{}", j_eb.nrows(), j_eb.ncols()),
        ));
    }
    let torso = j_eb * k_torso_inv.matrix() * j_eb.transpose();
    let c = c_e.matrix() - (&torso + torso.transpose()) * 0.5;
    SymmetricMatrix::new(c)
}

/// Moore–Penrose right inverse `Jᵀ (J Jᵀ)⁻¹` of a full-row-rank matrix.
pub fn right_pseudo_inverse(j: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    ensure_full_row_rank(j)?;
    let gram = j * j.transpose();
    let chol = gram.cholesky().ok_or(Error::RankDeficient {
        condition_number: f64::INFINITY,
    })?;
    Ok(chol.solve(j).transpose())
}

/// Upper-body joint compliance `K_u⁻¹` (rad/Nm) realizing `Ĉ_e` with null-space stiffness `k_null`.
pub fn solve_upper_joint_compliance(
    j_eu: &DMatrix<f64>,
    c_hat: &SpdMatrix,
    k_null: f64,
) -> Result<SpdMatrix> {
    if !(k_null > 0.0) {
        return Err(Error::OutOfRange(format!(
            "k_null = {k_null} must be positive"
        )));
    }
    if j_eu.nrows() != c_hat.dim() {
        return Err(Error::dims(
            format!("{} Jacobian rows", c_hat.dim()),
            j_eu.nrows(),
        ));
    }
    let n = j_eu.ncols();
    let pinv = right_pseudo_inverse(j_eu)?;
    let y = DMatrix::<f64>::identity(n, n) / k_null;
    let task = &pinv * c_hat.matrix() * pinv.transpose();
    let proj = &pinv * j_eu;
    let removed = &proj * &y * proj.transpose();
    let k_inv = task + &y - removed;
    SpdMatrix::new(
        (&k_inv + k_inv.transpose()) * 0.5,
        Unit::RotationalCompliance,
    )
}

/// Stiffness and damping for the joints driving one end effector.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulatedStiffness {
    pub end_effector: String,
    /// Chain indices of the joints the blocks refer to.
    pub joints: Vec<usize>,
    pub stiffness: SpdMatrix,
    pub damping: SpdMatrix,
    pub alpha: ModulationRatio,
    pub condition_number: f64,
    /// Solved compliance-control stiffness, absent when α̂ = 0 skipped the solve.
    pub k_comp: Option<SpdMatrix>,
}

/// Full compliance pipeline for one end effector:
/// Jacobian → split → condition number → α̂ → `C_e = K_ee⁻¹` → `Ĉ_e` →
/// `K_u⁻¹` → `K_comp` → Log-Euclidean blend with the PD gains → `D = 2ζ√K`.
pub fn build_modulated_stiffness(
    chain: &KinematicChain,
    base: &BasePose,
    q: &JointVector,
    ee_name: &str,
    goal: &ComplianceGoal,
    pd: &PdBaseline,
    k_torso_inv: &SymmetricMatrix,
) -> Result<ModulatedStiffness> {
    if pd.kp.dim() != chain.dof() {
        return Err(Error::dims(
            format!("{} PD gains", chain.dof()),
            pd.kp.dim(),
        ));
    }
    let joints = chain.path_joints(ee_name)?;
    let j_e = chain.floating_base_jacobian(base, q, ee_name)?;
    let (j_eb, j_upper) = split_jacobian(&j_e, chain.dof())?;
    let j_eu = j_upper.select_columns(&joints);

    let cond = condition_number(&j_eu)?;
    let alpha = regularize_alpha(goal.alpha, cond);
    let kp_block = pd.block(&joints);

    let (stiffness, k_comp) = if alpha.processed == 0.0 {
        (kp_block, None)
    } else {
        let c_e = goal.k_ee.inverse();
        let c_hat = effective_task_compliance(&c_e, &j_eb, k_torso_inv)?
            .to_spd(Unit::TranslationalCompliance)?;
        let k_u_inv = solve_upper_joint_compliance(&j_eu, &c_hat, goal.k_null)?;
        let k_comp = k_u_inv.inverse();
        let blended = log_euclidean_interpolate(&k_comp, &kp_block, alpha.processed)?;
        (blended, Some(k_comp))
    };
    let damping = damping_from_stiffness(&stiffness, pd.damping_ratio)?;
    Ok(ModulatedStiffness {
        end_effector: ee_name.to_string(),
        joints,
        stiffness,
        damping,
        alpha,
        condition_number: cond,
        k_comp,
    })
}

/// `τ = τ_grav + K (q* − q) + D (q̇* − q̇)`.
pub fn joint_torque(
    stiffness: &DMatrix<f64>,
    damping: &DMatrix<f64>,
    q_target: &JointVector,
    q: &JointVector,
    qd_target: &JointVector,
    qd: &JointVector,
    tau_grav: &JointVector,
) -> Result<JointVector> {
    let n = q.len();
    let ok = stiffness.shape() == (n, n)
        && damping.shape() == (n, n)
        && q_target.len() == n
        && qd_target.len() == n
        && qd.len() == n
        && tau_grav.len() == n;
    if !ok {
        return Err(Error::dims(
            format!("{n}-joint operands"),
            "nonconforming operands",
        ));
    }
    Ok(tau_grav + stiffness * (q_target - q) + damping * (qd_target - qd))
}

/// Whole-chain joint impedance held between controller updates.
#[derive(Debug, Clone, PartialEq)]
pub struct TorqueCommand {
    pub stiffness: SpdMatrix,
    pub damping: SpdMatrix,
    pub q_target: JointVector,
    pub qd_target: JointVector,
    /// Processed modulation ratio per compliance-controlled end effector.
    pub alpha_processed: Vec<(String, f64)>,
}

impl TorqueCommand {
    /// Pure PD on every joint.
    pub fn pd(pd: &PdBaseline, q_target: JointVector, qd_target: JointVector) -> Result<Self> {
        Self::assemble(pd, &[], q_target, qd_target)
    }

    /// PD gains everywhere except the joint blocks owned by `arms`.
    pub fn assemble(
        pd: &PdBaseline,
        arms: &[ModulatedStiffness],
        q_target: JointVector,
        qd_target: JointVector,
    ) -> Result<Self> {
        let n = pd.kp.dim();
        if q_target.len() != n || qd_target.len() != n {
            return Err(Error::dims(format!("{n} joint targets"), q_target.len()));
        }
        let mut k = pd.kp.matrix().clone();
        let mut d = damping_from_stiffness(&pd.kp, pd.damping_ratio)?.into_matrix();
        let mut owned = vec![false; n];
        for arm in arms {
            for &j in &arm.joints {
                if owned[j] {
                    return Err(Error::config(
                        format!("controller.arm.{}", arm.end_effector),
                        "joint shared by two compliance-controlled end effectors",
                    ));
                }
                owned[j] = true;
            }
            for (r, &jr) in arm.joints.iter().enumerate() {
                for (c, &jc) in arm.joints.iter().enumerate() {
                    k[(jr, jc)] = arm.stiffness.matrix()[(r, c)];
                    d[(jr, jc)] = arm.damping.matrix()[(r, c)];
                }
            }
        }
        Ok(Self {
            stiffness: SpdMatrix::from_trusted(k, Unit::RotationalStiffness),
            damping: SpdMatrix::from_trusted(d, Unit::Damping),
            q_target,
            qd_target,
            alpha_processed: arms
                .iter()
                .map(|a| (a.end_effector.clone(), a.alpha.processed))
                .collect(),
        })
    }

    pub fn torque(
        &self,
        q: &JointVector,
        qd: &JointVector,
        tau_grav: &JointVector,
    ) -> Result<JointVector> {
        joint_torque(
            self.stiffness.matrix(),
            self.damping.matrix(),
            &self.q_target,
            q,
            &self.qd_target,
            qd,
            tau_grav,
        )
    }
}

/// Zero torso compliance (rigid torso) for a six-column base block.
pub fn rigid_torso() -> SymmetricMatrix {
    SymmetricMatrix::zeros(6)
}

/// Diagonal torso compliance.
pub fn torso_compliance(diag: &[f64; 6]) -> SymmetricMatrix {
    SymmetricMatrix::from_diagonal(diag)
}
