//! Serial-chain kinematics of the upper body.
//!
//! A [`KinematicChain`] is a tree of revolute joints rooted at a base link.
//! Link `i` owns joint `i`; joint vectors are indexed in the chain's
//! topological link order.

mod model;

use std::collections::BTreeMap;

use nalgebra::{
    DMatrix, DVector, Isometry3, Matrix3, Matrix3xX, Point3, Translation3, Unit, UnitQuaternion,
    Vector3,
};

use crate::error::{Error, Result};

pub(crate) use model::toml_error;
pub use model::{h1_upper, load_chain, H1_UPPER_MODEL, MODEL_FORMAT};

/// Joint-space vector (positions in rad, velocities in rad/s or torques in Nm).
pub type JointVector = DVector<f64>;

/// Standard gravity pointing down the world z axis.
pub const GRAVITY: Vector3<f64> = Vector3::new(0.0, 0.0, -9.81);

#[derive(Debug, Clone, PartialEq)]
pub struct LinkSpec {
    pub name: String,
    pub parent: String,
    /// Unit joint axis in the parent frame.
    pub joint_axis: Vector3<f64>,
    /// Joint origin in the parent frame.
    pub origin_offset: Vector3<f64>,
    pub mass: f64,
    /// Point-mass location in the link frame.
    pub com_offset: Vector3<f64>,
    pub joint_limits: (f64, f64),
    /// Reflected rotor inertia about the joint axis.
    pub armature: f64,
    pub home: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EndEffector {
    pub name: String,
    pub link: String,
    pub offset: Vector3<f64>,
}

/// Pose and twist of the torso base.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasePose {
    pub position: Vector3<f64>,
    pub orientation: UnitQuaternion<f64>,
    pub linear_velocity: Vector3<f64>,
    pub angular_velocity: Vector3<f64>,
}

impl Default for BasePose {
    fn default() -> Self {
        Self::identity()
    }
}

impl BasePose {
    pub fn identity() -> Self {
        Self {
            position: Vector3::zeros(),
            orientation: UnitQuaternion::identity(),
            linear_velocity: Vector3::zeros(),
            angular_velocity: Vector3::zeros(),
        }
    }

    /// Builds a pose from a raw `[w, x, y, z]` quaternion, which must be unit norm within 1e-9.
    pub fn from_wxyz(
        position: Vector3<f64>,
        wxyz: [f64; 4],
        linear_velocity: Vector3<f64>,
        angular_velocity: Vector3<f64>,
    ) -> Result<Self> {
        let q = nalgebra::Quaternion::new(wxyz[0], wxyz[1], wxyz[2], wxyz[3]);
        if (q.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::OutOfRange(format!(
                "quaternion norm {} is not 1",
                q.norm()
            )));
        }
        Ok(Self {
            position,
            orientation: UnitQuaternion::new_unchecked(q),
            linear_velocity,
            angular_velocity,
        })
    }

    pub fn isometry(&self) -> Isometry3<f64> {
        Isometry3::from_parts(Translation3::from(self.position), self.orientation)
    }
}

/// World-frame placement of every link for one configuration.
#[derive(Debug, Clone)]
pub struct ChainFrames {
    pub base: Isometry3<f64>,
    pub links: Vec<Isometry3<f64>>,
    /// Joint axes in world coordinates.
    pub axes: Vec<Vector3<f64>>,
    /// Joint origins in world coordinates.
    pub origins: Vec<Vector3<f64>>,
}

#[derive(Debug, Clone)]
pub struct KinematicChain {
    name: String,
    base_link: String,
    links: Vec<LinkSpec>,
    end_effectors: Vec<EndEffector>,
    parents: Vec<Option<usize>>,
    /// `on_path[k][j]`: joint j moves link k.
    on_path: Vec<Vec<bool>>,
}

/// Angle excess beyond the limits at which kinematic queries give up.
const LIMIT_EXCESS: f64 = std::f64::consts::PI;

impl KinematicChain {
    /// Links must be ordered parents-first.
    pub fn new(
        name: String,
        base_link: String,
        links: Vec<LinkSpec>,
        end_effectors: Vec<EndEffector>,
    ) -> Result<Self> {
        let mut parents = Vec::with_capacity(links.len());
        for (i, l) in links.iter().enumerate() {
            if l.parent == base_link {
                parents.push(None);
            } else {
                match links[..i].iter().position(|p| p.name == l.parent) {
                    Some(p) => parents.push(Some(p)),
                    None => {
                        return Err(Error::validation(
                            format!("link.{}.parent", l.name),
                            format!("parent `{}` must precede the link", l.parent),
                        ))
                    }
                }
            }
        }
        for e in &end_effectors {
            if !links.iter().any(|l| l.name == e.link) {
                return Err(Error::UnknownLink(e.link.clone()));
            }
        }
        let mut on_path = Vec::with_capacity(links.len());
        for k in 0..links.len() {
            let mut mask = vec![false; links.len()];
            let mut cur = Some(k);
            while let Some(j) = cur {
                mask[j] = true;
                cur = parents[j];
            }
            on_path.push(mask);
        }
        Ok(Self {
            name,
            base_link,
            links,
            end_effectors,
            parents,
            on_path,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn base_link(&self) -> &str {
        &self.base_link
    }

    pub fn dof(&self) -> usize {
        self.links.len()
    }

    pub fn links(&self) -> &[LinkSpec] {
        &self.links
    }

    pub fn end_effectors(&self) -> &[EndEffector] {
        &self.end_effectors
    }

    pub fn joint_names(&self) -> Vec<&str> {
        self.links.iter().map(|l| l.name.as_str()).collect()
    }

    pub fn link_index(&self, name: &str) -> Result<usize> {
        self.links
            .iter()
            .position(|l| l.name == name)
            .ok_or_else(|| Error::UnknownLink(name.to_string()))
    }

    pub fn end_effector(&self, name: &str) -> Result<(&EndEffector, usize)> {
        let ee = self
            .end_effectors
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| Error::UnknownEndEffector(name.to_string()))?;
        Ok((ee, self.link_index(&ee.link)?))
    }

    /// Joints that move the given end effector, in chain order.
    pub fn path_joints(&self, ee_name: &str) -> Result<Vec<usize>> {
        let (_, link) = self.end_effector(ee_name)?;
        Ok((0..self.dof()).filter(|&j| self.on_path[link][j]).collect())
    }

    pub fn home(&self) -> JointVector {
        DVector::from_iterator(self.dof(), self.links.iter().map(|l| l.home))
    }

    pub fn lower_limits(&self) -> JointVector {
        DVector::from_iterator(self.dof(), self.links.iter().map(|l| l.joint_limits.0))
    }

    pub fn upper_limits(&self) -> JointVector {
        DVector::from_iterator(self.dof(), self.links.iter().map(|l| l.joint_limits.1))
    }

    /// Copy with every link mass multiplied by `scale`.
    pub fn with_mass_scale(&self, scale: f64) -> Self {
        let mut out = self.clone();
        for l in &mut out.links {
            l.mass *= scale;
        }
        out
    }

    /// Clamps `q` into the joint limits; returns the indices that were clamped.
    pub fn clamp_to_limits(&self, q: &mut JointVector) -> Vec<usize> {
        let mut hit = Vec::new();
        for (i, l) in self.links.iter().enumerate() {
            let (lo, hi) = l.joint_limits;
            if q[i] < lo {
                q[i] = lo;
                hit.push(i);
            } else if q[i] > hi {
                q[i] = hi;
                hit.push(i);
            }
        }
        hit
    }

    fn check_configuration(&self, q: &JointVector) -> Result<()> {
        if q.len() != self.dof() {
            return Err(Error::dims(format!("{} joint values", self.dof()), q.len()));
        }
        for (i, l) in self.links.iter().enumerate() {
            let (lo, hi) = l.joint_limits;
            if !q[i].is_finite() || q[i] < lo - LIMIT_EXCESS || q[i] > hi + LIMIT_EXCESS {
                return Err(Error::OutOfRange(format!(
                    "joint `{}` at {} rad is far outside [{lo}, {hi}]",
                    l.name, q[i]
                )));
            }
            if q[i] < lo || q[i] > hi {
                log::warn!(
                    "joint `{}` at {:.4} rad outside limits [{lo}, {hi}]",
                    l.name,
                    q[i]
                );
            }
        }
        Ok(())
    }

    /// World placement of all links and joint axes.
    pub fn frames(&self, base: &BasePose, q: &JointVector) -> Result<ChainFrames> {
        self.check_configuration(q)?;
        let base_iso = base.isometry();
        let n = self.dof();
        let mut links = Vec::with_capacity(n);
        let mut axes = Vec::with_capacity(n);
        let mut origins = Vec::with_capacity(n);
        for (i, l) in self.links.iter().enumerate() {
            let parent = match self.parents[i] {
                Some(p) => links[p],
                None => base_iso,
            };
            let joint_frame = parent * Translation3::from(l.origin_offset);
            let rot = UnitQuaternion::from_axis_angle(&Unit::new_unchecked(l.joint_axis), q[i]);
            links.push(joint_frame * rot);
            axes.push(parent.rotation * l.joint_axis);
            origins.push(joint_frame.translation.vector);
        }
        Ok(ChainFrames {
            base: base_iso,
            links,
            axes,
            origins,
        })
    }

    /// Link name to world frame, including the base link.
    pub fn forward_kinematics(
        &self,
        base: &BasePose,
        q: &JointVector,
    ) -> Result<BTreeMap<String, Isometry3<f64>>> {
        let frames = self.frames(base, q)?;
        let mut out = BTreeMap::new();
        out.insert(self.base_link.clone(), frames.base);
        for (l, f) in self.links.iter().zip(frames.links) {
            out.insert(l.name.clone(), f);
        }
        Ok(out)
    }

    pub fn ee_position(&self, frames: &ChainFrames, ee_name: &str) -> Result<Vector3<f64>> {
        let (ee, link) = self.end_effector(ee_name)?;
        Ok(frames.links[link]
            .transform_point(&Point3::from(ee.offset))
            .coords)
    }

    pub fn end_effector_position(
        &self,
        base: &BasePose,
        q: &JointVector,
        ee_name: &str,
    ) -> Result<Vector3<f64>> {
        let frames = self.frames(base, q)?;
        self.ee_position(&frames, ee_name)
    }

    /// 3×n Jacobian of a world point rigidly attached to `link`.
    pub fn point_jacobian(
        &self,
        frames: &ChainFrames,
        link: usize,
        point: &Vector3<f64>,
    ) -> Matrix3xX<f64> {
        let mut jac = Matrix3xX::zeros(self.dof());
        for j in 0..self.dof() {
            if self.on_path[link][j] {
                jac.set_column(j, &frames.axes[j].cross(&(point - frames.origins[j])));
            }
        }
        jac
    }

    /// Position Jacobian of an end effector over the chain joints (3×n).
    pub fn position_jacobian(
        &self,
        base: &BasePose,
        q: &JointVector,
        ee_name: &str,
    ) -> Result<Matrix3xX<f64>> {
        let frames = self.frames(base, q)?;
        self.ee_jacobian(&frames, ee_name)
    }

    pub fn ee_jacobian(&self, frames: &ChainFrames, ee_name: &str) -> Result<Matrix3xX<f64>> {
        let (_, link) = self.end_effector(ee_name)?;
        let p = self.ee_position(frames, ee_name)?;
        Ok(self.point_jacobian(frames, link, &p))
    }

    /// Jacobian including the six base twist columns `[v_base, ω_base]`
    /// ahead of the joint columns: 3×(6+n).
    pub fn floating_base_jacobian(
        &self,
        base: &BasePose,
        q: &JointVector,
        ee_name: &str,
    ) -> Result<DMatrix<f64>> {
        let frames = self.frames(base, q)?;
        let p = self.ee_position(&frames, ee_name)?;
        let joint = self.ee_jacobian(&frames, ee_name)?;
        let n = self.dof();
        let mut jac = DMatrix::zeros(3, 6 + n);
        jac.fixed_view_mut::<3, 3>(0, 0)
            .copy_from(&Matrix3::identity());
        let r = p - base.position;
        jac.fixed_view_mut::<3, 3>(0, 3)
            .copy_from(&(-r.cross_matrix()));
        jac.view_mut((0, 6), (3, n)).copy_from(&joint);
        Ok(jac)
    }

    /// World positions of every link's point mass.
    pub fn com_positions(&self, frames: &ChainFrames) -> Vec<Vector3<f64>> {
        self.links
            .iter()
            .zip(&frames.links)
            .map(|(l, f)| f.transform_point(&Point3::from(l.com_offset)).coords)
            .collect()
    }

    /// Gravity compensation torque: the joint torque that holds the chain
    /// static against `g`, `τ = −Σ m_k J_kᵀ g`.
    pub fn gravity_torques(
        &self,
        base: &BasePose,
        q: &JointVector,
        g: &Vector3<f64>,
    ) -> Result<JointVector> {
        let frames = self.frames(base, q)?;
        Ok(self.gravity_torques_at(&frames, g))
    }

    pub fn gravity_torques_at(&self, frames: &ChainFrames, g: &Vector3<f64>) -> JointVector {
        let mut tau = DVector::zeros(self.dof());
        for (k, p) in self.com_positions(frames).iter().enumerate() {
            let m = self.links[k].mass;
            if m == 0.0 {
                continue;
            }
            let jac = self.point_jacobian(frames, k, p);
            tau -= jac.transpose() * (g * m);
        }
        tau
    }
}

/// Splits `[J_eb | J_eu]` into the six base columns and the `n_upper` joint columns.
pub fn split_jacobian(jac: &DMatrix<f64>, n_upper: usize) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if jac.ncols() != 6 + n_upper {
        return Err(Error::dims(format!("{} columns", 6 + n_upper), jac.ncols()));
    }
    let base = jac.columns(0, 6).into_owned();
    let upper = jac.columns(6, n_upper).into_owned();
    Ok((base, upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    fn planar_link(length: f64, mass: f64) -> KinematicChain {
        KinematicChain::new(
            "planar".into(),
            "base".into(),
            vec![LinkSpec {
                name: "l1".into(),
                parent: "base".into(),
                joint_axis: Vector3::z(),
                origin_offset: Vector3::zeros(),
                mass,
                com_offset: Vector3::new(length / 2.0, 0.0, 0.0),
                joint_limits: (-3.0, 3.0),
                armature: 0.0,
                home: 0.0,
            }],
            vec![EndEffector {
                name: "tip".into(),
                link: "l1".into(),
                offset: Vector3::new(length, 0.0, 0.0),
            }],
        )
        .unwrap()
    }

    fn random_q(rng: &mut impl Rng, chain: &KinematicChain) -> JointVector {
        DVector::from_iterator(
            chain.dof(),
            chain
                .links()
                .iter()
                .map(|l| rng.random_range(l.joint_limits.0..l.joint_limits.1)),
        )
    }

    #[test]
    fn planar_link_rotated_quarter_turn() {
        let chain = planar_link(0.5, 1.0);
        let q = DVector::from_vec(vec![FRAC_PI_2]);
        let tip = chain
            .end_effector_position(&BasePose::identity(), &q, "tip")
            .unwrap();
        assert!((tip - Vector3::new(0.0, 0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_pose_reads_model_constants() {
        let chain = h1_upper();
        let q = DVector::zeros(chain.dof());
        let p = chain
            .end_effector_position(&BasePose::identity(), &q, "left_hand")
            .unwrap();
        // shoulder at (0, 0.2, 0.4), arm hanging 0.30 + 0.28 m
        assert!((p - Vector3::new(0.0, 0.2, 0.4 - 0.58)).norm() < 1e-15);
        let fk = chain.forward_kinematics(&BasePose::identity(), &q).unwrap();
        assert_eq!(fk["torso"], Isometry3::identity());
    }

    #[test]
    fn fk_matches_per_link_transform_product() {
        let chain = h1_upper();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let base = BasePose {
            position: Vector3::new(0.1, -0.2, 0.9),
            orientation: UnitQuaternion::from_euler_angles(0.1, -0.2, 0.3),
            ..BasePose::identity()
        };
        for _ in 0..20 {
            let q = random_q(&mut rng, &chain);
            let fk = chain.forward_kinematics(&base, &q).unwrap();
            for (k, l) in chain.links().iter().enumerate() {
                // walk to the root and compose homogeneous matrices root-first
                let mut path = vec![k];
                let mut cur = k;
                while let Some(p) = chain
                    .links()
                    .iter()
                    .position(|c| c.name == chain.links()[cur].parent)
                {
                    path.push(p);
                    cur = p;
                }
                let mut h = base.isometry().to_homogeneous();
                for &j in path.iter().rev() {
                    let lj = &chain.links()[j];
                    let t = nalgebra::Matrix4::new_translation(&lj.origin_offset);
                    let r = nalgebra::Rotation3::from_axis_angle(
                        &Unit::new_normalize(lj.joint_axis),
                        q[j],
                    )
                    .to_homogeneous();
                    h = h * t * r;
                }
                let diff = (fk[&l.name].to_homogeneous() - h).abs().max();
                assert!(diff < 1e-12, "link {} differs by {diff}", l.name);
            }
        }
    }

    #[test]
    fn single_joint_jacobian_column() {
        let chain = planar_link(0.7, 0.0);
        let j = chain
            .position_jacobian(&BasePose::identity(), &DVector::zeros(1), "tip")
            .unwrap();
        assert!((j.column(0) - Vector3::new(0.0, 0.7, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn off_path_joints_have_zero_columns() {
        let chain = h1_upper();
        let j = chain
            .position_jacobian(&BasePose::identity(), &chain.home(), "left_hand")
            .unwrap();
        for col in 4..8 {
            assert_eq!(j.column(col).norm(), 0.0);
        }
        assert!(j.column(0).norm() > 0.1);
        assert_eq!(chain.path_joints("left_hand").unwrap(), vec![0, 1, 2, 3]);
        assert!(matches!(
            chain.position_jacobian(&BasePose::identity(), &chain.home(), "nose"),
            Err(Error::UnknownEndEffector(_))
        ));
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let chain = h1_upper();
        let base = BasePose::identity();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = 1e-6;
        for _ in 0..25 {
            let q = random_q(&mut rng, &chain);
            for ee in ["left_hand", "right_hand"] {
                let j = chain.position_jacobian(&base, &q, ee).unwrap();
                for i in 0..chain.dof() {
                    let mut qp = q.clone();
                    let mut qm = q.clone();
                    qp[i] += h;
                    qm[i] -= h;
                    let fd = (chain.end_effector_position(&base, &qp, ee).unwrap()
                        - chain.end_effector_position(&base, &qm, ee).unwrap())
                        / (2.0 * h);
                    assert!((j.column(i) - fd).amax() < 1e-5);
                }
            }
        }
    }

    #[test]
    fn split_round_trip_and_shapes() {
        let chain = h1_upper();
        let base = BasePose {
            position: Vector3::new(0.0, 0.0, 1.0),
            ..BasePose::identity()
        };
        let j = chain
            .floating_base_jacobian(&base, &chain.home(), "left_hand")
            .unwrap();
        let (jb, ju) = split_jacobian(&j, 8).unwrap();
        assert_eq!((jb.nrows(), jb.ncols()), (3, 6));
        assert_eq!((ju.nrows(), ju.ncols()), (3, 8));
        let mut cat = DMatrix::zeros(3, 14);
        cat.columns_mut(0, 6).copy_from(&jb);
        cat.columns_mut(6, 8).copy_from(&ju);
        assert_eq!(cat, j);
        assert!(split_jacobian(&j, 7).is_err());

        let mut fixed = j.clone();
        fixed.columns_mut(0, 6).fill(0.0);
        let (jb0, _) = split_jacobian(&fixed, 8).unwrap();
        assert_eq!(jb0, DMatrix::zeros(3, 6));
    }

    #[test]
    fn base_columns_match_rigid_base_motion() {
        let chain = h1_upper();
        let base = BasePose::identity();
        let q = chain.home();
        let j = chain
            .floating_base_jacobian(&base, &q, "left_hand")
            .unwrap();
        let h = 1e-6;
        for axis in 0..3 {
            let mut w = Vector3::zeros();
            w[axis] = h;
            let rot = |s: f64| BasePose {
                orientation: UnitQuaternion::from_scaled_axis(w * s),
                ..base
            };
            let fd = (chain
                .end_effector_position(&rot(1.0), &q, "left_hand")
                .unwrap()
                - chain
                    .end_effector_position(&rot(-1.0), &q, "left_hand")
                    .unwrap())
                / (2.0 * h);
            assert!((j.column(3 + axis) - fd).amax() < 1e-8);
        }
    }

    #[test]
    fn gravity_examples() {
        let chain = planar_link(0.6, 2.0);
        let base = BasePose::identity();
        let q = DVector::zeros(1);
        let zero = chain.gravity_torques(&base, &q, &Vector3::zeros()).unwrap();
        assert_eq!(zero[0], 0.0);
        // joint axis horizontal so gravity produces a moment
        let mut horiz = chain.clone();
        horiz.links[0].joint_axis = Vector3::y();
        let tau = horiz.gravity_torques(&base, &q, &GRAVITY).unwrap();
        assert!((tau[0].abs() - 2.0 * 9.81 * 0.3).abs() < 1e-12);
    }

    #[test]
    fn gravity_matches_potential_energy_gradient() {
        let chain = h1_upper();
        let base = BasePose::identity();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let potential = |q: &JointVector| -> f64 {
            let frames = chain.frames(&base, q).unwrap();
            chain
                .com_positions(&frames)
                .iter()
                .zip(chain.links())
                .map(|(p, l)| -l.mass * GRAVITY.dot(p))
                .sum()
        };
        let h = 1e-6;
        for _ in 0..25 {
            let q = random_q(&mut rng, &chain);
            let tau = chain.gravity_torques(&base, &q, &GRAVITY).unwrap();
            for i in 0..chain.dof() {
                let mut qp = q.clone();
                let mut qm = q.clone();
                qp[i] += h;
                qm[i] -= h;
                let d_u = (potential(&qp) - potential(&qm)) / (2.0 * h);
                assert!((tau[i] - d_u).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn dummy_link_leaves_frames_unchanged() {
        let chain = h1_upper();
        let mut links = chain.links().to_vec();
        let dummy = LinkSpec {
            name: "dummy".into(),
            parent: "torso".into(),
            joint_axis: Vector3::x(),
            origin_offset: Vector3::zeros(),
            mass: 0.0,
            com_offset: Vector3::zeros(),
            joint_limits: (-1.0, 1.0),
            armature: 0.0,
            home: 0.0,
        };
        links[0].parent = "dummy".into();
        links.insert(0, dummy);
        let padded = KinematicChain::new(
            "p".into(),
            "torso".into(),
            links,
            chain.end_effectors().to_vec(),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let q = random_q(&mut rng, &chain);
        let mut qp = DVector::zeros(9);
        qp.rows_mut(1, 8).copy_from(&q);
        let a = chain.forward_kinematics(&BasePose::identity(), &q).unwrap();
        let b = padded
            .forward_kinematics(&BasePose::identity(), &qp)
            .unwrap();
        for (name, f) in &a {
            assert!((f.to_homogeneous() - b[name].to_homogeneous()).amax() < 1e-15);
        }
    }

    #[test]
    fn far_out_of_range_is_rejected() {
        let chain = h1_upper();
        let mut q = chain.home();
        q[0] = 10.0;
        assert!(matches!(
            chain.frames(&BasePose::identity(), &q),
            Err(Error::OutOfRange(_))
        ));
        q[0] = 3.0; // slightly beyond, warns only
        assert!(chain.frames(&BasePose::identity(), &q).is_ok());
    }

    #[test]
    fn quaternion_norm_checked() {
        assert!(BasePose::from_wxyz(
            Vector3::zeros(),
            [1.0, 0.1, 0.0, 0.0],
            Vector3::zeros(),
            Vector3::zeros()
        )
        .is_err());
        assert!(BasePose::from_wxyz(
            Vector3::zeros(),
            [1.0, 0.0, 0.0, 0.0],
            Vector3::zeros(),
            Vector3::zeros()
        )
        .is_ok());
    }
}
