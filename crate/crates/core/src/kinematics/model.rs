//! Robot model file format (`cotap-model/1`).
//!
//! ```toml
//! format = "cotap-model/1"
//! name = "h1-upper"
//! base_link = "torso"
//!
//! [[link]]
//! name = "left_shoulder_pitch"
//! parent = "torso"
//! axis = [0.0, 1.0, 0.0]     # unit vector, parent frame
//! origin = [0.0, 0.2, 0.4]   # joint origin in the parent frame [m]
//! mass = 0.0                 # [kg]
//! com = [0.0, 0.0, 0.0]      # point-mass location in the link frame [m]
//! limits = [-2.87, 2.87]     # [rad]
//! armature = 0.02            # optional rotor inertia [kg m^2], default 0
//! home = 0.0                 # optional nominal joint angle [rad], default 0
//!
//! [[end_effector]]
//! name = "left_hand"
//! link = "left_elbow"
//! offset = [0.0, 0.0, -0.28]
//! ```
//!
//! Every link carries one revolute joint connecting it to its parent. Unknown
//! fields are rejected.

use std::collections::HashSet;

use nalgebra::Vector3;
use serde::Deserialize;

use super::{EndEffector, KinematicChain, LinkSpec};
use crate::error::{Error, Result};

pub const MODEL_FORMAT: &str = "cotap-model/1";

/// Text of the bundled simplified H1 upper body.
pub const H1_UPPER_MODEL: &str = include_str!("../../models/h1_upper.toml");

const AXIS_TOL: f64 = 1e-9;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    format: String,
    #[serde(default)]
    name: Option<String>,
    base_link: String,
    #[serde(rename = "link", default)]
    links: Vec<LinkRecord>,
    #[serde(rename = "end_effector", default)]
    end_effectors: Vec<EndEffectorRecord>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinkRecord {
    name: String,
    parent: String,
    axis: [f64; 3],
    origin: [f64; 3],
    mass: f64,
    com: [f64; 3],
    limits: [f64; 2],
    #[serde(default)]
    armature: f64,
    #[serde(default)]
    home: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EndEffectorRecord {
    name: String,
    link: String,
    offset: [f64; 3],
}

pub(crate) fn line_col(text: &str, offset: usize) -> String {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, str::len) + 1;
    format!("line {line}, column {col}")
}

pub(crate) fn toml_error(text: &str, err: toml::de::Error) -> Error {
    Error::Parse {
        message: err.message().to_string(),
        location: err.span().map(|s| line_col(text, s.start)),
    }
}

fn vec3(v: [f64; 3]) -> Vector3<f64> {
    Vector3::new(v[0], v[1], v[2])
}

/// Parses and validates a model description.
pub fn load_chain(model_text: &str) -> Result<KinematicChain> {
    let file: ModelFile = toml::from_str(model_text).map_err(|e| toml_error(model_text, e))?;
    if file.format != MODEL_FORMAT {
        return Err(Error::validation(
            "format",
            format!("expected \"{MODEL_FORMAT}\", found \"{}\"", file.format),
        ));
    }

    let mut seen = HashSet::new();
    seen.insert(file.base_link.clone());
    for l in &file.links {
        if !seen.insert(l.name.clone()) {
            return Err(Error::validation(
                format!("link.{}", l.name),
                "duplicate link name",
            ));
        }
    }

    // Topological order: place each link after its parent.
    let mut placed: Vec<usize> = Vec::with_capacity(file.links.len());
    let mut known: HashSet<&str> = HashSet::from([file.base_link.as_str()]);
    while placed.len() < file.links.len() {
        let before = placed.len();
        for (i, l) in file.links.iter().enumerate() {
            if !placed.contains(&i) && known.contains(l.parent.as_str()) {
                placed.push(i);
                known.insert(l.name.as_str());
            }
        }
        if placed.len() == before {
            let orphan = file
                .links
                .iter()
                .enumerate()
                .find(|(i, _)| !placed.contains(i))
                .map(|(_, l)| l)
                .expect("unplaced link exists");
            let rule = if seen.contains(&orphan.parent) {
                format!("parent `{}` is part of a cycle", orphan.parent)
            } else {
                format!("parent `{}` does not exist", orphan.parent)
            };
            return Err(Error::validation(
                format!("link.{}.parent", orphan.name),
                rule,
            ));
        }
    }

    let mut links = Vec::with_capacity(file.links.len());
    for &i in &placed {
        let r = &file.links[i];
        let field = |f: &str| format!("link.{}.{f}", r.name);
        let axis = vec3(r.axis);
        if (axis.norm() - 1.0).abs() > AXIS_TOL {
            return Err(Error::validation(
                field("axis"),
                format!("joint axis must be a unit vector (norm {})", axis.norm()),
            ));
        }
        if !(r.mass >= 0.0) {
            return Err(Error::validation(
                field("mass"),
                format!("mass must be >= 0 (got {})", r.mass),
            ));
        }
        if !(r.armature >= 0.0) {
            return Err(Error::validation(
                field("armature"),
                "armature must be >= 0",
            ));
        }
        if !(r.limits[0] < r.limits[1]) {
            return Err(Error::validation(
                field("limits"),
                "lower limit must be below upper limit",
            ));
        }
        if r.home < r.limits[0] || r.home > r.limits[1] {
            return Err(Error::validation(
                field("home"),
                "home angle outside joint limits",
            ));
        }
        links.push(LinkSpec {
            name: r.name.clone(),
            parent: r.parent.clone(),
            joint_axis: axis,
            origin_offset: vec3(r.origin),
            mass: r.mass,
            com_offset: vec3(r.com),
            joint_limits: (r.limits[0], r.limits[1]),
            armature: r.armature,
            home: r.home,
        });
    }

    let mut ee_names = HashSet::new();
    let mut end_effectors = Vec::new();
    for e in &file.end_effectors {
        if !ee_names.insert(e.name.clone()) {
            return Err(Error::validation(
                format!("end_effector.{}", e.name),
                "duplicate end effector",
            ));
        }
        if !links.iter().any(|l| l.name == e.link) {
            return Err(Error::validation(
                format!("end_effector.{}.link", e.name),
                format!("link `{}` does not exist", e.link),
            ));
        }
        end_effectors.push(EndEffector {
            name: e.name.clone(),
            link: e.link.clone(),
            offset: vec3(e.offset),
        });
    }

    KinematicChain::new(
        file.name.unwrap_or_else(|| "unnamed".into()),
        file.base_link,
        links,
        end_effectors,
    )
}

/// The bundled simplified H1 upper body (two 4-DOF arms on a fixed torso).
pub fn h1_upper() -> KinematicChain {
    load_chain(H1_UPPER_MODEL).expect("bundled model is valid")
}
