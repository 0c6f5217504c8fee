//! Canonical JSON form of a [`RobotModel`].
//!
//! Matrices are written row-major as nested arrays. Floats are written in
//! shortest round-trip form, so `from_json(to_json(m)) == m` field by field.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::{JointKind, JointSpec, Link, LinkInertia, ModelError, RobotModel};
use crate::spatial::RigidTransform;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub format_version: u32,
    pub name: String,
    pub gravity: [f64; 3],
    pub links: Vec<LinkDocument>,
    pub joints: Vec<JointDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkDocument {
    pub name: String,
    pub inertial: Option<InertialDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InertialDocument {
    pub mass: f64,
    pub com: [f64; 3],
    pub inertia: [[f64; 3]; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDocument {
    pub name: String,
    pub kind: String,
    pub parent: String,
    pub child: String,
    pub axis: [f64; 3],
    pub origin: OriginDocument,
    pub velocity_limit: Option<f64>,
    pub effort_limit: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OriginDocument {
    pub rotation: [[f64; 3]; 3],
    pub translation: [f64; 3],
}

fn rows(m: &Matrix3<f64>) -> [[f64; 3]; 3] {
    [
        [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
        [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
        [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
    ]
}

fn from_rows(r: &[[f64; 3]; 3]) -> Matrix3<f64> {
    Matrix3::new(
        r[0][0], r[0][1], r[0][2], r[1][0], r[1][1], r[1][2], r[2][0], r[2][1], r[2][2],
    )
}

impl From<&RobotModel> for ModelDocument {
    fn from(model: &RobotModel) -> Self {
        ModelDocument {
            format_version: MODEL_FORMAT_VERSION,
            name: model.name.clone(),
            gravity: model.gravity.into(),
            links: model
                .links
                .iter()
                .map(|l| LinkDocument {
                    name: l.name.clone(),
                    inertial: l.inertia.map(|i| InertialDocument {
                        mass: i.mass,
                        com: i.com.into(),
                        inertia: rows(&i.inertia),
                    }),
                })
                .collect(),
            joints: model
                .joints
                .iter()
                .map(|j| JointDocument {
                    name: j.name.clone(),
                    kind: j.kind.as_str().to_string(),
                    parent: j.parent.clone(),
                    child: j.child.clone(),
                    axis: j.axis.into(),
                    origin: OriginDocument {
                        rotation: rows(&j.origin.rotation),
                        translation: j.origin.translation.into(),
                    },
                    velocity_limit: j.velocity_limit,
                    effort_limit: j.effort_limit,
                })
                .collect(),
        }
    }
}

impl TryFrom<ModelDocument> for RobotModel {
    type Error = ModelError;

    fn try_from(doc: ModelDocument) -> Result<Self, ModelError> {
        if doc.format_version != MODEL_FORMAT_VERSION {
            return Err(ModelError::Document(format!(
                "unsupported format_version {}",
                doc.format_version
            )));
        }
        let links = doc
            .links
            .into_iter()
            .map(|l| Link {
                name: l.name,
                inertia: l.inertial.map(|i| LinkInertia {
                    mass: i.mass,
                    com: Vector3::from(i.com),
                    inertia: from_rows(&i.inertia),
                }),
            })
            .collect();
        let joints = doc
            .joints
            .into_iter()
            .map(|j| {
                let kind = JointKind::parse(&j.kind).ok_or_else(|| {
                    ModelError::Document(format!(
                        "joint `{}` has unknown kind `{}`",
                        j.name, j.kind
                    ))
                })?;
                Ok(JointSpec {
                    name: j.name,
                    kind,
                    parent: j.parent,
                    child: j.child,
                    axis: Vector3::from(j.axis),
                    origin: RigidTransform::new(
                        from_rows(&j.origin.rotation),
                        Vector3::from(j.origin.translation),
                    ),
                    velocity_limit: j.velocity_limit,
                    effort_limit: j.effort_limit,
                })
            })
            .collect::<Result<Vec<_>, ModelError>>()?;
        RobotModel::new(doc.name, links, joints, Vector3::from(doc.gravity))
    }
}

impl RobotModel {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ModelDocument::from(self))
            .expect("model document contains only finite numbers")
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let doc: ModelDocument =
            serde_json::from_str(text).map_err(|e| ModelError::Document(e.to_string()))?;
        doc.try_into()
    }
}
