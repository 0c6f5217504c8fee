//! URDF subset reader.
//!
//! Supported: `<link>` with an optional `<inertial>` block and `<joint>` of
//! kind revolute, continuous, prismatic or fixed. Visual, collision,
//! transmission, material and gazebo elements are skipped.

use nalgebra::{Matrix3, Vector3};
use roxmltree::{Document, Node};

use super::{
    Diagnostic, JointKind, JointSpec, Link, LinkInertia, ModelError, RobotModel, DEFAULT_GRAVITY,
};
use crate::spatial::RigidTransform;

pub fn parse_urdf(text: &str) -> Result<RobotModel, ModelError> {
    parse_urdf_with_diagnostics(text).map(|(model, _)| model)
}

/// Parse and also return notes about repairs made while reading, such as
/// joint axes that had to be normalized.
pub fn parse_urdf_with_diagnostics(
    text: &str,
) -> Result<(RobotModel, Vec<Diagnostic>), ModelError> {
    let doc = Document::parse(text).map_err(|e| {
        let pos = e.pos();
        ModelError::Xml {
            line: pos.row,
            column: pos.col,
            message: e.to_string(),
        }
    })?;
    let reader = Reader { doc: &doc };
    let robot = doc.root_element();
    if robot.tag_name().name() != "robot" {
        return Err(ModelError::NotARobot {
            line: reader.line(robot),
            found: robot.tag_name().name().to_string(),
        });
    }
    let name = robot.attribute("name").unwrap_or("robot").to_string();

    let mut notes = Vec::new();
    let mut links = Vec::new();
    let mut joints = Vec::new();
    for node in robot.children().filter(Node::is_element) {
        match node.tag_name().name() {
            "link" => links.push(reader.link(node)?),
            "joint" => joints.push(reader.joint(node, &mut notes)?),
            _ => {}
        }
    }
    let model = RobotModel::new(name, links, joints, Vector3::from(DEFAULT_GRAVITY))?;
    Ok((model, notes))
}

struct Reader<'a, 'input> {
    doc: &'a Document<'input>,
}

impl Reader<'_, '_> {
    fn line(&self, node: Node) -> u32 {
        self.doc.text_pos_at(node.range().start).row
    }

    fn required_attr<'n>(
        &self,
        node: Node<'n, '_>,
        attribute: &str,
    ) -> Result<&'n str, ModelError> {
        node.attribute(attribute)
            .ok_or_else(|| ModelError::MissingAttribute {
                element: node.tag_name().name().to_string(),
                attribute: attribute.to_string(),
                line: self.line(node),
            })
    }

    fn number(&self, node: Node, attribute: &str, raw: &str) -> Result<f64, ModelError> {
        raw.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| ModelError::InvalidNumber {
                element: node.tag_name().name().to_string(),
                attribute: attribute.to_string(),
                value: raw.to_string(),
                line: self.line(node),
            })
    }

    fn vec3(&self, node: Node, attribute: &str, default: [f64; 3]) -> Result<[f64; 3], ModelError> {
        let Some(raw) = node.attribute(attribute) else {
            return Ok(default);
        };
        let parts: Vec<&str> = raw.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(ModelError::InvalidNumber {
                element: node.tag_name().name().to_string(),
                attribute: attribute.to_string(),
                value: raw.to_string(),
                line: self.line(node),
            });
        }
        let mut out = [0.0; 3];
        for (slot, part) in out.iter_mut().zip(parts) {
            *slot = self.number(node, attribute, part)?;
        }
        Ok(out)
    }

    fn origin(&self, parent: Node) -> Result<RigidTransform, ModelError> {
        match child(parent, "origin") {
            None => Ok(RigidTransform::identity()),
            Some(o) => Ok(RigidTransform::from_xyz_rpy(
                self.vec3(o, "xyz", [0.0; 3])?,
                self.vec3(o, "rpy", [0.0; 3])?,
            )),
        }
    }

    fn link(&self, node: Node) -> Result<Link, ModelError> {
        let name = self.required_attr(node, "name")?.to_string();
        let inertia = match child(node, "inertial") {
            None => None,
            Some(inertial) => {
                let frame = self.origin(inertial)?;
                let mass_node =
                    child(inertial, "mass").ok_or_else(|| ModelError::MissingElement {
                        element: "inertial".into(),
                        child: "mass".into(),
                        line: self.line(inertial),
                    })?;
                let mass =
                    self.number(mass_node, "value", self.required_attr(mass_node, "value")?)?;
                if mass < 0.0 {
                    return Err(ModelError::NegativeMass { link: name, mass });
                }
                let tensor = match child(inertial, "inertia") {
                    None => Matrix3::zeros(),
                    Some(i) => {
                        let get = |a: &str| -> Result<f64, ModelError> {
                            i.attribute(a).map_or(Ok(0.0), |raw| self.number(i, a, raw))
                        };
                        let (ixx, ixy, ixz) = (get("ixx")?, get("ixy")?, get("ixz")?);
                        let (iyy, iyz, izz) = (get("iyy")?, get("iyz")?, get("izz")?);
                        Matrix3::new(ixx, ixy, ixz, ixy, iyy, iyz, ixz, iyz, izz)
                    }
                };
                let r = frame.rotation;
                Some(LinkInertia {
                    mass,
                    com: frame.translation,
                    inertia: r * tensor * r.transpose(),
                })
            }
        };
        Ok(Link { name, inertia })
    }

    fn joint(&self, node: Node, notes: &mut Vec<Diagnostic>) -> Result<JointSpec, ModelError> {
        let name = self.required_attr(node, "name")?.to_string();
        let kind_raw = self.required_attr(node, "type")?;
        let line = self.line(node);
        let kind = match JointKind::parse(kind_raw) {
            Some(kind) => kind,
            None if matches!(kind_raw, "floating" | "planar") => {
                return Err(ModelError::Unsupported {
                    joint: name,
                    feature: format!("{kind_raw} joints"),
                    line,
                })
            }
            None => {
                return Err(ModelError::UnknownJointKind {
                    joint: name,
                    kind: kind_raw.to_string(),
                    line,
                })
            }
        };
        if child(node, "mimic").is_some() {
            return Err(ModelError::Unsupported {
                joint: name,
                feature: "mimic joints".into(),
                line,
            });
        }
        let link_ref = |tag: &str| -> Result<String, ModelError> {
            let el = child(node, tag).ok_or_else(|| ModelError::MissingElement {
                element: "joint".into(),
                child: tag.into(),
                line,
            })?;
            Ok(self.required_attr(el, "link")?.to_string())
        };
        let parent = link_ref("parent")?;
        let child_link = link_ref("child")?;
        let origin = self.origin(node)?;

        let raw_axis = match child(node, "axis") {
            Some(a) => Vector3::from(self.vec3(a, "xyz", [1.0, 0.0, 0.0])?),
            None => Vector3::x(),
        };
        let norm = raw_axis.norm();
        let axis = if kind.is_movable() {
            if norm == 0.0 {
                return Err(ModelError::DegenerateAxis { joint: name });
            }
            if (norm - 1.0).abs() > super::AXIS_TOLERANCE {
                notes.push(Diagnostic::warning(
                    &format!("joint `{name}`"),
                    format!("axis had norm {norm}; normalized"),
                ));
            }
            raw_axis / norm
        } else if norm > 0.0 {
            raw_axis / norm
        } else {
            raw_axis
        };

        let (mut velocity_limit, mut effort_limit) = (None, None);
        if let Some(limit) = child(node, "limit") {
            if let Some(raw) = limit.attribute("velocity") {
                velocity_limit = Some(self.number(limit, "velocity", raw)?);
            }
            if let Some(raw) = limit.attribute("effort") {
                effort_limit = Some(self.number(limit, "effort", raw)?);
            }
        }

        Ok(JointSpec {
            name,
            kind,
            parent,
            child: child_link,
            axis,
            origin,
            velocity_limit,
            effort_limit,
        })
    }
}

fn child<'a, 'input>(node: Node<'a, 'input>, tag: &str) -> Option<Node<'a, 'input>> {
    node.children()
        .find(|c| c.is_element() && c.tag_name().name() == tag)
}
